//! Ground-state wave function of the quartic anharmonic oscillator
//! `V(x) = (M/2) omega^2 x^2 + g x^4`, reconstructed three ways:
//!
//! 1. **Coupling expansion** — Gaussian moments are reduced to
//!    contraction diagrams ([`wick`]), each diagram is integrated in
//!    closed form in the low-temperature limit ([`lowtemp`]), and the
//!    results assemble into exact-rational series for the energy, the
//!    diagonal density and the wave function ([`series`]).
//! 2. **Trial-frequency resummation** — the truncated series is rewritten
//!    around an arbitrary reference frequency and the frequency is fixed
//!    pointwise by stationarity, giving a nonperturbative wave function
//!    that survives large coupling ([`variational`]).
//! 3. **Direct diagonalization** — an independent finite-difference
//!    eigensolver provides reference ground states to compare against
//!    ([`oracle`], [`analysis`]).
//!
//! All series coefficients are exact rationals ([`poly`]); floating
//! point enters only at evaluation time.  Sampled wave functions live on
//! uniform half-line grids ([`grid`]) with the even extension implied.

pub mod analysis;
pub mod grid;
pub mod lowtemp;
pub mod oracle;
pub mod poly;
pub mod series;
pub mod units;
pub mod variational;
pub mod wick;
