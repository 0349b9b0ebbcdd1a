//! Exact coupling series for the energy, the diagonal density and the
//! ground-state wave function.
//!
//! The assembled exponent contributions of the connected diagrams have
//! the form `W_r(x) = u_r(x) + b_r B` (constant plus extensive part,
//! `B` the inverse temperature).  Three structural facts, each verified
//! here rather than assumed, turn them into the series of interest:
//!
//! * the extensive coefficients `b_r` carry no `x` dependence, so they
//!   cancel between amplitude and partition function and what remains of
//!   them is the energy shift `E_r = -b_r`;
//! * the `B^2` contribution to the second cumulant of the partition
//!   function cancels exactly (variance of a constant), keeping
//!   `log Z` linear in `B`;
//! * the Gaussian means of the `u_r` combinations vanish, i.e. the
//!   density series emerges normalized on its own — its residual
//!   normalization integrals are exactly zero.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::lowtemp::{assemble_w_exponent, LowTempError, WExponentParts};
use crate::poly::{rat, GPoly, Rat, XPoly};
use crate::units::Order;

/// Gaussian width parameter of the harmonic ground state in natural
/// units: the density `|psi_0|^2` is proportional to `exp(-x^2)`, so the
/// weight parameter is 1.
fn density_width() -> Rat {
    Rat::one()
}

/// Errors of the series-assembly layer.  All of them flag broken
/// structural identities (or a failure below in the integration layer);
/// none can be triggered by valid inputs.
#[derive(Debug, Error, PartialEq)]
pub enum SeriesError {
    #[error(transparent)]
    LowTemp(#[from] LowTempError),
    #[error(
        "extensive part at order {order} depends on x ({poly}); it cannot \
         be an energy shift"
    )]
    ExtensiveXDependence { order: u32, poly: String },
    #[error(
        "quadratic-in-B part of log Z fails to cancel at second order \
         (residual {residual}); the cumulant algebra is inconsistent"
    )]
    BetaSquareResidual { residual: String },
    #[error(
        "extensive parts fail to cancel in the diagonal density at order \
         {order} (residual {residual})"
    )]
    ExtensiveResidual { order: u32, residual: String },
}

/// Ground-state energy series `E = E0 + E1 g + E2 g^2 + ...` in natural
/// units (restore units per order via
/// [`crate::units::energy_dim_exponents`]).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnergySeries {
    pub e0: Rat,
    pub e1: Rat,
    pub e2: Rat,
}

impl EnergySeries {
    /// Numerical evaluation at coupling `g` (natural units).
    pub fn eval(&self, g: f64) -> f64 {
        crate::poly::rat_to_f64(self.e0)
            + crate::poly::rat_to_f64(self.e1) * g
            + crate::poly::rat_to_f64(self.e2) * g * g
    }
}

/// Both exponent orders, assembled once.
fn exponent_orders() -> Result<[WExponentParts; 2], SeriesError> {
    Ok([
        assemble_w_exponent(Order::First)?,
        assemble_w_exponent(Order::Second)?,
    ])
}

/// Checks that an extensive part is a pure constant and returns it.
fn extensive_constant(order: u32, poly: &XPoly) -> Result<Rat, SeriesError> {
    let b = poly.coeff(0);
    let mut rest = poly.clone();
    rest.add_term(0, -b);
    if !rest.is_zero() {
        return Err(SeriesError::ExtensiveXDependence {
            order,
            poly: poly.to_string(),
        });
    }
    Ok(b)
}

/// Derives the energy series from the extensive parts of the exponent.
///
/// The amplitude behaves like `exp(-E B)` at low temperature, so the
/// energy shift at order `r` is minus the extensive coefficient `b_r`.
/// Before reading them off, the second cumulant of the partition
/// function is checked: its `B^2` part must cancel exactly between
/// `<W_1^2>` and `<W_1>^2`, and the extensive parts must carry no `x`
/// dependence.  Both checks are exact rational identities.
pub fn energy_series() -> Result<EnergySeries, SeriesError> {
    let [w1, w2] = exponent_orders()?;
    let a = density_width();

    // Write W_r = u_r(x) + beta_r(x) B without assuming anything about
    // beta_r.  The second cumulant of Z at order g^2 is
    //   <W_2> + (<W_1^2> - <W_1>^2) / 2,
    // whose B^2 coefficient is Var(beta_1)/2 and whose B coefficient is
    // <beta_2> + Cov(u_1, beta_1).
    let beta1 = &w1.beta_linear;
    let mean_beta1 = beta1.gaussian_mean(a);
    let var_beta1 = beta1.mul(beta1).gaussian_mean(a) - mean_beta1 * mean_beta1;
    if !var_beta1.is_zero() {
        return Err(SeriesError::BetaSquareResidual {
            residual: var_beta1.to_string(),
        });
    }
    let mean_u1 = w1.constant.gaussian_mean(a);
    let cov_u1_beta1 = w1.constant.mul(beta1).gaussian_mean(a) - mean_u1 * mean_beta1;

    // Syntactic check on top of the statistical one: an x-dependent
    // extensive part cannot be an energy shift.
    let b1 = extensive_constant(1, beta1)?;
    let b2 = extensive_constant(2, &w2.beta_linear)?;

    // The amplitude decays like exp(-E B), so each order's energy shift
    // is minus the surviving B coefficient of log Z at that order.  The
    // harmonic base contributes the familiar 1/2 of the quadratic well.
    Ok(EnergySeries {
        e0: rat(1, 2),
        e1: -b1,
        e2: -(b2 + cov_u1_beta1),
    })
}

/// Exponent series of the diagonal density `rho(x) = |psi(x)|^2`:
/// `log rho = -x^2 + g v_1(x) + g^2 v_2(x)` in natural units, with the
/// extensive parts cancelled against the partition function and the
/// normalization constant `sqrt(1/pi)` left implicit.
///
/// The cancellation is performed, not assumed: the partition-function
/// cumulants are subtracted order by order and any surviving extensive
/// term is a hard error.  (The `x`-independent constants also cancel —
/// the Gaussian mean of `u_1` vanishes and `<u_2> + Var(u_1)/2 = 0` —
/// which is the series form of the normalization identities checked in
/// [`check_normalization`].)
pub fn rho_diagonal_series() -> Result<GPoly, SeriesError> {
    let [w1, w2] = exponent_orders()?;
    let a = density_width();

    // log rho = log amplitude - log Z, with
    //   log amplitude = -x^2 + g W_1 + g^2 W_2  (constant prefactors and
    //   the harmonic B-decay handled with the partition function), and
    //   log Z order g:   <u_1> + <beta_1> B
    //         order g^2: <u_2> + Var(u_1)/2
    //                    + (<beta_2> + Cov(u_1, beta_1)) B
    //                    + Var(beta_1)/2 B^2.
    let u1 = &w1.constant;
    let u2 = &w2.constant;
    let beta1 = &w1.beta_linear;
    let beta2 = &w2.beta_linear;

    let mean_u1 = u1.gaussian_mean(a);
    let mean_beta1 = beta1.gaussian_mean(a);
    let mean_u2 = u2.gaussian_mean(a);
    let var_u1 = u1.mul(u1).gaussian_mean(a) - mean_u1 * mean_u1;
    let cov_u1_beta1 = u1.mul(beta1).gaussian_mean(a) - mean_u1 * mean_beta1;
    let var_beta1 = beta1.mul(beta1).gaussian_mean(a) - mean_beta1 * mean_beta1;
    if !var_beta1.is_zero() {
        return Err(SeriesError::BetaSquareResidual {
            residual: var_beta1.to_string(),
        });
    }

    // Surviving B-linear part of log rho per order; both must vanish for
    // the diagonal density to have a temperature-free limit.
    let mut resid1 = beta1.clone();
    resid1.add_term(0, -mean_beta1);
    if !resid1.is_zero() {
        return Err(SeriesError::ExtensiveResidual {
            order: 1,
            residual: resid1.to_string(),
        });
    }
    let mut resid2 = beta2.clone();
    resid2.add_term(0, -(beta2.gaussian_mean(a) + cov_u1_beta1));
    if !resid2.is_zero() {
        return Err(SeriesError::ExtensiveResidual {
            order: 2,
            residual: resid2.to_string(),
        });
    }

    let mut v1 = u1.clone();
    v1.add_term(0, -mean_u1);
    let mut v2 = u2.clone();
    v2.add_term(0, -(mean_u2 + var_u1 / rat(2, 1)));

    let mut series = GPoly::zero();
    series.add_order(0, &XPoly::monomial(2, -Rat::one()));
    series.add_order(1, &v1);
    series.add_order(2, &v2);
    Ok(series)
}

/// Prefactor series of the ground-state wave function:
/// `psi(x) = (1/pi)^(1/4) e^(-x^2/2) (1 + g P_1(x) + g^2 P_2(x))` in
/// natural units.
///
/// Obtained from the diagonal density by taking the square root
/// (halving the exponent series) and re-expanding the exponential:
/// `P_1 = v_1 / 2`, `P_2 = v_2 / 2 + v_1^2 / 8`.
pub fn psi_pert_series() -> Result<GPoly, SeriesError> {
    let rho = rho_diagonal_series()?;
    let v1 = rho.order(1);
    let v2 = rho.order(2);

    let p1 = v1.scaled(rat(1, 2));
    let mut p2 = v2.scaled(rat(1, 2));
    p2.add_assign(&v1.mul(&v1).scaled(rat(1, 8)));

    let mut series = GPoly::zero();
    series.add_order(0, &XPoly::monomial(0, Rat::one()));
    series.add_order(1, &p1);
    series.add_order(2, &p2);
    Ok(series)
}

/// Exponent series of the ground-state wave function itself (half the
/// density exponent): `log psi + (1/4) log pi = -x^2/2 + g v_1/2 +
/// g^2 v_2/2` in natural units.  This is the input the trial-frequency
/// resummation rewrites; the `(1/4) log(M omega / hbar pi)` normalization
/// prefactor is part of the wave function's exponent but not of the
/// polynomial series, and is handled by the resummation explicitly.
pub fn psi_exponent_series() -> Result<GPoly, SeriesError> {
    Ok(rho_diagonal_series()?.scaled(rat(1, 2)))
}

/// Residual normalization integrals of the wave-function series at first
/// and second order in the coupling, as exact rationals.
///
/// With `psi = (1/pi)^(1/4) e^(-x^2/2) (1 + g P1 + g^2 P2)`, the squared
/// norm is the Gaussian mean `<(1 + g P1 + g^2 P2)^2>` at width 1, so
/// the residuals are `r1 = 2 <P1>` and `r2 = <P1^2> + 2 <P2>`.  For a
/// correctly assembled series both vanish identically.
pub fn check_normalization(psi: &GPoly) -> (Rat, Rat) {
    let a = density_width();
    let p1 = psi.order(1);
    let p2 = psi.order(2);
    let r1 = rat(2, 1) * p1.gaussian_mean(a);
    let r2 = p1.mul(&p1).gaussian_mean(a) + rat(2, 1) * p2.gaussian_mean(a);
    (r1, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_series_matches_the_classic_coefficients() {
        let e = energy_series().unwrap();
        assert_eq!(e.e0, rat(1, 2));
        assert_eq!(e.e1, rat(3, 4));
        assert_eq!(e.e2, rat(-21, 8));
        // Alternating, growing coefficients: the series is asymptotic.
        assert!((e.eval(0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rho_series_matches_the_assembled_exponent() {
        let rho = rho_diagonal_series().unwrap();
        // Order 0: the harmonic density exponent.
        assert_eq!(rho.coeff(0, 2), rat(-1, 1));
        // Order 1: constants cancel nothing (mean is already zero).
        assert_eq!(rho.coeff(1, 0), rat(9, 8));
        assert_eq!(rho.coeff(1, 2), rat(-3, 2));
        assert_eq!(rho.coeff(1, 4), rat(-1, 2));
        // Order 2.
        assert_eq!(rho.coeff(2, 0), rat(-205, 32));
        assert_eq!(rho.coeff(2, 2), rat(21, 4));
        assert_eq!(rho.coeff(2, 4), rat(11, 8));
        assert_eq!(rho.coeff(2, 6), rat(1, 6));
    }

    /// The density series is born normalized: the x-independent
    /// partition-function corrections that the assembly subtracts are
    /// themselves exactly zero.
    #[test]
    fn density_constants_cancel_identically() {
        let [w1, w2] = exponent_orders().unwrap();
        let a = density_width();
        let mean_u1 = w1.constant.gaussian_mean(a);
        assert_eq!(mean_u1, Rat::zero());
        let mean_u2 = w2.constant.gaussian_mean(a);
        let var_u1 = w1.constant.mul(&w1.constant).gaussian_mean(a);
        // <u2> = -39/16 against Var(u1)/2 = +39/16.
        assert_eq!(mean_u2, rat(-39, 16));
        assert_eq!(var_u1, rat(39, 8));
        assert_eq!(mean_u2 + var_u1 / rat(2, 1), Rat::zero());
    }

    #[test]
    fn psi_prefactor_series_is_the_exponent_square_root() {
        let psi = psi_pert_series().unwrap();
        assert_eq!(psi.coeff(0, 0), Rat::one());
        // P1 = v1 / 2.
        assert_eq!(psi.coeff(1, 0), rat(9, 16));
        assert_eq!(psi.coeff(1, 2), rat(-3, 4));
        assert_eq!(psi.coeff(1, 4), rat(-1, 4));
        // P2 = v2 / 2 + v1^2 / 8; the x^0 entry combines
        // -205/64 + 81/512 = -1559/512.
        assert_eq!(psi.coeff(2, 0), rat(-1559, 512));
        assert_eq!(psi.coeff(2, 2), rat(141, 64));
        assert_eq!(psi.coeff(2, 4), rat(53, 64));
        assert_eq!(psi.coeff(2, 6), rat(13, 48));
        assert_eq!(psi.coeff(2, 8), rat(1, 32));
    }

    #[test]
    fn psi_exponent_is_half_the_density_exponent() {
        let e = psi_exponent_series().unwrap();
        assert_eq!(e.coeff(0, 2), rat(-1, 2));
        assert_eq!(e.coeff(1, 0), rat(9, 16));
        assert_eq!(e.coeff(2, 6), rat(1, 12));
    }

    #[test]
    fn normalization_residuals_vanish_exactly() {
        let psi = psi_pert_series().unwrap();
        let (r1, r2) = check_normalization(&psi);
        assert_eq!(r1, Rat::zero());
        assert_eq!(r2, Rat::zero());
    }

    /// The residual check must actually detect a broken series, not just
    /// return zero: perturb one coefficient and watch both residuals.
    #[test]
    fn normalization_residuals_detect_perturbations() {
        let mut psi = psi_pert_series().unwrap();
        psi.add_order(1, &XPoly::monomial(2, rat(1, 100)));
        let (r1, r2) = check_normalization(&psi);
        // r1 = 2 <x^2>/100 = 1/100.
        assert_eq!(r1, rat(1, 100));
        assert_ne!(r2, Rat::zero());
    }
}
