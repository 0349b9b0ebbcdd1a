//! Physical parameters and dimensional bookkeeping.
//!
//! Everything in this workspace is computed in natural units (`hbar = M =
//! omega = 1`); the types here carry the information needed to restore a
//! result to arbitrary units afterwards.  For an exponent-series monomial
//! `g^r x^(2j)` the restoring powers of `(hbar, M, omega)` are fixed
//! uniquely by `r` and `j` alone, which is what [`dim_exponents`] encodes.

use thiserror::Error;

/// Truncation order of the coupling expansion.
///
/// Only the first two orders in the quartic coupling are implemented; the
/// enum makes "order outside {1, 2}" unrepresentable past the parse
/// boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Order {
    /// Keep terms through `g^1`.
    First,
    /// Keep terms through `g^2`.
    Second,
}

impl Order {
    /// The order as the highest retained power of `g` (1 or 2).
    pub fn value(self) -> u32 {
        match self {
            Order::First => 1,
            Order::Second => 2,
        }
    }
}

/// Error returned when a requested expansion order is not implemented.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("expansion order must be 1 or 2, got {0}")]
pub struct OrderError(pub u32);

impl TryFrom<u32> for Order {
    type Error = OrderError;

    fn try_from(n: u32) -> Result<Self, OrderError> {
        match n {
            1 => Ok(Order::First),
            2 => Ok(Order::Second),
            other => Err(OrderError(other)),
        }
    }
}

/// Parameters of the potential `V(x) = (M/2) omega^2 x^2 + g x^4`,
/// together with `hbar`.
///
/// All fields default to 1 (natural units).  `mass`, `omega` and `hbar`
/// must be strictly positive; the quartic coupling `g` must be
/// non-negative (the potential is unbounded below otherwise and the
/// ground state ceases to exist).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OscillatorParams {
    /// Particle mass `M`.
    pub mass: f64,
    /// Harmonic frequency `omega`.
    pub omega: f64,
    /// Quartic coupling `g` (coefficient of `x^4`).
    pub g: f64,
    /// Reduced Planck constant.
    pub hbar: f64,
}

impl Default for OscillatorParams {
    fn default() -> Self {
        OscillatorParams {
            mass: 1.0,
            omega: 1.0,
            g: 0.0,
            hbar: 1.0,
        }
    }
}

/// Error returned for physically inadmissible oscillator parameters.
#[derive(Debug, Error, PartialEq)]
pub enum ParamsError {
    #[error("{name} must be strictly positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("quartic coupling must be non-negative and finite, got {0}")]
    BadCoupling(f64),
}

impl OscillatorParams {
    /// Natural-unit parameters with the given quartic coupling.
    pub fn natural(g: f64) -> Result<Self, ParamsError> {
        OscillatorParams {
            g,
            ..Default::default()
        }
        .validated()
    }

    /// Checks admissibility and returns `self` unchanged on success.
    pub fn validated(self) -> Result<Self, ParamsError> {
        let positive = [
            ("mass", self.mass),
            ("omega", self.omega),
            ("hbar", self.hbar),
        ];
        for (name, value) in positive {
            if value <= 0.0 || !value.is_finite() {
                return Err(ParamsError::NonPositive { name, value });
            }
        }
        if self.g < 0.0 || !self.g.is_finite() {
            return Err(ParamsError::BadCoupling(self.g));
        }
        Ok(self)
    }
}

/// Powers of `(hbar, M, omega)` that restore physical units to the
/// natural-unit coefficient of `g^r x^(2j)` in a wave-function exponent
/// or log-density series.
///
/// The exponent of a density logarithm is dimensionless while
/// `[g] = E / L^4`, `[x^2] = L^2` and `[hbar/(M omega)] = L^2`; matching
/// energy and length powers gives
/// `hbar^(r-j) M^(j-2r) omega^(j-3r)` — no freedom remains.
pub fn dim_exponents(g_order: u32, half_x_power: u32) -> (i32, i32, i32) {
    let r = g_order as i32;
    let j = half_x_power as i32;
    (r - j, j - 2 * r, j - 3 * r)
}

/// Powers of `(hbar, M, omega)` that restore physical units to the
/// natural-unit coefficient of `g^r` in an energy expansion.
///
/// Each power of `g` contributes `hbar^2 M^(-2) omega^(-3)` relative to an
/// energy `hbar omega`, so the coefficient carries
/// `hbar^(1+r) M^(-2r) omega^(1-3r)`.
pub fn energy_dim_exponents(g_order: u32) -> (i32, i32, i32) {
    let r = g_order as i32;
    (1 + r, -2 * r, 1 - 3 * r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_parses_only_one_and_two() {
        assert_eq!(Order::try_from(1), Ok(Order::First));
        assert_eq!(Order::try_from(2), Ok(Order::Second));
        assert_eq!(Order::try_from(0), Err(OrderError(0)));
        assert_eq!(Order::try_from(3), Err(OrderError(3)));
    }

    #[test]
    fn params_validation_rejects_bad_values() {
        assert!(OscillatorParams::natural(0.5).is_ok());
        assert!(OscillatorParams::natural(0.0).is_ok());
        assert!(OscillatorParams::natural(-1.0).is_err());
        assert!(OscillatorParams::natural(f64::NAN).is_err());
        let bad = OscillatorParams {
            omega: 0.0,
            ..Default::default()
        };
        assert_eq!(
            bad.validated(),
            Err(ParamsError::NonPositive {
                name: "omega",
                value: 0.0
            })
        );
    }

    /// Spot checks of the restoring powers against terms whose physical
    /// form is known by inspection.
    #[test]
    fn dim_exponents_match_known_monomials() {
        // Gaussian exponent -(M omega / 2 hbar) x^2: r = 0, j = 1.
        assert_eq!(dim_exponents(0, 1), (-1, 1, 1));
        // First-order x^4 term -(g / 4 hbar omega) x^4: r = 1, j = 2.
        assert_eq!(dim_exponents(1, 2), (-1, 0, -1));
        // First-order constant g * 9 hbar / 16 M^2 omega^3... as exponent
        // coefficient of g^1 x^0: hbar^1 M^-2 omega^-3.
        assert_eq!(dim_exponents(1, 0), (1, -2, -3));
        // Second-order x^8 term: hbar^-2 M^0 omega^-2.
        assert_eq!(dim_exponents(2, 4), (-2, 0, -2));
    }

    #[test]
    fn energy_dims_match_known_orders() {
        // E0 = hbar omega / 2.
        assert_eq!(energy_dim_exponents(0), (1, 0, 1));
        // E1 coefficient carries hbar^2 M^-2 omega^-2.
        assert_eq!(energy_dim_exponents(1), (2, -2, -2));
        assert_eq!(energy_dim_exponents(2), (3, -4, -5));
    }
}
