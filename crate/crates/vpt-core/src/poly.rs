//! Exact rational polynomials in `x` and the coupling `g`.
//!
//! Every coefficient produced by the contraction and integration pipeline
//! is an exact rational number; keeping them that way until the final
//! numeric evaluation is what lets the series identities (normalization
//! residuals, cancellation of the extensive terms) be asserted as exact
//! equalities instead of tolerance checks.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::units::dim_exponents;

/// Exact rational scalar used throughout the symbolic layer.
///
/// `i128` components leave enormous headroom: the largest integers in the
/// pipeline are pairing multiplicities (hundreds) and factorials of small
/// integration depths.
pub type Rat = Ratio<i128>;

/// Shorthand constructor for a rational from a numerator/denominator pair.
pub fn rat(num: i128, den: i128) -> Rat {
    Rat::new(num, den)
}

/// Generalized binomial coefficient `C(a, k)` for rational `a`.
///
/// Needed for the square-root re-expansion, where half-integer upper
/// arguments appear.
pub fn binom_rat(a: Rat, k: u32) -> Rat {
    let mut num = Rat::one();
    for i in 0..k {
        num *= a - Rat::from_integer(i as i128);
    }
    let mut den = Rat::one();
    for i in 1..=k {
        den *= Rat::from_integer(i as i128);
    }
    num / den
}

/// Integer binomial coefficient as a rational.
pub fn binom_int(n: u32, k: u32) -> Rat {
    if k > n {
        return Rat::zero();
    }
    binom_rat(Rat::from_integer(n as i128), k)
}

/// Normalized Gaussian moment `<x^(2k)>` under the weight
/// `exp(-a x^2)`, i.e. `(2k - 1)!! / (2a)^k`.
///
/// The odd double factorial counts pairings of `2k` objects, which is why
/// the same integers appear in the contraction multiplicities.
pub fn gaussian_moment(k: u32, a: Rat) -> Rat {
    let mut m = Rat::one();
    for i in 1..=k {
        // (2i - 1) / (2a) per step builds (2k-1)!! / (2a)^k.
        m *= Rat::from_integer((2 * i - 1) as i128) / (Rat::from_integer(2) * a);
    }
    m
}

/// Even polynomial in `x` with exact rational coefficients, keyed by the
/// full power of `x` (0, 2, 4, ...).
///
/// Odd powers are representable (the integration machinery is generic)
/// but never arise in diagonal-element series; the assembly layer checks
/// that.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct XPoly {
    coeffs: BTreeMap<u32, Rat>,
}

impl XPoly {
    /// The zero polynomial.
    pub fn zero() -> Self {
        XPoly::default()
    }

    /// A single monomial `c x^pow`.
    pub fn monomial(pow: u32, c: Rat) -> Self {
        let mut p = XPoly::zero();
        p.add_term(pow, c);
        p
    }

    /// Adds `c x^pow` in place, dropping the entry if it cancels to zero.
    pub fn add_term(&mut self, pow: u32, c: Rat) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(pow).or_insert_with(Rat::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&pow);
        }
    }

    /// Adds another polynomial in place.
    pub fn add_assign(&mut self, other: &XPoly) {
        for (&pow, &c) in &other.coeffs {
            self.add_term(pow, c);
        }
    }

    /// Multiplies every coefficient by `s`.
    pub fn scaled(&self, s: Rat) -> XPoly {
        let mut out = XPoly::zero();
        for (&pow, &c) in &self.coeffs {
            out.add_term(pow, c * s);
        }
        out
    }

    /// Polynomial product.
    pub fn mul(&self, other: &XPoly) -> XPoly {
        let mut out = XPoly::zero();
        for (&p1, &c1) in &self.coeffs {
            for (&p2, &c2) in &other.coeffs {
                out.add_term(p1 + p2, c1 * c2);
            }
        }
        out
    }

    /// Coefficient of `x^pow` (zero if absent).
    pub fn coeff(&self, pow: u32) -> Rat {
        self.coeffs.get(&pow).copied().unwrap_or_else(Rat::zero)
    }

    /// Iterates `(x_power, coefficient)` in increasing power order.
    pub fn terms(&self) -> impl Iterator<Item = (u32, Rat)> + '_ {
        self.coeffs.iter().map(|(&p, &c)| (p, c))
    }

    /// True if no terms remain.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True if every retained power of `x` is even.
    pub fn is_even_function(&self) -> bool {
        self.coeffs.keys().all(|&p| p % 2 == 0)
    }

    /// Normalized Gaussian expectation of the polynomial under
    /// `exp(-a x^2)`, exact.
    pub fn gaussian_mean(&self, a: Rat) -> Rat {
        let mut total = Rat::zero();
        for (&pow, &c) in &self.coeffs {
            assert!(
                pow % 2 == 0,
                "Gaussian mean of an odd power is zero by parity; \
                     odd powers are not expected here"
            );
            total += c * gaussian_moment(pow / 2, a);
        }
        total
    }

    /// Evaluates at a floating-point `x`.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(&p, &c)| rat_to_f64(c) * x.powi(p as i32))
            .sum()
    }
}

impl fmt::Display for XPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&pow, &c) in &self.coeffs {
            if first {
                write!(f, "{c}")?;
            } else if c.is_negative() {
                write!(f, " - {}", -c)?;
            } else {
                write!(f, " + {c}")?;
            }
            if pow > 0 {
                write!(f, "*x^{pow}")?;
            }
            first = false;
        }
        Ok(())
    }
}

/// Converts an exact rational to `f64` through its components.
pub fn rat_to_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Polynomial in the coupling `g` whose coefficients are even
/// `x`-polynomials, i.e. a truncated series
/// `sum_r g^r P_r(x)` with exact rational `P_r`.
///
/// Natural units are implied; [`GPoly::dim_exponents_for`] restores the
/// `(hbar, M, omega)` powers of any stored monomial.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GPoly {
    orders: BTreeMap<u32, XPoly>,
}

impl GPoly {
    /// The zero series.
    pub fn zero() -> Self {
        GPoly::default()
    }

    /// Adds `g^order * poly` in place.
    pub fn add_order(&mut self, order: u32, poly: &XPoly) {
        if poly.is_zero() {
            return;
        }
        let slot = self.orders.entry(order).or_insert_with(XPoly::zero);
        slot.add_assign(poly);
        if slot.is_zero() {
            self.orders.remove(&order);
        }
    }

    /// The `x`-polynomial multiplying `g^order` (zero if absent).
    pub fn order(&self, order: u32) -> XPoly {
        self.orders.get(&order).cloned().unwrap_or_else(XPoly::zero)
    }

    /// Coefficient of `g^order x^x_pow`.
    pub fn coeff(&self, order: u32, x_pow: u32) -> Rat {
        self.orders
            .get(&order)
            .map(|p| p.coeff(x_pow))
            .unwrap_or_else(Rat::zero)
    }

    /// Iterates `(g_order, x_power, coefficient)` in lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, Rat)> + '_ {
        self.orders
            .iter()
            .flat_map(|(&r, poly)| poly.terms().map(move |(p, c)| (r, p, c)))
    }

    /// Highest power of `g` present.
    pub fn max_order(&self) -> u32 {
        self.orders.keys().last().copied().unwrap_or(0)
    }

    /// Restoring `(hbar, M, omega)` powers for the monomial
    /// `g^order x^x_pow` (requires an even `x` power).
    pub fn dim_exponents_for(order: u32, x_pow: u32) -> (i32, i32, i32) {
        assert!(
            x_pow.is_multiple_of(2),
            "diagonal-series monomials carry even x powers"
        );
        dim_exponents(order, x_pow / 2)
    }

    /// Multiplies every coefficient by `s`.
    pub fn scaled(&self, s: Rat) -> GPoly {
        let mut out = GPoly::zero();
        for (&r, poly) in &self.orders {
            out.add_order(r, &poly.scaled(s));
        }
        out
    }
}
