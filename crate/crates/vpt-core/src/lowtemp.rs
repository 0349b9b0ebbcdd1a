//! Closed-form imaginary-time integrals of contraction diagrams in the
//! low-temperature limit.
//!
//! In natural units (`hbar = M = omega = 1`, inverse temperature written
//! `B`), the two factor kinds produced by the contraction engine take the
//! boundary-dominated forms
//!
//! ```text
//! xcl(t)      = x (e^(-t) + e^(-(B - t)))
//! G(t1, t2)   = (1/2) (e^(-|t1 - t2|) - e^(-(t1 + t2)) - e^(-2B + t1 + t2))
//! ```
//!
//! Every factor is a short sum of pure exponentials once the absolute
//! value is resolved by a time ordering, so a diagram's integrand on one
//! ordering region is again such a sum, and the iterated integrals have
//! exact rational closed forms.  After integration each surviving term
//! behaves like `B^p e^(rB)`: positive `r` would be a divergence (it
//! cannot arise from decaying factors and is reported as an internal
//! error), negative `r` vanishes in the low-temperature limit and is
//! dropped, and `r = 0` contributes to the diagram's constant (`p = 0`)
//! or extensive (`p = 1`) part.  Anything faster than linear in `B`
//! breaks the cumulant structure and is also reported as an error.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::poly::{Rat, XPoly};
use crate::units::Order;
use crate::wick::{connected_w_terms, DiagramTerm, WickError};

/// Which imaginary-time argument a factor depends on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TauVar {
    Tau1,
    Tau2,
}

impl TauVar {
    fn index(self) -> usize {
        match self {
            TauVar::Tau1 => 0,
            TauVar::Tau2 => 1,
        }
    }
}

/// A factor of a diagram integrand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LowTFactor {
    /// The mean path evaluated at one time argument (carries one power
    /// of the endpoint coordinate `x`).
    ClassicalPath(TauVar),
    /// The two-point correlation between two (possibly equal) time
    /// arguments.
    Green(TauVar, TauVar),
}

/// Resolution of `|t1 - t2|` on one integration region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TauOrdering {
    Tau1LeTau2,
    Tau2LeTau1,
}

/// Errors of the factor expansion and integration layer.
#[derive(Debug, Error, PartialEq)]
pub enum LowTempError {
    #[error(
        "cross-argument correlation factor needs a resolved time ordering \
         before it can be written as pure exponentials"
    )]
    UnresolvedOrdering,
    #[error(
        "integrated term grows like exp({rate} B): no low-temperature limit \
         exists ({context}); decaying input factors cannot produce this"
    )]
    DivergentTerm { rate: i32, context: String },
    #[error(
        "integrated term grows like B^{power}: a single diagram must stay \
         at most linear in the inverse temperature ({context})"
    )]
    SuperlinearGrowth { power: u32, context: String },
    #[error("diagrams with {0} time arguments are not supported (expected 1 or 2)")]
    UnsupportedVertexCount(usize),
    #[error(transparent)]
    Algebra(#[from] WickError),
}

/// One exponential monomial
/// `coeff * x^x_pow * exp(tau_rates[0] t1 + tau_rates[1] t2 + beta_rate B)`
/// with exact rational coefficient and integer rates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExpTerm {
    pub coeff: Rat,
    pub x_pow: u32,
    pub tau_rates: [i32; 2],
    pub beta_rate: i32,
}

/// A finite sum of exponential monomials, closed under products.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExpSum {
    terms: Vec<ExpTerm>,
}

impl ExpSum {
    /// The multiplicative unit.
    pub fn one() -> Self {
        ExpSum {
            terms: vec![ExpTerm {
                coeff: Rat::one(),
                x_pow: 0,
                tau_rates: [0, 0],
                beta_rate: 0,
            }],
        }
    }

    fn from_terms(terms: Vec<ExpTerm>) -> Self {
        ExpSum { terms }.collected()
    }

    /// The monomials of the sum.
    pub fn terms(&self) -> &[ExpTerm] {
        &self.terms
    }

    /// Product of two sums, with like monomials merged.
    pub fn mul(&self, other: &ExpSum) -> ExpSum {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(ExpTerm {
                    coeff: a.coeff * b.coeff,
                    x_pow: a.x_pow + b.x_pow,
                    tau_rates: [
                        a.tau_rates[0] + b.tau_rates[0],
                        a.tau_rates[1] + b.tau_rates[1],
                    ],
                    beta_rate: a.beta_rate + b.beta_rate,
                });
            }
        }
        ExpSum::from_terms(terms)
    }

    /// `self^p` by repeated multiplication (powers here are tiny).
    pub fn pow(&self, p: u32) -> ExpSum {
        let mut out = ExpSum::one();
        for _ in 0..p {
            out = out.mul(self);
        }
        out
    }

    /// Merges monomials with identical `x` power and rates.
    fn collected(self) -> ExpSum {
        let mut acc: BTreeMap<(u32, [i32; 2], i32), Rat> = BTreeMap::new();
        for t in self.terms {
            *acc.entry((t.x_pow, t.tau_rates, t.beta_rate))
                .or_insert_with(Rat::zero) += t.coeff;
        }
        let terms = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((x_pow, tau_rates, beta_rate), coeff)| ExpTerm {
                coeff,
                x_pow,
                tau_rates,
                beta_rate,
            })
            .collect();
        ExpSum { terms }
    }

    /// Numerical evaluation at given times, inverse temperature and
    /// endpoint coordinate (used by tests to cross-check the expansion
    /// against the defining formulas).
    pub fn eval(&self, x: f64, tau: [f64; 2], big_b: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                crate::poly::rat_to_f64(t.coeff)
                    * x.powi(t.x_pow as i32)
                    * (t.tau_rates[0] as f64 * tau[0]
                        + t.tau_rates[1] as f64 * tau[1]
                        + t.beta_rate as f64 * big_b)
                        .exp()
            })
            .sum()
    }
}

/// Expands one factor into pure exponentials.
///
/// A correlation between distinct time arguments contains `|t1 - t2|`
/// and therefore requires `ordering`; passing `None` for such a factor
/// is an error.  Equal-argument correlations and mean-path factors are
/// ordering-free.
pub fn low_t_factor(
    factor: LowTFactor,
    ordering: Option<TauOrdering>,
) -> Result<ExpSum, LowTempError> {
    let half = Rat::new(1, 2);
    match factor {
        LowTFactor::ClassicalPath(v) => {
            let i = v.index();
            let mut fwd = [0i32; 2];
            fwd[i] = -1;
            let mut bwd = [0i32; 2];
            bwd[i] = 1;
            Ok(ExpSum::from_terms(vec![
                ExpTerm {
                    coeff: Rat::one(),
                    x_pow: 1,
                    tau_rates: fwd,
                    beta_rate: 0,
                },
                ExpTerm {
                    coeff: Rat::one(),
                    x_pow: 1,
                    tau_rates: bwd,
                    beta_rate: -1,
                },
            ]))
        }
        LowTFactor::Green(a, b) if a == b => {
            // Equal times: (1/2)(1 - e^(-2t) - e^(-2(B - t))).
            let i = a.index();
            let mut down = [0i32; 2];
            down[i] = -2;
            let mut up = [0i32; 2];
            up[i] = 2;
            Ok(ExpSum::from_terms(vec![
                ExpTerm {
                    coeff: half,
                    x_pow: 0,
                    tau_rates: [0, 0],
                    beta_rate: 0,
                },
                ExpTerm {
                    coeff: -half,
                    x_pow: 0,
                    tau_rates: down,
                    beta_rate: 0,
                },
                ExpTerm {
                    coeff: -half,
                    x_pow: 0,
                    tau_rates: up,
                    beta_rate: -2,
                },
            ]))
        }
        LowTFactor::Green(a, b) => {
            let ordering = ordering.ok_or(LowTempError::UnresolvedOrdering)?;
            // Indices of the earlier and later argument on this region.
            let (early, late) = match ordering {
                TauOrdering::Tau1LeTau2 => (TauVar::Tau1.index(), TauVar::Tau2.index()),
                TauOrdering::Tau2LeTau1 => (TauVar::Tau2.index(), TauVar::Tau1.index()),
            };
            debug_assert_ne!(a.index(), b.index());
            // (1/2)(e^(-(late - early)) - e^(-(t1 + t2)) - e^(-2B + t1 + t2)).
            let mut gap = [0i32; 2];
            gap[late] = -1;
            gap[early] = 1;
            Ok(ExpSum::from_terms(vec![
                ExpTerm {
                    coeff: half,
                    x_pow: 0,
                    tau_rates: gap,
                    beta_rate: 0,
                },
                ExpTerm {
                    coeff: -half,
                    x_pow: 0,
                    tau_rates: [-1, -1],
                    beta_rate: 0,
                },
                ExpTerm {
                    coeff: -half,
                    x_pow: 0,
                    tau_rates: [1, 1],
                    beta_rate: -2,
                },
            ]))
        }
    }
}

/// Intermediate after integrating out the inner time: a polynomial-times-
/// exponential monomial in the single remaining time.
#[derive(Clone, Copy, Debug)]
struct TauPoly {
    coeff: Rat,
    x_pow: u32,
    tau_pow: u32,
    tau_rate: i32,
    beta_rate: i32,
}

/// Fully integrated monomial `coeff * x^x_pow * B^beta_pow * e^(beta_rate B)`.
#[derive(Clone, Copy, Debug)]
struct BetaTerm {
    coeff: Rat,
    x_pow: u32,
    beta_pow: u32,
    beta_rate: i32,
}

/// `integral_0^T t^k e^(r t) dt` for one monomial, as terms in `T` —
/// here `T` is the full interval `B`, so the results are [`BetaTerm`]s.
fn integrate_monomial_full(tp: TauPoly) -> Vec<BetaTerm> {
    let k = tp.tau_pow;
    if tp.tau_rate == 0 {
        // Pure power: B^(k+1) / (k + 1).
        return vec![BetaTerm {
            coeff: tp.coeff / Rat::from_integer((k + 1) as i128),
            x_pow: tp.x_pow,
            beta_pow: k + 1,
            beta_rate: tp.beta_rate,
        }];
    }
    // Repeated integration by parts: the antiderivative of t^k e^(rt) is
    // e^(rt) sum_i (-1)^i (k! / (k-i)!) t^(k-i) / r^(i+1).
    let r = Rat::from_integer(tp.tau_rate as i128);
    let mut out = Vec::with_capacity(k as usize + 2);
    let mut falling = Rat::one();
    let mut r_pow = r;
    for i in 0..=k {
        let sign = if i % 2 == 0 { Rat::one() } else { -Rat::one() };
        out.push(BetaTerm {
            coeff: tp.coeff * sign * falling / r_pow,
            x_pow: tp.x_pow,
            beta_pow: k - i,
            beta_rate: tp.beta_rate + tp.tau_rate,
        });
        falling *= Rat::from_integer((k - i) as i128);
        r_pow *= r;
    }
    // Minus the antiderivative at t = 0: only the t^0 term survives.
    let sign = if k.is_multiple_of(2) {
        Rat::one()
    } else {
        -Rat::one()
    };
    let mut k_fact = Rat::one();
    for i in 1..=k {
        k_fact *= Rat::from_integer(i as i128);
    }
    let mut r_kp1 = Rat::one();
    for _ in 0..=k {
        r_kp1 *= r;
    }
    out.push(BetaTerm {
        coeff: -tp.coeff * sign * k_fact / r_kp1,
        x_pow: tp.x_pow,
        beta_pow: 0,
        beta_rate: tp.beta_rate,
    });
    out
}

/// Integrates `integrand` over the triangular region where the time with
/// index `inner` runs from 0 to the other time, which then runs from 0
/// to `B`.
fn integrate_region(integrand: &ExpSum, inner: usize) -> Vec<BetaTerm> {
    let outer = 1 - inner;
    let mut out = Vec::new();
    for t in integrand.terms() {
        let r_in = t.tau_rates[inner];
        let r_out = t.tau_rates[outer];
        // Inner integral over [0, t_outer].
        let pieces: Vec<TauPoly> = if r_in == 0 {
            vec![TauPoly {
                coeff: t.coeff,
                x_pow: t.x_pow,
                tau_pow: 1,
                tau_rate: r_out,
                beta_rate: t.beta_rate,
            }]
        } else {
            let r = Rat::from_integer(r_in as i128);
            vec![
                TauPoly {
                    coeff: t.coeff / r,
                    x_pow: t.x_pow,
                    tau_pow: 0,
                    tau_rate: r_in + r_out,
                    beta_rate: t.beta_rate,
                },
                TauPoly {
                    coeff: -t.coeff / r,
                    x_pow: t.x_pow,
                    tau_pow: 0,
                    tau_rate: r_out,
                    beta_rate: t.beta_rate,
                },
            ]
        };
        for p in pieces {
            out.extend(integrate_monomial_full(p));
        }
    }
    out
}

/// The low-temperature value of one integrated diagram, split into the
/// part constant in the inverse temperature and the part linear in it.
/// Both are exact even polynomials in the endpoint coordinate; the
/// diagram multiplicity is included.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiagramValue {
    pub constant: XPoly,
    pub beta_linear: XPoly,
}

impl DiagramValue {
    fn add_assign(&mut self, other: &DiagramValue) {
        self.constant.add_assign(&other.constant);
        self.beta_linear.add_assign(&other.beta_linear);
    }

    fn scaled(&self, s: Rat) -> DiagramValue {
        DiagramValue {
            constant: self.constant.scaled(s),
            beta_linear: self.beta_linear.scaled(s),
        }
    }
}

/// Sorts fully integrated terms into the diagram value, enforcing the
/// growth contract.
fn classify(
    terms: Vec<BetaTerm>,
    context: &str,
    log: Option<&mut Vec<String>>,
) -> Result<DiagramValue, LowTempError> {
    // Merge first: divergent rates must only be flagged if they survive
    // exact cancellation.
    let mut acc: BTreeMap<(u32, u32, i32), Rat> = BTreeMap::new();
    for t in terms {
        *acc.entry((t.x_pow, t.beta_pow, t.beta_rate))
            .or_insert_with(Rat::zero) += t.coeff;
    }
    let mut value = DiagramValue::default();
    let mut dropped = 0usize;
    for ((x_pow, beta_pow, beta_rate), coeff) in acc {
        if coeff.is_zero() {
            continue;
        }
        if beta_rate > 0 {
            return Err(LowTempError::DivergentTerm {
                rate: beta_rate,
                context: context.into(),
            });
        }
        if beta_rate < 0 {
            dropped += 1;
            continue;
        }
        match beta_pow {
            0 => value.constant.add_term(x_pow, coeff),
            1 => value.beta_linear.add_term(x_pow, coeff),
            p => {
                return Err(LowTempError::SuperlinearGrowth {
                    power: p,
                    context: context.into(),
                })
            }
        }
    }
    if let Some(log) = log {
        log.push(format!(
            "classified: constant [{}], linear-in-B [{}], {} decaying terms dropped",
            value.constant, value.beta_linear, dropped
        ));
    }
    Ok(value)
}

/// Builds the integrand of `term` on one ordering region as a product of
/// expanded factors.
fn region_integrand(
    term: &DiagramTerm,
    ordering: Option<TauOrdering>,
) -> Result<ExpSum, LowTempError> {
    let vars = [TauVar::Tau1, TauVar::Tau2];
    let mut integrand = ExpSum::one();
    for (&v, &p) in term.crosses() {
        let f = low_t_factor(LowTFactor::ClassicalPath(vars[v]), ordering)?;
        integrand = integrand.mul(&f.pow(p));
    }
    for (&(v, w), &p) in term.edges() {
        let f = low_t_factor(LowTFactor::Green(vars[v], vars[w]), ordering)?;
        integrand = integrand.mul(&f.pow(p));
    }
    Ok(integrand)
}

/// Integrates one contraction diagram over its time arguments on
/// `[0, B]^k` and extracts the low-temperature constant and linear
/// parts.  `vertex_count` is the number of time arguments of the moment
/// the diagram came from (a factorless diagram still integrates to `B`
/// per argument).
pub fn integrate_diagram(
    term: &DiagramTerm,
    vertex_count: usize,
) -> Result<DiagramValue, LowTempError> {
    integrate_diagram_impl(term, vertex_count, None)
}

/// As [`integrate_diagram`], additionally returning a human-readable
/// trace of the factor expansion, iterated integrals and classification.
pub fn integrate_diagram_logged(
    term: &DiagramTerm,
    vertex_count: usize,
) -> Result<(DiagramValue, Vec<String>), LowTempError> {
    let mut log = Vec::new();
    let value = integrate_diagram_impl(term, vertex_count, Some(&mut log))?;
    Ok((value, log))
}

fn integrate_diagram_impl(
    term: &DiagramTerm,
    vertex_count: usize,
    mut log: Option<&mut Vec<String>>,
) -> Result<DiagramValue, LowTempError> {
    let context = format!("{} * {}", term.multiplicity(), term.factors_string());
    if let Some(log) = log.as_deref_mut() {
        log.push(format!("diagram: {context}"));
    }
    let mult = Rat::from_integer(term.multiplicity() as i128);
    match vertex_count {
        1 => {
            let integrand = region_integrand(term, None)?;
            if let Some(log) = log.as_deref_mut() {
                log.push(format!(
                    "single time argument; integrand has {} exponential terms",
                    integrand.terms().len()
                ));
            }
            // One time argument: treat t2 as absent (all rates zero) and
            // integrate t1 from 0 to B directly.
            let terms: Vec<BetaTerm> = integrand
                .terms()
                .iter()
                .flat_map(|t| {
                    debug_assert_eq!(t.tau_rates[1], 0);
                    integrate_monomial_full(TauPoly {
                        coeff: t.coeff,
                        x_pow: t.x_pow,
                        tau_pow: 0,
                        tau_rate: t.tau_rates[0],
                        beta_rate: t.beta_rate,
                    })
                })
                .collect();
            Ok(classify(terms, &context, log.as_deref_mut())?.scaled(mult))
        }
        2 => {
            let mut all = Vec::new();
            for (ordering, inner, label) in [
                (TauOrdering::Tau1LeTau2, 0usize, "t1 <= t2"),
                (TauOrdering::Tau2LeTau1, 1usize, "t2 <= t1"),
            ] {
                let integrand = region_integrand(term, Some(ordering))?;
                let terms = integrate_region(&integrand, inner);
                if let Some(log) = log.as_deref_mut() {
                    log.push(format!(
                        "region {label}: {} exponential terms -> {} integrated terms",
                        integrand.terms().len(),
                        terms.len()
                    ));
                }
                all.extend(terms);
            }
            Ok(classify(all, &context, log)?.scaled(mult))
        }
        other => Err(LowTempError::UnsupportedVertexCount(other)),
    }
}

/// The `x`-dependent exponent contribution at one coupling order: the
/// full (natural-unit) coefficient of `g^order`, split into the part
/// constant in the inverse temperature and the extensive part linear in
/// it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WExponentParts {
    pub constant: XPoly,
    pub beta_linear: XPoly,
}

/// Sums the integrated connected diagrams of the given order into the
/// exponent contribution, applying the cumulant weight
/// `(-1)^order / order!` of the coupling expansion.
pub fn assemble_w_exponent(order: Order) -> Result<WExponentParts, LowTempError> {
    let (value, _) = assemble_impl(order, false)?;
    Ok(value)
}

/// As [`assemble_w_exponent`], also returning per-diagram derivation
/// traces.
pub fn assemble_w_exponent_logged(
    order: Order,
) -> Result<(WExponentParts, Vec<String>), LowTempError> {
    let (value, log) = assemble_impl(order, true)?;
    Ok((value, log))
}

fn assemble_impl(
    order: Order,
    want_log: bool,
) -> Result<(WExponentParts, Vec<String>), LowTempError> {
    let diagrams = connected_w_terms(order)?;
    let mut total = DiagramValue::default();
    let mut log = Vec::new();
    for term in diagrams.terms() {
        let value = if want_log {
            let (value, mut lines) = integrate_diagram_logged(term, diagrams.vertex_count())?;
            log.append(&mut lines);
            log.push(format!(
                "  value: constant [{}], linear-in-B [{}]",
                value.constant, value.beta_linear
            ));
            value
        } else {
            integrate_diagram(term, diagrams.vertex_count())?
        };
        total.add_assign(&value);
    }
    // Cumulant weight (-1)^r / r! for the expansion in the coupling.
    let weight = match order {
        Order::First => Rat::new(-1, 1),
        Order::Second => Rat::new(1, 2),
    };
    let weighted = total.scaled(weight);
    debug_assert!(
        weighted.constant.is_even_function() && weighted.beta_linear.is_even_function(),
        "diagonal-element diagrams must produce even polynomials"
    );
    if want_log {
        log.push(format!(
            "order {} total with cumulant weight {}: constant [{}], linear-in-B [{}]",
            order.value(),
            weight,
            weighted.constant,
            weighted.beta_linear
        ));
    }
    Ok((
        WExponentParts {
            constant: weighted.constant,
            beta_linear: weighted.beta_linear,
        },
        log,
    ))
}
