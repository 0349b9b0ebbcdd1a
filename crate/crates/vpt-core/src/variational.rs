//! Trial-frequency resummation of the wave-function exponent and
//! pointwise optimization of the trial frequency.
//!
//! The truncated exponent series in the coupling is rewritten around an
//! arbitrary trial frequency `Omega` through the substitution
//! `omega^2 = Omega^2 (1 + g r)` with `r = (omega^2 - Omega^2)/(g Omega^2)`:
//! every power `omega^q` becomes `Omega^q (1 + g r)^(q/2)`, the binomial
//! is truncated at the working order *counting `g r` as one power of the
//! coupling*, and `g r` is then eliminated again in favor of
//! `u = omega^2/Omega^2 - 1`.  The result is exact in the sense that at
//! `Omega = omega` it reproduces the original series identically; away
//! from that point it reshuffles higher orders, and fixing `Omega` by
//! stationarity of the exponent (principle of minimal sensitivity) turns
//! the divergent series into a controlled approximation even at large
//! coupling.
//!
//! The stationarity condition generally has several solutions that
//! appear, merge and separate as the position `x` varies, so "the"
//! optimal frequency is a path-selection problem.  [`solve_omega_profile`]
//! gathers candidate frequencies per grid point (stationary points,
//! inflection fallbacks where no stationary point exists, plus guards
//! for roots that a sign-change scan cannot see: the exact `Omega =
//! omega` double root at vanishing coupling and freshly split stationary
//! pairs near an inflection), then picks one candidate per point by
//! dynamic programming, minimizing total variation of the profile with
//! ties broken toward smaller single jumps and stationary (rather than
//! inflection) candidates.

use rayon::prelude::*;
use thiserror::Error;

use crate::grid::{GridError, GridFunction};
use crate::poly::{binom_int, binom_rat, rat, rat_to_f64, GPoly, Rat};
use crate::units::{dim_exponents, Order, OscillatorParams};

/// Relative tolerance used to merge candidate frequencies that are the
/// same root found twice (well above bisection error, well below any
/// genuine branch separation).
const ROOT_MERGE_REL: f64 = 1e-9;

/// Scale-invariant threshold deciding whether the exponent derivative at
/// a probe frequency is "zero" — used to admit the exact double root at
/// `Omega = omega` and to promote degenerate inflection points.
const STATIONARY_PROBE_REL: f64 = 1e-9;

/// Positive exponent beyond which `exp` overflows `f64` (e^709 is the
/// edge; stay under it).
const EXP_OVERFLOW_LIMIT: f64 = 700.0;

/// Hard ceiling for automatic widening of the frequency search window.
const WIDEN_CEILING: f64 = 1e6;

/// Which stationarity solution to follow at the outermost grid point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SeedBranch {
    /// Seed on the largest candidate frequency (the physical branch that
    /// grows like `sqrt(g) x` at large `x`).
    #[default]
    Largest,
    /// Seed on the smallest candidate frequency.
    Smallest,
}

/// How a profile point's frequency was determined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum RootKind {
    /// A stationary point of the exponent in the trial frequency
    /// (includes probed/promoted double roots, which are stationary but
    /// invisible to a sign-change scan).
    Extremum,
    /// An inflection point of the exponent, used where no stationary
    /// point exists (vanishing-derivative fallback).
    TurningPoint,
}

impl RootKind {
    fn rank(self) -> f64 {
        match self {
            RootKind::Extremum => 0.0,
            RootKind::TurningPoint => 1.0,
        }
    }
}

/// Search-window and selection policy for the profile solver.
#[derive(Clone, Copy, Debug)]
pub struct SolverPolicy {
    /// Lower edge of the trial-frequency window.
    pub omega_min: f64,
    /// Upper edge of the window (widened automatically while the seeded
    /// branch presses against it, up to a hard ceiling).
    pub omega_max: f64,
    /// Points of the logarithmic sign-change scan.
    pub scan_points: usize,
    /// Which branch to seed at the outermost grid point.
    pub seed: SeedBranch,
    /// Restrict candidates to one kind (used e.g. to trace the
    /// inflection-fallback branch on its own).
    pub kind_filter: Option<RootKind>,
    /// Relative width at which root bisection stops.
    pub rel_tol: f64,
}

impl Default for SolverPolicy {
    fn default() -> Self {
        SolverPolicy {
            omega_min: 1e-3,
            omega_max: 1e2,
            scan_points: 400,
            seed: SeedBranch::Largest,
            kind_filter: None,
            rel_tol: 1e-12,
        }
    }
}

/// Pointwise-optimized trial frequency along a position grid.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaProfile {
    /// Grid positions (strictly increasing, non-negative).
    pub xs: Vec<f64>,
    /// Selected trial frequency per position.
    pub omega: Vec<f64>,
    /// What kind of candidate was selected per position.
    pub kind: Vec<RootKind>,
    /// Index of the selected candidate in that position's candidate
    /// list (stationary block first, then inflections, each in
    /// increasing frequency) — constant stretches identify a branch.
    pub branch_id: Vec<usize>,
}

impl OmegaProfile {
    /// Largest change of the selected frequency between neighboring grid
    /// points, with its position index; `None` for single-point grids.
    pub fn largest_jump(&self) -> Option<(usize, f64)> {
        (1..self.omega.len())
            .map(|i| (i, (self.omega[i] - self.omega[i - 1]).abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }
}

/// Raw sign-change scans of the exponent's frequency derivatives at one
/// position: the stationary points and inflection points a plain scan
/// sees (no probing or promotion applied).
#[derive(Clone, Debug, PartialEq)]
pub struct StationaryScan {
    pub extrema: Vec<f64>,
    pub turning_points: Vec<f64>,
}

/// Errors of the resummation and profile layer.
#[derive(Debug, Error, PartialEq)]
pub enum VariationalError {
    #[error("trial frequency must be strictly positive, got {0}")]
    NonPositiveTrialFrequency(f64),
    #[error("position grid is empty")]
    EmptyGrid,
    #[error("position grid must be non-negative, finite and strictly increasing (index {index})")]
    InvalidGrid { index: usize },
    #[error(
        "no stationary or inflection candidate for the trial frequency at \
         x = {x} inside the search window"
    )]
    NoStationaryPoint { x: f64 },
    #[error(
        "wave-function exponent {exponent:.3} at x = {x} overflows: the \
         selected frequency branch does not describe a decaying state"
    )]
    AmplitudeOverflow { x: f64, exponent: f64 },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// One resummed exponent monomial
/// `coeff * g^g_pow * x^x_pow * Omega^trial_pow * omega^omega_pow`
/// in natural units (`hbar`/`M` powers are fixed by `g_pow` and `x_pow`
/// and restored at evaluation).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResummedTerm {
    pub coeff: Rat,
    pub g_pow: u32,
    pub x_pow: u32,
    pub trial_pow: i32,
    pub omega_pow: i32,
}

/// The resummed exponent: polynomial terms plus the implicit
/// `(1/4) log(M Omega / hbar pi)` normalization term (whose own
/// resummation contributes polynomial terms collected here as well).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariationalSeries {
    order: Order,
    terms: Vec<ResummedTerm>,
}

impl VariationalSeries {
    /// Working order of the resummation.
    pub fn order(&self) -> Order {
        self.order
    }

    /// The polynomial terms, sorted by `(g, x, trial, omega)` powers.
    pub fn terms(&self) -> &[ResummedTerm] {
        &self.terms
    }

    /// Coefficient lookup for tests and inspection.
    pub fn coeff(&self, g_pow: u32, x_pow: u32, trial_pow: i32, omega_pow: i32) -> Rat {
        self.terms
            .iter()
            .find(|t| {
                t.g_pow == g_pow
                    && t.x_pow == x_pow
                    && t.trial_pow == trial_pow
                    && t.omega_pow == omega_pow
            })
            .map(|t| t.coeff)
            .unwrap_or_else(|| rat(0, 1))
    }

    /// Exact rational evaluation of the polynomial part (everything but
    /// the logarithmic normalization term) in natural units, at rational
    /// arguments.  Used to assert structural identities exactly.
    pub fn polynomial_part_exact(&self, x: Rat, trial: Rat, omega: Rat, g: Rat) -> Rat {
        let mut total = rat(0, 1);
        for t in &self.terms {
            total += t.coeff
                * rat_pow(g, t.g_pow as i32)
                * rat_pow(x, t.x_pow as i32)
                * rat_pow(trial, t.trial_pow)
                * rat_pow(omega, t.omega_pow);
        }
        total
    }
}

fn rat_pow(base: Rat, exp: i32) -> Rat {
    let mut acc = rat(1, 1);
    for _ in 0..exp.unsigned_abs() {
        acc *= base;
    }
    if exp < 0 {
        rat(1, 1) / acc
    } else {
        acc
    }
}

/// Rewrites the truncated exponent series around a trial frequency.
///
/// `psi_exponent` is the natural-unit wave-function exponent series
/// (orders `0..=order.value()`; order 0 is the Gaussian `-x^2/2`).  Each
/// monomial's implicit frequency power `omega^(j - 3r)` is substituted
/// and re-expanded as described in the module docs, and the implicit
/// `(1/4) log omega` of the normalization prefactor contributes its own
/// expansion of `(1/8) log(1 + u)`.
pub fn resum(order: Order, psi_exponent: &GPoly) -> VariationalSeries {
    let n = order.value();
    let mut acc: std::collections::BTreeMap<(u32, u32, i32, i32), Rat> =
        std::collections::BTreeMap::new();
    let mut add = |key: (u32, u32, i32, i32), c: Rat| {
        use num_traits::Zero;
        let slot = acc.entry(key).or_insert_with(Rat::zero);
        *slot += c;
        if slot.is_zero() {
            acc.remove(&key);
        }
    };

    for (r, x_pow, c) in psi_exponent.terms() {
        if r > n {
            continue;
        }
        assert!(
            x_pow % 2 == 0,
            "exponent series monomials carry even x powers"
        );
        let j = x_pow / 2;
        let q_total = j as i32 - 3 * r as i32;
        // omega^q -> Omega^q (1 + g r)^(q/2), truncated at total order n
        // with g r counting as one coupling power; then (g r)^k = u^k.
        for k in 0..=(n - r) {
            let ck = c * binom_rat(Rat::new(q_total as i128, 2), k);
            // u^k = sum_i C(k, i) (omega^2/Omega^2)^i (-1)^(k-i).
            for i in 0..=k {
                let sign = if (k - i) % 2 == 0 {
                    rat(1, 1)
                } else {
                    rat(-1, 1)
                };
                let coeff = ck * binom_int(k, i) * sign;
                add((r, x_pow, q_total - 2 * i as i32, 2 * i as i32), coeff);
            }
        }
    }

    // (1/4) log omega = (1/4) log Omega + (1/8) log(1 + u); the log Omega
    // part stays implicit, the rest expands to polynomial terms.
    for k in 1..=n {
        let c = rat(1, 8) * rat(if k % 2 == 1 { 1 } else { -1 }, k as i128);
        for i in 0..=k {
            let sign = if (k - i) % 2 == 0 {
                rat(1, 1)
            } else {
                rat(-1, 1)
            };
            let coeff = c * binom_int(k, i) * sign;
            add((0, 0, -2 * (i as i32), 2 * i as i32), coeff);
        }
    }

    let terms = acc
        .into_iter()
        .map(
            |((g_pow, x_pow, trial_pow, omega_pow), coeff)| ResummedTerm {
                coeff,
                g_pow,
                x_pow,
                trial_pow,
                omega_pow,
            },
        )
        .collect();
    VariationalSeries { order, terms }
}

/// Exponent evaluator specialized to one position: the `x`, `g`,
/// `omega`, `hbar` and `M` factors of every term are folded into a flat
/// coefficient so that scanning many trial frequencies is cheap.
struct ExponentAt {
    /// `(coefficient, trial-frequency power)` pairs, like powers merged.
    coeffs: Vec<(f64, i32)>,
    /// Constant part of the log term: `(1/4) log(M / (hbar pi))`.
    log_const: f64,
}

impl ExponentAt {
    fn new(series: &VariationalSeries, params: &OscillatorParams, x: f64) -> Self {
        let mut by_power: std::collections::BTreeMap<i32, f64> = std::collections::BTreeMap::new();
        for t in &series.terms {
            let (h_pow, m_pow, w_full) = dim_exponents(t.g_pow, t.x_pow / 2);
            debug_assert_eq!(w_full, t.trial_pow + t.omega_pow);
            let c = rat_to_f64(t.coeff)
                * params.g.powi(t.g_pow as i32)
                * x.powi(t.x_pow as i32)
                * params.omega.powi(t.omega_pow)
                * params.hbar.powi(h_pow)
                * params.mass.powi(m_pow);
            *by_power.entry(t.trial_pow).or_insert(0.0) += c;
        }
        ExponentAt {
            coeffs: by_power.into_iter().map(|(p, c)| (c, p)).collect(),
            log_const: 0.25 * (params.mass / (params.hbar * std::f64::consts::PI)).ln(),
        }
    }

    /// Exponent and its first two trial-frequency derivatives.
    fn eval(&self, trial: f64) -> (f64, f64, f64) {
        let mut w = self.log_const + 0.25 * trial.ln();
        let mut dw = 0.25 / trial;
        let mut d2w = -0.25 / (trial * trial);
        for &(c, p) in &self.coeffs {
            let v = c * trial.powi(p);
            let pf = p as f64;
            w += v;
            dw += pf * v / trial;
            d2w += pf * (pf - 1.0) * v / (trial * trial);
        }
        (w, dw, d2w)
    }
}

/// The resummed exponent and its first two derivatives in the trial
/// frequency, at one position.  Natural inputs are the series, physical
/// parameters, position and a strictly positive trial frequency.
pub fn w_derivatives(
    series: &VariationalSeries,
    params: &OscillatorParams,
    x: f64,
    trial: f64,
) -> Result<(f64, f64, f64), VariationalError> {
    if trial <= 0.0 || !trial.is_finite() {
        return Err(VariationalError::NonPositiveTrialFrequency(trial));
    }
    Ok(ExponentAt::new(series, params, x).eval(trial))
}

/// Sign-change roots of `f` on a logarithmic grid over `[lo, hi]`,
/// bisected to relative width `rel_tol`.
fn scan_sign_changes(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, n: usize, rel_tol: f64) -> Vec<f64> {
    let n = n.max(2);
    let ratio = (hi / lo).ln() / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| lo * (ratio * i as f64).exp()).collect();
    let mut roots = Vec::new();
    let mut prev = (grid[0], f(grid[0]));
    for &t in &grid[1..] {
        let ft = f(t);
        if prev.1 == 0.0 {
            roots.push(prev.0);
        } else if ft != 0.0 && prev.1.signum() != ft.signum() {
            roots.push(bisect(f, prev.0, t, prev.1, rel_tol));
        }
        prev = (t, ft);
    }
    if prev.1 == 0.0 {
        roots.push(prev.0);
    }
    roots
}

fn bisect(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, fa: f64, rel_tol: f64) -> f64 {
    let sa = fa.signum();
    for _ in 0..200 {
        if (b - a) <= rel_tol * b {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Raw derivative scans at one position (no probing/promotion): the
/// stationary points and inflection points visible to a sign-change
/// scan inside the policy window.
pub fn scan_stationary(
    series: &VariationalSeries,
    params: &OscillatorParams,
    x: f64,
    policy: &SolverPolicy,
) -> StationaryScan {
    let at = ExponentAt::new(series, params, x);
    let dw = |o: f64| at.eval(o).1;
    let d2w = |o: f64| at.eval(o).2;
    StationaryScan {
        extrema: scan_sign_changes(
            &dw,
            policy.omega_min,
            policy.omega_max,
            policy.scan_points,
            policy.rel_tol,
        ),
        turning_points: scan_sign_changes(
            &d2w,
            policy.omega_min,
            policy.omega_max,
            policy.scan_points,
            policy.rel_tol,
        ),
    }
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    omega: f64,
    kind: RootKind,
}

fn nearly_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= ROOT_MERGE_REL * b.abs().max(1.0)
}

/// Candidate trial frequencies at one position: raw stationary roots,
/// augmented by the guards described in the module docs, then raw
/// inflection fallbacks; optionally restricted to one kind.
fn candidates(
    series: &VariationalSeries,
    params: &OscillatorParams,
    x: f64,
    lo: f64,
    hi: f64,
    policy: &SolverPolicy,
) -> Vec<Candidate> {
    let at = ExponentAt::new(series, params, x);
    let dw = |o: f64| at.eval(o).1;
    let d2w = |o: f64| at.eval(o).2;
    let mut ext = scan_sign_changes(&dw, lo, hi, policy.scan_points, policy.rel_tol);

    // Probe the original frequency: at vanishing coupling the stationary
    // point sits exactly there as a double root, which produces no sign
    // change.  Admit it when the derivative is zero at scan scale.
    let om0 = params.omega;
    if lo < om0 && om0 < hi {
        let (w0, dw0, _) = at.eval(om0);
        if dw0.abs() * om0 <= STATIONARY_PROBE_REL * (1.0 + w0.abs())
            && !ext.iter().any(|&e| nearly_equal(om0, e))
        {
            ext.push(om0);
        }
    }

    // Inflection scan with two guards: an inflection where the first
    // derivative also vanishes is a degenerate stationary point (promote
    // it); otherwise a stationary pair may have just split off nearby —
    // rescan a narrow neighborhood at fine resolution.
    let mut turning = Vec::new();
    for r in scan_sign_changes(&d2w, lo, hi, policy.scan_points, policy.rel_tol) {
        let (wr, dwr, _) = at.eval(r);
        if dwr.abs() * r <= STATIONARY_PROBE_REL * (1.0 + wr.abs()) {
            if !ext.iter().any(|&e| nearly_equal(r, e)) {
                ext.push(r);
            }
            continue;
        }
        for rr in scan_sign_changes(&dw, r * 0.95, r * 1.05, 64, policy.rel_tol) {
            if !ext.iter().any(|&e| nearly_equal(rr, e)) {
                ext.push(rr);
            }
        }
        turning.push(r);
    }

    ext.sort_by(f64::total_cmp);
    turning.sort_by(f64::total_cmp);
    let mut out: Vec<Candidate> = ext
        .into_iter()
        .map(|omega| Candidate {
            omega,
            kind: RootKind::Extremum,
        })
        .chain(turning.into_iter().map(|omega| Candidate {
            omega,
            kind: RootKind::TurningPoint,
        }))
        .collect();
    if let Some(kind) = policy.kind_filter {
        out.retain(|c| c.kind == kind);
    }
    out
}

fn validate_grid(xs: &[f64]) -> Result<(), VariationalError> {
    if xs.is_empty() {
        return Err(VariationalError::EmptyGrid);
    }
    for (i, &x) in xs.iter().enumerate() {
        let ok = x.is_finite() && x >= 0.0 && (i == 0 || x > xs[i - 1]);
        if !ok {
            return Err(VariationalError::InvalidGrid { index: i });
        }
    }
    Ok(())
}

/// Selects one trial frequency per grid position.
///
/// Candidates are gathered per position (in parallel — the per-position
/// scans are independent; the path selection below is inherently
/// sequential and cheap).  The search window widens automatically while
/// the seeded branch at the outermost position presses against its upper
/// edge.  A dynamic program over candidate indices then minimizes, in
/// lexicographic order: total variation of the frequency path, the
/// largest single jump, and the number of inflection fallbacks — seeded
/// at the outermost position on the branch requested by the policy.
pub fn solve_omega_profile(
    series: &VariationalSeries,
    params: &OscillatorParams,
    xs: &[f64],
    policy: &SolverPolicy,
) -> Result<OmegaProfile, VariationalError> {
    validate_grid(xs)?;
    let lo = policy.omega_min;
    let mut hi = policy.omega_max;
    let x_seed = *xs.last().expect("validated grid is non-empty");

    // Widen until the outermost position's largest candidate clears the
    // window edge (the physical branch grows with x, so the outermost
    // position is the binding one).
    loop {
        let cs = candidates(series, params, x_seed, lo, hi, policy);
        let Some(top) = cs
            .iter()
            .map(|c| c.omega)
            .fold(None, |m: Option<f64>, o| Some(m.map_or(o, |m| m.max(o))))
        else {
            return Err(VariationalError::NoStationaryPoint { x: x_seed });
        };
        if top < hi / 1.2 || hi >= WIDEN_CEILING {
            break;
        }
        hi *= 10.0;
    }

    let mut all: Vec<Vec<Candidate>> = xs
        .par_iter()
        .map(|&x| candidates(series, params, x, lo, hi, policy))
        .collect();
    if let Some(i) = all.iter().position(Vec::is_empty) {
        return Err(VariationalError::NoStationaryPoint { x: xs[i] });
    }

    // Seed: keep only the largest/smallest-frequency candidate at the
    // outermost position (preferring a stationary kind on exact ties).
    let n = xs.len();
    {
        let seed_omega = all[n - 1]
            .iter()
            .map(|c| c.omega)
            .fold(None::<f64>, |m, o| {
                Some(match (m, policy.seed) {
                    (None, _) => o,
                    (Some(m), SeedBranch::Largest) => m.max(o),
                    (Some(m), SeedBranch::Smallest) => m.min(o),
                })
            })
            .expect("non-empty candidate list");
        let mut seeded: Vec<Candidate> = all[n - 1]
            .iter()
            .copied()
            .filter(|c| (c.omega - seed_omega).abs() < 1e-12 * seed_omega.max(1.0))
            .collect();
        seeded.sort_by(|a, b| a.kind.rank().total_cmp(&b.kind.rank()));
        seeded.truncate(1);
        all[n - 1] = seeded;
    }

    // Dynamic program, right to left: cost of the best path from (i, j)
    // to the seed, as (total variation, largest jump, inflection count).
    let mut cost: Vec<Vec<Option<(f64, f64, f64)>>> =
        all.iter().map(|cs| vec![None; cs.len()]).collect();
    let mut back: Vec<Vec<usize>> = all.iter().map(|cs| vec![usize::MAX; cs.len()]).collect();
    cost[n - 1][0] = Some((0.0, 0.0, 0.0));
    for i in (0..n.saturating_sub(1)).rev() {
        for j in 0..all[i].len() {
            let cj = all[i][j];
            let mut best: Option<((f64, f64, f64), usize)> = None;
            for k in 0..all[i + 1].len() {
                let Some((c0, c1, c2)) = cost[i + 1][k] else {
                    continue;
                };
                let d = (cj.omega - all[i + 1][k].omega).abs();
                let key = (c0 + d, c1.max(d), c2 + cj.kind.rank());
                if best.is_none_or(|(b, _)| key < b) {
                    best = Some((key, k));
                }
            }
            if let Some((key, k)) = best {
                cost[i][j] = Some(key);
                back[i][j] = k;
            }
        }
    }

    // Start at the best-scoring first-position candidate and follow the
    // back pointers.
    let mut j = (0..all[0].len())
        .filter(|&j| cost[0][j].is_some())
        .min_by(|&a, &b| {
            let ka = (
                cost[0][a].expect("filtered"),
                all[0][a].kind.rank(),
                all[0][a].omega,
            );
            let kb = (
                cost[0][b].expect("filtered"),
                all[0][b].kind.rank(),
                all[0][b].omega,
            );
            ka.partial_cmp(&kb).expect("finite costs")
        })
        .ok_or(VariationalError::NoStationaryPoint { x: xs[0] })?;

    let mut omega = Vec::with_capacity(n);
    let mut kind = Vec::with_capacity(n);
    let mut branch_id = Vec::with_capacity(n);
    for i in 0..n {
        let c = all[i][j];
        omega.push(c.omega);
        kind.push(c.kind);
        branch_id.push(j);
        if i + 1 < n {
            j = back[i][j];
        }
    }
    Ok(OmegaProfile {
        xs: xs.to_vec(),
        omega,
        kind,
        branch_id,
    })
}

/// Evaluates the optimized wave function on the grid: solves the
/// frequency profile, evaluates the exponent on it, exponentiates and
/// normalizes.  A positive exponent beyond the overflow limit means the
/// selected branch does not describe a decaying state and is an error.
pub fn psi_variational(
    series: &VariationalSeries,
    params: &OscillatorParams,
    xs: &[f64],
    policy: &SolverPolicy,
) -> Result<(GridFunction, OmegaProfile), VariationalError> {
    let profile = solve_omega_profile(series, params, xs, policy)?;
    let psi = psi_on_profile(series, params, &profile)?;
    Ok((psi, profile))
}

/// Evaluates the wave function on an already-solved frequency profile.
pub fn psi_on_profile(
    series: &VariationalSeries,
    params: &OscillatorParams,
    profile: &OmegaProfile,
) -> Result<GridFunction, VariationalError> {
    let mut values = Vec::with_capacity(profile.xs.len());
    for (&x, &om) in profile.xs.iter().zip(&profile.omega) {
        let (w, _, _) = w_derivatives(series, params, x, om)?;
        if w > EXP_OVERFLOW_LIMIT || !w.is_finite() {
            return Err(VariationalError::AmplitudeOverflow { x, exponent: w });
        }
        values.push(w.exp());
    }
    let mut f = GridFunction::new(profile.xs.clone(), values)?;
    f.normalize()?;
    Ok(f)
}
