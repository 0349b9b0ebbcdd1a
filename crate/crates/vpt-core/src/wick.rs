//! Reduction of Gaussian-averaged monomial products into sums of
//! contraction diagrams.
//!
//! A moment `<x^n(t_1) x^m(t_2)>` taken in a Gaussian measure with a
//! shifted mean decomposes into terms built from two kinds of factors:
//! the mean path evaluated at a vertex (`xcl[v]`) and the two-point
//! correlation between vertices (`G(v, w)`, including the equal-vertex
//! case `G(v, v)`).  Each distinct factor multiset appears with an
//! integer multiplicity counting the pairings that produce it.
//!
//! The reduction used here lowers one power at a time: with `n >= 1`
//! powers left at vertex `v`,
//!
//! ```text
//! <x^n(v) ...> = xcl[v] <x^(n-1)(v) ...>
//!              + (n - 1) G(v, v) <x^(n-2)(v) ...>
//!              + sum_w m_w G(v, w) <x^(n-1)(v) x^(m_w - 1)(w) ...>
//! ```
//!
//! Terms are merged under the symmetry that relabels vertices (exchanging
//! the two time arguments does not change which diagram a term is), so a
//! term like `xcl[1]^3 xcl[2] G(1,1) G(1,2)` and its mirror image count
//! once with a combined multiplicity.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::units::Order;

/// Index identifying one time argument (vertex) of a moment.
pub type Vertex = usize;

/// Merge key for canonically equal diagrams: the sorted cross and edge
/// factor lists, without multiplicity.
type Signature = (Vec<(Vertex, u32)>, Vec<((Vertex, Vertex), u32)>);

/// Internal errors of the diagram algebra.
///
/// These conditions cannot arise from any valid input; surfacing them as
/// errors (instead of clamping or ignoring) turns a future logic bug into
/// a loud failure.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum WickError {
    #[error(
        "disconnected-part subtraction drove a multiplicity negative on `{term}` \
         (got {multiplicity}); the moment algebra is inconsistent"
    )]
    NegativeMultiplicity { term: String, multiplicity: i128 },
    #[error(
        "term `{term}` survived disconnected-part subtraction without any \
         cross-vertex correlation factor"
    )]
    DisconnectedResidue { term: String },
}

/// One contraction diagram: a multiset of factors with an integer count
/// of the pairings producing it.
///
/// Vertex labels inside a [`WickSum`] are always the canonical
/// `0..vertex_count`, and the factor content is stored in the
/// lexicographically least relabeling, so equal diagrams compare equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DiagramTerm {
    /// Mean-path factors: vertex -> power of `xcl[vertex]`.
    crosses: BTreeMap<Vertex, u32>,
    /// Correlation factors: `(v, w)` with `v <= w` -> power of `G(v, w)`.
    edges: BTreeMap<(Vertex, Vertex), u32>,
    /// Number of pairings mapping to this factor multiset.
    multiplicity: u64,
}

impl DiagramTerm {
    /// Pairing count for this diagram.
    pub fn multiplicity(&self) -> u64 {
        self.multiplicity
    }

    /// Mean-path powers per vertex (canonical labels).
    pub fn crosses(&self) -> &BTreeMap<Vertex, u32> {
        &self.crosses
    }

    /// Correlation powers per unordered vertex pair (canonical labels).
    pub fn edges(&self) -> &BTreeMap<(Vertex, Vertex), u32> {
        &self.edges
    }

    /// True if any correlation factor joins two distinct vertices.
    pub fn has_cross_edge(&self) -> bool {
        self.edges.keys().any(|&(v, w)| v != w)
    }

    /// Total number of original field powers this term accounts for
    /// (each cross is one power, each correlation two).
    pub fn degree(&self) -> u32 {
        let cross: u32 = self.crosses.values().sum();
        let paired: u32 = self.edges.values().sum();
        cross + 2 * paired
    }

    /// Factor content rendered as `xcl[v]^a * G(v,w)^b * ...` with
    /// one-based vertex labels and unit powers left implicit.
    pub fn factors_string(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (&v, &p) in &self.crosses {
            parts.push(powered(&format!("xcl[{}]", v + 1), p));
        }
        for (&(v, w), &p) in &self.edges {
            parts.push(powered(&format!("G({},{})", v + 1, w + 1), p));
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(" * ")
        }
    }

    /// The content signature without multiplicity, used as a merge key.
    fn signature(&self) -> Signature {
        (
            self.crosses.iter().map(|(&v, &p)| (v, p)).collect(),
            self.edges.iter().map(|(&e, &p)| (e, p)).collect(),
        )
    }

    /// Rebuilds the term with vertices renamed through `perm`
    /// (`new_label = perm[old_label]`).
    fn relabeled(&self, perm: &[Vertex]) -> DiagramTerm {
        let crosses = self.crosses.iter().map(|(&v, &p)| (perm[v], p)).collect();
        let edges = self
            .edges
            .iter()
            .map(|(&(v, w), &p)| {
                let (a, b) = (perm[v], perm[w]);
                ((a.min(b), a.max(b)), p)
            })
            .collect();
        DiagramTerm {
            crosses,
            edges,
            multiplicity: self.multiplicity,
        }
    }

    /// The lexicographically least relabeling over all permutations of
    /// `0..vertex_count`: the canonical representative of the diagram's
    /// exchange-symmetry class.
    fn canonical(&self, vertex_count: usize) -> DiagramTerm {
        let mut best: Option<DiagramTerm> = None;
        for perm in permutations(vertex_count) {
            let candidate = self.relabeled(&perm);
            if best
                .as_ref()
                .map(|b| candidate.signature() < b.signature())
                .unwrap_or(true)
            {
                best = Some(candidate);
            }
        }
        best.expect("at least the identity permutation exists")
    }
}

fn powered(base: &str, p: u32) -> String {
    if p == 1 {
        base.to_string()
    } else {
        format!("{base}^{p}")
    }
}

/// All permutations of `0..n` (n is at most the number of time arguments
/// of a moment, i.e. tiny).
fn permutations(n: usize) -> Vec<Vec<Vertex>> {
    let mut out = Vec::new();
    let mut items: Vec<Vertex> = (0..n).collect();
    permute_into(&mut items, 0, &mut out);
    out
}

fn permute_into(items: &mut Vec<Vertex>, k: usize, out: &mut Vec<Vec<Vertex>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute_into(items, k + 1, out);
        items.swap(k, i);
    }
}

/// A finished reduction: canonical diagrams with multiplicities, sorted
/// by factor content.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WickSum {
    terms: Vec<DiagramTerm>,
    vertex_count: usize,
}

impl WickSum {
    /// The diagrams, in canonical order.
    pub fn terms(&self) -> &[DiagramTerm] {
        &self.terms
    }

    /// Number of distinct time arguments the diagrams refer to.
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Sum of all multiplicities; for a moment with `N` total powers this
    /// equals `sum_k C(N, 2k) (2k - 1)!!` (choose which powers pair, then
    /// pair them).
    pub fn multiplicity_total(&self) -> u64 {
        self.terms.iter().map(|t| t.multiplicity).sum()
    }

    /// Line-oriented rendering, one diagram per line:
    /// `multiplicity * factors`.
    pub fn to_lines(&self) -> String {
        let mut s = String::new();
        for t in &self.terms {
            let _ = writeln!(s, "{} * {}", t.multiplicity, t.factors_string());
        }
        s
    }

    /// Merges canonically equal terms from an iterator of (possibly
    /// signed) contributions; fails on a negative net multiplicity.
    fn collect(
        contributions: impl IntoIterator<Item = (DiagramTerm, i128)>,
        vertex_count: usize,
    ) -> Result<WickSum, WickError> {
        let mut acc: BTreeMap<Signature, (DiagramTerm, i128)> = BTreeMap::new();
        for (term, signed_mult) in contributions {
            let canon = term.canonical(vertex_count);
            let key = canon.signature();
            let entry = acc.entry(key).or_insert((canon, 0));
            entry.1 += signed_mult;
        }
        let mut terms = Vec::new();
        for (_, (mut term, mult)) in acc {
            if mult == 0 {
                continue;
            }
            if mult < 0 {
                return Err(WickError::NegativeMultiplicity {
                    term: term.factors_string(),
                    multiplicity: mult,
                });
            }
            term.multiplicity = mult as u64;
            terms.push(term);
        }
        Ok(WickSum {
            terms,
            vertex_count,
        })
    }

    /// Product of two independent reductions: the factor multisets merge,
    /// with the right-hand vertices shifted past the left-hand ones.
    /// Models `<A><B>` as a formal sum over the union of vertices.
    pub fn product(&self, other: &WickSum) -> WickSum {
        let shift = self.vertex_count;
        let k = self.vertex_count + other.vertex_count;
        let mut contributions = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                let mut crosses = a.crosses.clone();
                for (&v, &p) in &b.crosses {
                    *crosses.entry(v + shift).or_insert(0) += p;
                }
                let mut edges = a.edges.clone();
                for (&(v, w), &p) in &b.edges {
                    *edges.entry((v + shift, w + shift)).or_insert(0) += p;
                }
                let mult = (a.multiplicity as i128) * (b.multiplicity as i128);
                contributions.push((
                    DiagramTerm {
                        crosses,
                        edges,
                        multiplicity: 0,
                    },
                    mult,
                ));
            }
        }
        WickSum::collect(contributions, k).expect("products of non-negative multiplicities")
    }

    /// `self - other` term by term (canonical matching); a negative
    /// residual multiplicity is an algebra bug and is reported as one.
    pub fn subtract(&self, other: &WickSum) -> Result<WickSum, WickError> {
        debug_assert_eq!(self.vertex_count, other.vertex_count);
        let k = self.vertex_count;
        let contributions = self
            .terms
            .iter()
            .map(|t| (t.clone(), t.multiplicity as i128))
            .chain(
                other
                    .terms
                    .iter()
                    .map(|t| (t.clone(), -(t.multiplicity as i128))),
            )
            .collect::<Vec<_>>();
        WickSum::collect(contributions, k)
    }
}

/// Reduces the moment with the given powers per vertex into canonical
/// diagrams.  Duplicate vertex indices are merged by summing exponents;
/// the vertex labels of the result are `0..k` in order of first
/// appearance.
pub fn wick_reduce(exponents: &[(Vertex, u32)]) -> WickSum {
    // Relabel input vertices densely, preserving first-appearance order.
    let mut labels: Vec<Vertex> = Vec::new();
    let mut powers: Vec<u32> = Vec::new();
    for &(v, p) in exponents {
        match labels.iter().position(|&l| l == v) {
            Some(i) => powers[i] += p,
            None => {
                labels.push(v);
                powers.push(p);
            }
        }
    }
    let k = labels.len();
    let mut contributions = Vec::new();
    let mut scratch = DiagramTerm {
        crosses: BTreeMap::new(),
        edges: BTreeMap::new(),
        multiplicity: 0,
    };
    reduce_rec(&mut powers.clone(), 1, &mut scratch, &mut contributions);
    WickSum::collect(contributions, k.max(1)).expect("reduction multiplicities are positive")
}

/// Depth-first application of the single-power lowering identity.
fn reduce_rec(
    powers: &mut [u32],
    mult: u64,
    partial: &mut DiagramTerm,
    out: &mut Vec<(DiagramTerm, i128)>,
) {
    let Some(v) = powers.iter().position(|&p| p > 0) else {
        let mut done = partial.clone();
        done.multiplicity = mult;
        out.push((done, mult as i128));
        return;
    };
    let n = powers[v];

    // Mean-path branch: one power becomes xcl[v].
    powers[v] = n - 1;
    *partial.crosses.entry(v).or_insert(0) += 1;
    reduce_rec(powers, mult, partial, out);
    decrement(&mut partial.crosses, v);
    powers[v] = n;

    // Equal-vertex pairing: n - 1 partners among the remaining powers.
    if n >= 2 {
        powers[v] = n - 2;
        *partial.edges.entry((v, v)).or_insert(0) += 1;
        reduce_rec(powers, mult * (n - 1) as u64, partial, out);
        decrement(&mut partial.edges, (v, v));
        powers[v] = n;
    }

    // Cross pairings: m ways to pick the partner power at vertex w.
    for w in (v + 1)..powers.len() {
        let m = powers[w];
        if m == 0 {
            continue;
        }
        powers[v] = n - 1;
        powers[w] = m - 1;
        *partial.edges.entry((v, w)).or_insert(0) += 1;
        reduce_rec(powers, mult * m as u64, partial, out);
        decrement(&mut partial.edges, (v, w));
        powers[v] = n;
        powers[w] = m;
    }
}

fn decrement<K: Ord + Copy>(map: &mut BTreeMap<K, u32>, key: K) {
    let p = map.get_mut(&key).expect("key was just inserted");
    *p -= 1;
    if *p == 0 {
        map.remove(&key);
    }
}

/// The diagrams entering the wave-function exponent at the given order of
/// the coupling.
///
/// * Order 1: all contractions of a single `x^4` vertex.
/// * Order 2: contractions of `x^4(t_1) x^4(t_2)` with the product of two
///   independent single-vertex reductions removed — only terms containing
///   at least one cross-vertex correlation survive, and the subtraction
///   must cancel the disconnected part exactly.
pub fn connected_w_terms(order: Order) -> Result<WickSum, WickError> {
    match order {
        Order::First => Ok(wick_reduce(&[(0, 4)])),
        Order::Second => {
            let pair = wick_reduce(&[(0, 4), (1, 4)]);
            let single = wick_reduce(&[(0, 4)]);
            let disconnected = single.product(&single);
            let connected = pair.subtract(&disconnected)?;
            for term in connected.terms() {
                if !term.has_cross_edge() {
                    return Err(WickError::DisconnectedResidue {
                        term: term.factors_string(),
                    });
                }
            }
            Ok(connected)
        }
    }
}
