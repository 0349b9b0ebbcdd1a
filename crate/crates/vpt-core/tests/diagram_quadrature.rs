//! The exact-rational diagram integrals against blind numerical
//! quadrature: every diagram feeding the low-temperature exponent —
//! the three single-vertex contractions and the eight connected
//! two-vertex ones — is integrated numerically at three long intervals,
//! fitted to `constant + slope * B`, and compared with the symbolic
//! result at unit endpoint position.

mod common;

use common::{diagram_integral_numeric, fit_linear_in_b};
use vpt_core::lowtemp::{integrate_diagram, LowTempError};
use vpt_core::units::Order;
use vpt_core::wick::{connected_w_terms, wick_reduce};

fn check_terms<'a>(
    terms: impl IntoIterator<Item = &'a vpt_core::wick::DiagramTerm>,
    vertex_count: usize,
) {
    for term in terms {
        let symbolic = integrate_diagram(term, vertex_count)
            .unwrap_or_else(|e| panic!("diagram {} failed: {e}", term.factors_string()));
        // The symbolic value carries the combinatorial multiplicity; the
        // quadrature integrates the bare factor product.
        let values: Vec<f64> = [20.0, 30.0, 40.0]
            .iter()
            .map(|&b| term.multiplicity() as f64 * diagram_integral_numeric(term, vertex_count, b))
            .collect();
        let (intercept, slope) = fit_linear_in_b(values[0], values[1], values[2]);

        let want_const = symbolic.constant.eval_f64(1.0);
        let want_slope = symbolic.beta_linear.eval_f64(1.0);
        let scale = want_const.abs().max(want_slope.abs()).max(1e-12);
        assert!(
            (intercept - want_const).abs() <= 1e-6 * scale,
            "{}: constant {want_const} vs quadrature {intercept}",
            term.factors_string()
        );
        assert!(
            (slope - want_slope).abs() <= 1e-6 * scale,
            "{}: slope {want_slope} vs quadrature {slope}",
            term.factors_string()
        );
    }
}

#[test]
fn first_order_diagrams_match_quadrature() {
    let sum = connected_w_terms(Order::First).unwrap();
    check_terms(sum.terms(), sum.vertex_count());
}

#[test]
fn second_order_connected_diagrams_match_quadrature() {
    let connected = connected_w_terms(Order::Second).unwrap();
    assert_eq!(connected.terms().len(), 8);
    check_terms(connected.terms(), connected.vertex_count());
}

/// The raw two-vertex reduction splits into the eight connected diagrams
/// (which must reproduce the curated connected sum exactly) and six
/// disconnected products.  A disconnected product factorizes into two
/// single-vertex integrals: when both factors are extensive (pure
/// correlation loops) the product grows like B^2 and the integrator must
/// refuse it — only the cumulant subtraction is allowed to cancel that
/// growth — while products with a localized mean-path factor stay linear
/// and must pass the same quadrature check as the connected ones.
#[test]
fn full_two_vertex_reduction_splits_into_connected_and_disconnected() {
    let full = wick_reduce(&[(1, 4), (2, 4)]);
    assert_eq!(full.terms().len(), 14);

    let (connected, disconnected): (Vec<_>, Vec<_>) =
        full.terms().iter().partition(|term| term.has_cross_edge());
    assert_eq!(connected.len(), 8);
    assert_eq!(disconnected.len(), 6);

    let curated = connected_w_terms(Order::Second).unwrap();
    for (raw, kept) in connected.iter().zip(curated.terms()) {
        assert_eq!(raw.crosses(), kept.crosses(), "{}", raw.factors_string());
        assert_eq!(raw.edges(), kept.edges(), "{}", raw.factors_string());
        assert_eq!(
            raw.multiplicity(),
            kept.multiplicity(),
            "{}",
            raw.factors_string()
        );
    }

    let mut refused = Vec::new();
    let mut linear = Vec::new();
    for term in disconnected {
        match integrate_diagram(term, full.vertex_count()) {
            Err(LowTempError::SuperlinearGrowth { power: 2, .. }) => {
                refused.push(term.factors_string())
            }
            Ok(_) => linear.push(term),
            Err(other) => panic!("disconnected {}: {other}", term.factors_string()),
        }
    }
    // Exactly one product pairs two extensive loop factors.
    assert_eq!(refused, ["G(1,1)^2 * G(2,2)^2"]);
    check_terms(linear, full.vertex_count());
}
