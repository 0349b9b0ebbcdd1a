//! The recursive contraction reduction against brute force: every
//! product `x(tau_1)^n x(tau_2)^m` up to eight total powers is expanded
//! by literally enumerating all leg assignments, and the reduction must
//! reproduce exactly the same canonical diagrams with the same
//! multiplicities.

mod common;

use common::{enumerate_pairings, sum_multiplicities};
use vpt_core::wick::wick_reduce;

#[test]
fn reduction_matches_exhaustive_enumeration_up_to_eight_powers() {
    for total in 0..=8u32 {
        for n in 0..=total {
            let m = total - n;
            let sum = if m == 0 {
                wick_reduce(&[(1, n)])
            } else {
                wick_reduce(&[(1, n), (2, m)])
            };
            let got = sum_multiplicities(&sum);
            let expected = enumerate_pairings(n, m);
            assert_eq!(got, expected, "contraction mismatch for powers ({n}, {m})");
        }
    }
}

/// The number of assignments of `k` legs (each crossed or paired) obeys
/// the involution recursion t(k) = t(k-1) + (k-1) t(k-2); the reduced
/// sums must carry exactly those totals however the legs are split
/// across vertices.
#[test]
fn multiplicity_totals_follow_the_involution_numbers() {
    let mut t = vec![1u64, 1];
    for k in 2..=8 {
        let v = t[k - 1] + (k as u64 - 1) * t[k - 2];
        t.push(v);
    }
    for total in 0..=8u32 {
        for n in 0..=total {
            let m = total - n;
            let sum = if m == 0 {
                wick_reduce(&[(1, n)])
            } else {
                wick_reduce(&[(1, n), (2, m)])
            };
            assert_eq!(
                sum.multiplicity_total(),
                t[total as usize],
                "involution total broken at powers ({n}, {m})"
            );
        }
    }
}
