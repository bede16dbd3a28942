//! Property tests for the algebraic invariants: exact inversion round trips,
//! the two summation conventions for inverse entries, locality of inverse
//! entries, multiplicativity of the symmetric embedding, normal-form
//! soundness of the operator bracket, and budget monotonicity of the series.

use num::BigRational;
use proptest::prelude::*;
use trimod::matrix::{RatMatrix, UniMatrix};
use trimod::poly::Poly;
use trimod::series::{s_left, s_right, TruncationBudget};
use trimod::weights::WeightConfig;
use trimod::weyl::WeylOp;
use trimod::IndexWindow;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn arb_rational() -> impl Strategy<Value = BigRational> {
    (-9i64..=9, 1i64..=9).prop_map(|(n, d)| rat(n, d))
}

/// Sparse rational matrix on the window, entries present with probability
/// about one half.
fn arb_matrix(window: IndexWindow) -> impl Strategy<Value = RatMatrix> {
    let pairs = window.pairs();
    proptest::collection::vec(proptest::option::of(arb_rational()), pairs.len()).prop_map(
        move |entries| {
            let mut m = RatMatrix::identity(window);
            for (&(k, n), v) in pairs.iter().zip(entries) {
                if let Some(v) = v {
                    m.set(k, n, v);
                }
            }
            m
        },
    )
}

fn arb_poly(window: IndexWindow, terms: usize, degree: usize) -> impl Strategy<Value = Poly> {
    let pairs = window.pairs();
    let len = pairs.len();
    proptest::collection::vec(
        (
            arb_rational(),
            proptest::collection::vec(0..len, 0..=degree),
        ),
        1..=terms,
    )
    .prop_map(move |raw| {
        let mut p = Poly::zero();
        for (c, vars) in raw {
            let mut term = Poly::constant(c);
            for vi in vars {
                let (k, n) = pairs[vi];
                term = term * Poly::var(k, n);
            }
            p = p + term;
        }
        p
    })
}

fn arb_weyl(window: IndexWindow) -> impl Strategy<Value = WeylOp> {
    let pairs = window.pairs();
    let len = pairs.len();
    (
        arb_poly(window, 3, 3),
        proptest::collection::vec((0..len, arb_poly(window, 2, 2)), 0..=2),
    )
        .prop_map(move |(scalar, derivs)| {
            let mut op = WeylOp::mult(window, scalar);
            for (vi, coeff) in derivs {
                let d = WeylOp::derivation(window, pairs[vi]);
                op = op.add(&d.left_mul(&coeff));
            }
            op
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inversion_round_trips_exactly(x in arb_matrix(IndexWindow::new(0, 8).unwrap())) {
        let inv = x.invert_recursive();
        prop_assert!(x.multiply(&inv).unwrap().is_identity());
        prop_assert!(inv.multiply(&x).unwrap().is_identity());
        prop_assert_eq!(x.invert_explicit(), inv);
    }

    #[test]
    fn both_inverse_sum_conventions_agree(x in arb_matrix(IndexWindow::new(-3, 3).unwrap())) {
        let w = x.window();
        let inv = x.invert_recursive();
        for (k, n) in w.pairs() {
            let mut right = BigRational::from_integer(0.into());
            for r in (k + 1)..=n {
                right -= x.get(k, r) * inv.full_entry(r, n);
            }
            let mut left = BigRational::from_integer(0.into());
            for r in k..n {
                left -= inv.full_entry(k, r) * x.get(r, n);
            }
            prop_assert_eq!(&right, &left);
            prop_assert_eq!(right, inv.get(k, n));
        }
    }

    #[test]
    fn inverse_entries_are_local(x in arb_matrix(IndexWindow::new(-2, 3).unwrap())) {
        // x_kn^{-1} depends only on the entries of the [k, n] block.
        let w = x.window();
        let inv = x.invert_recursive();
        for (k, n) in w.pairs() {
            let mut trimmed = RatMatrix::identity(w);
            for (&(a, b), v) in x.entries() {
                if k <= a && b <= n {
                    trimmed.set(a, b, v.clone());
                }
            }
            prop_assert_eq!(trimmed.invert_recursive().get(k, n), inv.get(k, n));
        }
    }

    #[test]
    fn embedding_is_multiplicative(
        a in arb_matrix(IndexWindow::new(0, 3).unwrap()),
        b in arb_matrix(IndexWindow::new(0, 3).unwrap()),
    ) {
        let big = IndexWindow::new(-1, 4).unwrap();
        let ea = a.embed_symmetric(big).unwrap();
        let eb = b.embed_symmetric(big).unwrap();
        prop_assert_eq!(
            a.multiply(&b).unwrap().embed_symmetric(big).unwrap(),
            ea.multiply(&eb).unwrap()
        );
    }

    #[test]
    fn bracket_matches_the_action(
        a in arb_weyl(IndexWindow::new(0, 3).unwrap()),
        b in arb_weyl(IndexWindow::new(0, 3).unwrap()),
        f in arb_poly(IndexWindow::new(0, 3).unwrap(), 3, 4),
    ) {
        let via_bracket = a.commutator(&b).apply(&f);
        let direct = a.apply(&b.apply(&f)) - b.apply(&a.apply(&f));
        prop_assert_eq!(via_bracket, direct);
    }

    #[test]
    fn series_partial_sums_grow_with_budget(
        s in 1.1f64..4.0,
        k in -3i32..=2,
        gap in 1i32..=3,
        r1 in 4u32..=16,
        r2 in 17u32..=48,
    ) {
        let cfg = WeightConfig::geometric(s).unwrap();
        let n = k + gap;
        let small = TruncationBudget { radius: r1, max_terms: 10_000, target_tail: 0.0 };
        let large = TruncationBudget { radius: r2, max_terms: 10_000, target_tail: 0.0 };
        // The mathematical partial sums are nondecreasing in the budget; the
        // certified lower bounds track them to within accumulated rounding.
        let monotone = |lo_small: f64, lo_large: f64| {
            lo_large >= lo_small - 1e-12 * lo_small.abs().max(1e-300)
        };
        let a = s_right(&cfg, k, n, &small).unwrap();
        let b = s_right(&cfg, k, n, &large).unwrap();
        prop_assert!(monotone(a.partial_sum(), b.partial_sum()));
        // Both enclosures contain the closed-form value.
        let d = gap;
        let q = s.powi(-d);
        let closed = q.powi(1 - k) / (1.0 - q);
        prop_assert!(a.contains(closed) && b.contains(closed));
        let a = s_left(&cfg, k, n, &small).unwrap();
        let b = s_left(&cfg, k, n, &large).unwrap();
        prop_assert!(monotone(a.partial_sum(), b.partial_sum()));
        let closed = q.powi(n + 1) / (1.0 - q);
        prop_assert!(a.contains(closed) && b.contains(closed));
    }

    #[test]
    fn matrix_json_round_trip(x in arb_matrix(IndexWindow::new(-2, 2).unwrap())) {
        let json = trimod::matrix::MatrixJson::from(&x);
        let text = serde_json::to_string(&json).unwrap();
        let back: trimod::matrix::MatrixJson = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.to_rational().unwrap(), x);
    }
}

#[test]
fn unimatrix_is_generic_over_polynomials() {
    // The coordinate matrix inverts to the inverse-coordinate polynomials;
    // spot check the generic machinery from outside the crate.
    let w = IndexWindow::new(0, 3).unwrap();
    let mut m: UniMatrix<Poly> = UniMatrix::identity(w);
    for (k, n) in w.pairs() {
        m.set(k, n, Poly::var(k, n));
    }
    let inv = m.invert_recursive();
    assert!(m.multiply(&inv).unwrap().is_identity());
    assert_eq!(inv.get(0, 3), trimod::weyl::inverse_coordinate(w, 0, 3));
}
