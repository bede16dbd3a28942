//! Exact-zero verification sweeps for the commutator lemmas used by the
//! modular-theory computation: `[D_pq, x_kn^{-1}]`, the four-case bracket
//! `[A^R_pq, w_kn]`, the window-truncated `[A^R_pq, ln Delta]`, the `A^L`
//! brackets with coordinates and inverse coordinates, and the nested double
//! and triple commutators that isolate single coordinates.
//!
//! Every check subtracts a closed-form right side from an engine-computed
//! commutator and reports the residual polynomial verbatim; a sweep passes
//! only when every residual is the zero polynomial.

use crate::error::Result;
use crate::poly::{rat_int, Poly};
use crate::weights::RationalWeights;
use crate::weyl::{
    a_left, a_right, d_op, inverse_coordinate, inverse_full_entry, neg_log_delta, w_poly, WeylOp,
};
use crate::window::IndexWindow;
use rayon::prelude::*;
use serde::Serialize;
use std::ops::Neg;

#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum TupleStatus {
    ExactZero,
    Residual { residual_poly: String },
    Skipped { reason: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct TupleCheck {
    pub label: String,
    pub indices: Vec<i32>,
    #[serde(flatten)]
    pub status: TupleStatus,
}

impl TupleCheck {
    fn residual(label: String, indices: Vec<i32>, residual: Poly) -> Self {
        let status = if residual.is_zero() {
            TupleStatus::ExactZero
        } else {
            TupleStatus::Residual {
                residual_poly: residual.to_string(),
            }
        };
        TupleCheck {
            label,
            indices,
            status,
        }
    }

    fn requirement(label: String, indices: Vec<i32>, ok: bool, why: &str) -> Self {
        let status = if ok {
            TupleStatus::ExactZero
        } else {
            TupleStatus::Residual {
                residual_poly: why.to_string(),
            }
        };
        TupleCheck {
            label,
            indices,
            status,
        }
    }
}

/// Outcome of one identity sweep over a window.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub name: String,
    pub window: IndexWindow,
    pub checks: Vec<TupleCheck>,
}

impl IdentityReport {
    pub fn all_exact(&self) -> bool {
        self.checks.iter().all(|c| {
            matches!(
                c.status,
                TupleStatus::ExactZero | TupleStatus::Skipped { .. }
            )
        })
    }

    pub fn residuals(&self) -> impl Iterator<Item = &TupleCheck> {
        self.checks
            .iter()
            .filter(|c| matches!(c.status, TupleStatus::Residual { .. }))
    }

    pub fn checked_count(&self) -> usize {
        self.checks
            .iter()
            .filter(|c| !matches!(c.status, TupleStatus::Skipped { .. }))
            .count()
    }
}

/// `[D_pq, x_kn^{-1}] = -(X^{-1})_{kp} (X^{-1})_{qn}` for `k <= p < q <= n`
/// and `0` otherwise, sweeping every `(p,q) x (k,n)` combination on the
/// window. The right side uses full inverse-matrix entries, so the diagonal
/// convention `(X^{-1})_{kk} = 1` supplies the delta terms.
pub fn verify_lemma_d_inverse(window: IndexWindow) -> IdentityReport {
    let weights = RationalWeights::ones(window);
    let checks: Vec<TupleCheck> = window
        .pairs()
        .par_iter()
        .flat_map_iter(|&(p, q)| {
            let d = d_op(&weights, p, q);
            let mut local = Vec::new();
            for (k, n) in window.pairs() {
                let lhs = d.commutator(&WeylOp::mult(window, inverse_coordinate(window, k, n)));
                let rhs = if k <= p && q <= n {
                    (&inverse_full_entry(window, k, p) * &inverse_full_entry(window, q, n)).neg()
                } else {
                    Poly::zero()
                };
                local.push(TupleCheck::requirement(
                    format!("[D_{p},{q}, xinv_{k},{n}] is a multiplication"),
                    vec![p, q, k, n],
                    lhs.is_multiplication(),
                    "derivation terms survived",
                ));
                local.push(TupleCheck::residual(
                    format!("[D_{p},{q}, xinv_{k},{n}]"),
                    vec![p, q, k, n],
                    lhs.scalar_part() - &rhs,
                ));
            }
            local
        })
        .collect();
    IdentityReport {
        name: "d_inverse".into(),
        window,
        checks,
    }
}

/// Four-case table for `[A^R_pq, w_kn]`:
/// `2 x_kp x_kq` when `n = q, k < p`; `2 x_pn^{-1} x_qn^{-1}` when
/// `k = p, n > q`; `2 (x_pq + x_pq^{-1})` when `(k,n) = (p,q)`; else zero.
/// Follows with the window truncation of `-[A^R_pq, ln Delta]`, including the
/// `b_pq` weight on its last term, and requires every bracket to be a pure
/// multiplication operator.
pub fn verify_bracket_ar_w(weights: &RationalWeights) -> IdentityReport {
    let window = weights.window();
    let two = rat_int(2);
    let log_delta = neg_log_delta(weights);
    let checks: Vec<TupleCheck> = window
        .pairs()
        .par_iter()
        .flat_map_iter(|&(p, q)| {
            let ar = a_right(weights, p, q);
            let mut local = Vec::new();
            for (k, n) in window.pairs() {
                let lhs = ar.commutator(&WeylOp::mult(window, w_poly(window, k, n)));
                let rhs = if k == p && n == q {
                    (&Poly::var(p, q) + &inverse_coordinate(window, p, q)).scale(&two)
                } else if n == q && k < p {
                    (&Poly::var(k, p) * &Poly::var(k, q)).scale(&two)
                } else if k == p && n > q {
                    (&inverse_coordinate(window, p, n) * &inverse_coordinate(window, q, n))
                        .scale(&two)
                } else {
                    Poly::zero()
                };
                local.push(TupleCheck::requirement(
                    format!("[AR_{p},{q}, w_{k},{n}] is a multiplication"),
                    vec![p, q, k, n],
                    lhs.is_multiplication(),
                    "derivation terms survived",
                ));
                local.push(TupleCheck::residual(
                    format!("[AR_{p},{q}, w_{k},{n}]"),
                    vec![p, q, k, n],
                    lhs.scalar_part() - &rhs,
                ));
            }

            // -[A^R_pq, ln Delta] with the window-truncated sums.
            let bracket = ar.commutator(&WeylOp::mult(window, log_delta.clone()));
            let mut rhs = (&Poly::var(p, q) + &inverse_coordinate(window, p, q))
                .scale(&(&two * &weights.get(p, q)));
            for r in window.lo..p {
                rhs = &rhs
                    + &(&Poly::var(r, p) * &Poly::var(r, q)).scale(&(&two * &weights.get(r, q)));
            }
            for n in (q + 1)..=window.hi {
                rhs = &rhs
                    + &(&inverse_coordinate(window, p, n) * &inverse_coordinate(window, q, n))
                        .scale(&(&two * &weights.get(p, n)));
            }
            local.push(TupleCheck::requirement(
                format!("[AR_{p},{q}, lnDelta] is a multiplication"),
                vec![p, q],
                bracket.is_multiplication(),
                "derivation terms survived",
            ));
            local.push(TupleCheck::residual(
                format!("-[AR_{p},{q}, lnDelta]"),
                vec![p, q],
                bracket.scalar_part() - &rhs,
            ));
            local
        })
        .collect();
    IdentityReport {
        name: "ar_w".into(),
        window,
        checks,
    }
}

/// Brackets of the left generators with coordinates and inverse coordinates:
///
/// * `[A^L_ij, x_kn]      = -delta_ki (x_jn + delta_jn)`
/// * `[A^L_ij, x_kn^{-1}] = +delta_jn (X^{-1})_{ki}`
///
/// With `A^L` the genuine derivative of the left translation both hold
/// exactly; the printed form of the second carries the opposite sign.
pub fn verify_al_brackets(window: IndexWindow) -> IdentityReport {
    let weights = RationalWeights::ones(window);
    let checks: Vec<TupleCheck> = window
        .pairs()
        .par_iter()
        .flat_map_iter(|&(i, j)| {
            let al = a_left(&weights, i, j);
            let mut local = Vec::new();
            for (k, n) in window.pairs() {
                let lhs = al.commutator(&WeylOp::mult(window, Poly::var(k, n)));
                let rhs = if k == i {
                    if j < n {
                        Poly::var(j, n).neg()
                    } else if j == n {
                        Poly::one().neg()
                    } else {
                        Poly::zero()
                    }
                } else {
                    Poly::zero()
                };
                local.push(TupleCheck::residual(
                    format!("[AL_{i},{j}, x_{k},{n}]"),
                    vec![i, j, k, n],
                    lhs.scalar_part() - &rhs,
                ));

                let lhs = al.commutator(&WeylOp::mult(window, inverse_coordinate(window, k, n)));
                let rhs = if n == j {
                    inverse_full_entry(window, k, i)
                } else {
                    Poly::zero()
                };
                local.push(TupleCheck::residual(
                    format!("[AL_{i},{j}, xinv_{k},{n}]"),
                    vec![i, j, k, n],
                    lhs.scalar_part() - &rhs,
                ));
            }
            local
        })
        .collect();
    IdentityReport {
        name: "al_brackets".into(),
        window,
        checks,
    }
}

/// The nested commutators for one admissible tuple `i < p < j < q`:
/// returns `([A^L_ij, [A^R_pq, lnDelta]], [A^L_ip, [A^L_ij, [A^R_pq, lnDelta]]])`.
pub fn nested_commutators(
    weights: &RationalWeights,
    i: i32,
    p: i32,
    j: i32,
    q: i32,
) -> Result<(Poly, Poly)> {
    let window = weights.window();
    for idx in [i, p, j, q] {
        if !window.contains_index(idx) {
            return Err(crate::error::Error::IndexOutOfWindow {
                k: idx,
                n: idx,
                window,
            });
        }
    }
    assert!(i < p && p < j && j < q, "need i < p < j < q");
    let ln_delta = WeylOp::mult(window, neg_log_delta(weights).neg());
    let inner = a_right(weights, p, q).commutator(&ln_delta);
    let double = a_left(weights, i, j).commutator(&inner);
    let triple = a_left(weights, i, p).commutator(&double);
    assert!(double.is_multiplication() && triple.is_multiplication());
    Ok((double.scalar_part().clone(), triple.scalar_part().clone()))
}

/// Sweep of the double and triple commutators over every admissible tuple:
///
/// * `[A^L_ij, [A^R_pq, lnDelta]]        = +2 b_iq x_ip x_jq`
/// * `[A^L_ip, [A^L_ij, [A^R_pq, lnDelta]]] = -2 b_iq x_jq`
///
/// Both closed forms are what the engine derives under the adopted generator
/// conventions; each isolates the single coordinate `x_jq` up to a constant,
/// which is all the affiliation argument needs. (The printed forms have the
/// two signs swapped between them, which no single convention reproduces.)
pub fn verify_triple_commutator(weights: &RationalWeights) -> IdentityReport {
    let window = weights.window();
    let two = rat_int(2);
    let mut tuples = Vec::new();
    for i in window.lo..=window.hi {
        for p in (i + 1)..=window.hi {
            for j in (p + 1)..=window.hi {
                for q in (j + 1)..=window.hi {
                    tuples.push((i, p, j, q));
                }
            }
        }
    }
    let checks: Vec<TupleCheck> = tuples
        .par_iter()
        .flat_map_iter(|&(i, p, j, q)| {
            let (double, triple) =
                nested_commutators(weights, i, p, j, q).expect("tuple is on the window");
            let b_iq = weights.get(i, q);
            let expect_double = (&Poly::var(i, p) * &Poly::var(j, q)).scale(&(&two * &b_iq));
            let expect_triple = Poly::var(j, q).scale(&(&two * &b_iq)).neg();
            [
                TupleCheck::residual(
                    format!("[AL_{i},{j}, [AR_{p},{q}, lnDelta]]"),
                    vec![i, p, j, q],
                    &double - &expect_double,
                ),
                TupleCheck::residual(
                    format!("[AL_{i},{p}, [AL_{i},{j}, [AR_{p},{q}, lnDelta]]]"),
                    vec![i, p, j, q],
                    &triple - &expect_triple,
                ),
            ]
        })
        .collect();
    IdentityReport {
        name: "triple_commutator".into(),
        window,
        checks,
    }
}
