//! First-order differential operators with polynomial coefficients on the
//! coordinates of a window: the algebra generated by multiplications and the
//! derivations `d/dx_pq`, in normal form (all derivations on the right).
//!
//! Everything here is exact. The building blocks are
//!
//! * `D_pq = d/dx_pq - b_pq x_pq`,
//! * the right-translation generators `A^R_kn = sum_{r<k} x_rk D_rn + D_kn`,
//! * the left-translation generators
//!   `A^L_pq = -(sum_{m>q} x_qm D_pm + D_pq)`,
//!
//! truncated to the window. The signs are fixed so that `A^R_kn` and `A^L_pq`
//! are the derivatives at `s = 0` of the right and left regular
//! representations along `I + sE`; the numeric layer pins both down by finite
//! differences.

use crate::matrix::UniMatrix;
use crate::poly::{Poly, Var};
use crate::weights::RationalWeights;
use crate::window::IndexWindow;
use num::BigRational;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Neg;

/// Normal form `sum_v p_v(x) d/dx_v + q(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeylOp {
    window: IndexWindow,
    deriv: BTreeMap<Var, Poly>,
    scalar: Poly,
}

impl WeylOp {
    pub fn zero(window: IndexWindow) -> Self {
        WeylOp {
            window,
            deriv: BTreeMap::new(),
            scalar: Poly::zero(),
        }
    }

    /// Multiplication operator by `q(x)`.
    pub fn mult(window: IndexWindow, q: Poly) -> Self {
        WeylOp {
            window,
            deriv: BTreeMap::new(),
            scalar: q,
        }
    }

    /// The derivation `d/dx_v`.
    pub fn derivation(window: IndexWindow, v: Var) -> Self {
        let mut deriv = BTreeMap::new();
        deriv.insert(v, Poly::one());
        WeylOp {
            window,
            deriv,
            scalar: Poly::zero(),
        }
    }

    pub fn window(&self) -> IndexWindow {
        self.window
    }

    pub fn scalar_part(&self) -> &Poly {
        &self.scalar
    }

    pub fn deriv_part(&self) -> &BTreeMap<Var, Poly> {
        &self.deriv
    }

    /// True when no derivation term survives.
    pub fn is_multiplication(&self) -> bool {
        self.deriv.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.deriv.is_empty() && self.scalar.is_zero()
    }

    fn insert_deriv(&mut self, v: Var, p: Poly) {
        if p.is_zero() {
            return;
        }
        match self.deriv.entry(v) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(p);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &p;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &WeylOp) -> WeylOp {
        assert_eq!(self.window, other.window, "window mismatch");
        let mut out = self.clone();
        for (v, p) in &other.deriv {
            out.insert_deriv(*v, p.clone());
        }
        let scalar = &out.scalar + &other.scalar;
        out.scalar = scalar;
        out
    }

    pub fn sub(&self, other: &WeylOp) -> WeylOp {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> WeylOp {
        WeylOp {
            window: self.window,
            deriv: self
                .deriv
                .iter()
                .map(|(v, p)| (*v, p.clone().neg()))
                .collect(),
            scalar: self.scalar.clone().neg(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> WeylOp {
        WeylOp {
            window: self.window,
            deriv: self
                .deriv
                .iter()
                .map(|(v, p)| (*v, p.scale(c)))
                .filter(|(_, p)| !p.is_zero())
                .collect(),
            scalar: self.scalar.scale(c),
        }
    }

    /// Exact Leibniz action on a polynomial.
    pub fn apply(&self, f: &Poly) -> Poly {
        let mut out = &self.scalar * f;
        for (v, p) in &self.deriv {
            out = &out + &(p * &f.partial(*v));
        }
        out
    }

    /// Left multiplication by a polynomial: `q(x) . self`, still first order.
    pub fn left_mul(&self, factor: &Poly) -> WeylOp {
        let mut out = WeylOp::zero(self.window);
        for (v, p) in &self.deriv {
            out.insert_deriv(*v, factor * p);
        }
        out.scalar = factor * &self.scalar;
        out
    }

    /// Normal-form commutator `[self, other] = self other - other self`.
    ///
    /// First-order operators close under the bracket, so the result is again
    /// a `WeylOp`.
    pub fn commutator(&self, other: &WeylOp) -> WeylOp {
        assert_eq!(self.window, other.window, "window mismatch");
        let mut out = WeylOp::zero(self.window);
        for (&a, p) in &self.deriv {
            for (&b, q) in &other.deriv {
                // [p d_a, q d_b] = p (d_a q) d_b - q (d_b p) d_a
                out.insert_deriv(b, p * &q.partial(a));
                out.insert_deriv(a, (q * &p.partial(b)).neg());
            }
        }
        let mut scalar = Poly::zero();
        for (&a, p) in &self.deriv {
            scalar = &scalar + &(p * &other.scalar.partial(a));
        }
        for (&b, q) in &other.deriv {
            scalar = &scalar - &(q * &self.scalar.partial(b));
        }
        out.scalar = scalar;
        out
    }
}

impl fmt::Display for WeylOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(p, q), coeff) in &self.deriv {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "({coeff})*d[{p},{q}]")?;
            first = false;
        }
        if !self.scalar.is_zero() {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "({})", self.scalar)?;
        }
        Ok(())
    }
}

/// `D_pq = d/dx_pq - b_pq x_pq`.
pub fn d_op(weights: &RationalWeights, p: i32, q: i32) -> WeylOp {
    let window = weights.window();
    window.check_pair(p, q).expect("D index on window");
    let mut op = WeylOp::derivation(window, (p, q));
    op.scalar = Poly::var(p, q).scale(&weights.get(p, q)).neg();
    op
}

/// Left-translation generator, truncated to the window:
/// `A^L_pq = -(sum_{m=q+1}^{hi} x_qm D_pm + D_pq)`.
///
/// The overall sign makes this the `s`-derivative of `T^L` along `I + sE_pq`;
/// the commonly quoted closed form carries the opposite sign, and the
/// finite-difference check in the numeric layer singles this one out.
pub fn a_left(weights: &RationalWeights, p: i32, q: i32) -> WeylOp {
    let window = weights.window();
    window.check_pair(p, q).expect("A^L index on window");
    let mut op = d_op(weights, p, q);
    for m in (q + 1)..=window.hi {
        let term = d_op(weights, p, m);
        op = op.add(&term.left_mul(&Poly::var(q, m)));
    }
    op.neg()
}

/// Right-translation generator, truncated to the window:
/// `A^R_kn = sum_{r=lo}^{k-1} x_rk D_rn + D_kn`.
///
/// Uses the `x_rk` spelling (`r < k`), the only one whose coefficients are
/// valid upper coordinates; it also matches the finite-difference derivative
/// of `T^R` along `I + sE_kn`.
pub fn a_right(weights: &RationalWeights, k: i32, n: i32) -> WeylOp {
    let window = weights.window();
    window.check_pair(k, n).expect("A^R index on window");
    let mut op = d_op(weights, k, n);
    for r in window.lo..k {
        let term = d_op(weights, r, n);
        op = op.add(&term.left_mul(&Poly::var(r, k)));
    }
    op
}

/// The rejected `x_kr` spelling of `A^R_kn`, kept as a negative control. On
/// the strictly upper chart the coordinate slots `(k, r)` with `r < k` are
/// identically zero, so the whole sum collapses and only `D_kn` remains.
pub fn a_right_misprint(weights: &RationalWeights, k: i32, n: i32) -> WeylOp {
    let window = weights.window();
    window.check_pair(k, n).expect("A^R index on window");
    d_op(weights, k, n)
}

/// The polynomial expressing the inverse-matrix coordinate `x_kn^{-1}`, by
/// the recurrence `x_kn^{-1} = -x_kn - sum_{r=k+1}^{n-1} x_kr x_rn^{-1}`.
pub fn inverse_coordinate(window: IndexWindow, k: i32, n: i32) -> Poly {
    window.check_pair(k, n).expect("coordinate on window");
    let mut memo: BTreeMap<Var, Poly> = BTreeMap::new();
    inverse_coordinate_memo(k, n, &mut memo)
}

/// All inverse coordinates on the window at once.
pub fn inverse_coordinates(window: IndexWindow) -> BTreeMap<Var, Poly> {
    let mut memo: BTreeMap<Var, Poly> = BTreeMap::new();
    for (k, n) in window.pairs() {
        inverse_coordinate_memo(k, n, &mut memo);
    }
    memo
}

fn inverse_coordinate_memo(k: i32, n: i32, memo: &mut BTreeMap<Var, Poly>) -> Poly {
    if let Some(p) = memo.get(&(k, n)) {
        return p.clone();
    }
    let mut acc = Poly::var(k, n).neg();
    for r in (k + 1)..n {
        let inner = inverse_coordinate_memo(r, n, memo);
        acc = &acc - &(&Poly::var(k, r) * &inner);
    }
    memo.insert((k, n), acc.clone());
    acc
}

/// Full inverse-matrix entry `(X^{-1})_{ab}` as a polynomial: `1` on the
/// diagonal, `x_ab^{-1}` above it, `0` below.
pub fn inverse_full_entry(window: IndexWindow, a: i32, b: i32) -> Poly {
    if a == b {
        Poly::one()
    } else if a < b && window.contains_pair(a, b) {
        inverse_coordinate(window, a, b)
    } else {
        Poly::zero()
    }
}

/// `w_kn = (x_kn + x_kn^{-1})(x_kn - x_kn^{-1})`.
pub fn w_poly(window: IndexWindow, k: i32, n: i32) -> Poly {
    let x = Poly::var(k, n);
    let xi = inverse_coordinate(window, k, n);
    (&x + &xi) * (&x - &xi)
}

/// `sum_{k<n} b_kn w_kn(x)` over the window; this equals `-ln Delta(x)` for
/// the window truncation of the measure density ratio.
pub fn neg_log_delta(weights: &RationalWeights) -> Poly {
    let window = weights.window();
    let mut acc = Poly::zero();
    for (k, n) in window.pairs() {
        acc = &acc + &w_poly(window, k, n).scale(&weights.get(k, n));
    }
    acc
}

/// Symbolic unitriangular matrix whose `(k,n)` entry is the coordinate
/// `x_kn` itself; inverting it must reproduce `inverse_coordinate`.
pub fn coordinate_matrix(window: IndexWindow) -> UniMatrix<Poly> {
    let mut m = UniMatrix::identity(window);
    for (k, n) in window.pairs() {
        m.set(k, n, Poly::var(k, n));
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat_int;
    use crate::weights::WeightConfig;

    fn window(lo: i32, hi: i32) -> IndexWindow {
        IndexWindow::new(lo, hi).unwrap()
    }

    fn geometric(lo: i32, hi: i32) -> RationalWeights {
        RationalWeights::from_config(&WeightConfig::geometric(2.0).unwrap(), window(lo, hi))
            .unwrap()
    }

    #[test]
    fn inverse_coordinate_base_cases() {
        let w = window(0, 2);
        assert_eq!(inverse_coordinate(w, 0, 1), Poly::var(0, 1).neg());
        // x02^{-1} = -x02 + x01 x12
        let expect = &Poly::var(0, 1) * &Poly::var(1, 2) - Poly::var(0, 2);
        assert_eq!(inverse_coordinate(w, 0, 2), expect);
    }

    #[test]
    fn inverse_coordinate_support_stays_in_block() {
        let w = window(-2, 3);
        for (k, n) in w.pairs() {
            for (r, s) in inverse_coordinate(w, k, n).support() {
                assert!(k <= r && r < s && s <= n);
            }
        }
    }

    #[test]
    fn inverse_coordinates_match_matrix_inversion() {
        // Substituting the coordinate polynomials into the matrix inverse and
        // multiplying back gives the identity matrix of polynomials.
        let w = window(-1, 2);
        let x = coordinate_matrix(w);
        let inv = x.invert_recursive();
        for (k, n) in w.pairs() {
            assert_eq!(inv.get(k, n), inverse_coordinate(w, k, n));
        }
        assert!(x.multiply(&inv).unwrap().is_identity());
        assert!(inv.multiply(&x).unwrap().is_identity());
        assert_eq!(x.invert_explicit(), inv);
    }

    #[test]
    fn apply_basic_calculus() {
        let w = geometric(0, 2);
        let d01 = WeylOp::derivation(w.window(), (0, 1));
        let sq = Poly::var(0, 1).pow(2);
        assert_eq!(d01.apply(&sq), Poly::var(0, 1).scale(&rat_int(2)));

        // D_01 applied to 1 is -b_01 x_01 (b_01 = 1 here).
        let d = d_op(&w, 0, 1);
        assert_eq!(
            d.apply(&Poly::one()),
            Poly::var(0, 1).scale(&w.get(0, 1)).neg()
        );
    }

    #[test]
    fn canonical_pair_commutator() {
        let wts = geometric(0, 2);
        let w = wts.window();
        let d = WeylOp::derivation(w, (0, 1));
        let x = WeylOp::mult(w, Poly::var(0, 1));
        let c = d.commutator(&x);
        assert!(c.is_multiplication());
        assert_eq!(*c.scalar_part(), Poly::one());
    }

    #[test]
    fn disjoint_d_ops_commute() {
        let wts = geometric(0, 3);
        let a = d_op(&wts, 0, 1);
        let b = d_op(&wts, 2, 3);
        assert!(a.commutator(&b).is_zero());
        // And [D, D] with shared index also vanishes: same variable.
        assert!(a.commutator(&a).is_zero());
    }

    #[test]
    fn d_bracket_with_inverse_coordinate() {
        // [D_01, x02^{-1}] = x12 on the window [0,2].
        let wts = geometric(0, 2);
        let w = wts.window();
        let d = d_op(&wts, 0, 1);
        let m = WeylOp::mult(w, inverse_coordinate(w, 0, 2));
        let c = d.commutator(&m);
        assert!(c.is_multiplication());
        assert_eq!(*c.scalar_part(), Poly::var(1, 2));
    }

    #[test]
    fn commutator_agrees_with_apply_randomized() {
        use rand::Rng;
        use rand::SeedableRng;
        let wts = geometric(0, 3);
        let w = wts.window();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let vars = w.pairs();
        let random_poly = |rng: &mut rand_chacha::ChaCha8Rng| {
            let mut p = Poly::zero();
            for _ in 0..4 {
                let mut term = Poly::constant(crate::matrix::small_rational(rng));
                for _ in 0..rng.gen_range(0..=3usize) {
                    let (k, n) = vars[rng.gen_range(0..vars.len())];
                    term = term * Poly::var(k, n);
                }
                p = p + term;
            }
            p
        };
        let random_op = |rng: &mut rand_chacha::ChaCha8Rng| {
            let mut op = WeylOp::mult(w, random_poly(rng));
            for _ in 0..2 {
                let v = vars[rng.gen_range(0..vars.len())];
                let coeff = random_poly(rng);
                let d = WeylOp::derivation(w, v).left_mul(&coeff);
                op = op.add(&d);
            }
            op
        };
        for _ in 0..25 {
            let a = random_op(&mut rng);
            let b = random_op(&mut rng);
            let f = random_poly(&mut rng);
            let via_bracket = a.commutator(&b).apply(&f);
            let direct = &a.apply(&b.apply(&f)) - &b.apply(&a.apply(&f));
            assert_eq!(via_bracket, direct);
        }
    }

    #[test]
    fn generator_truncations() {
        let wts = geometric(0, 2);
        // A^L_01 on [0,2] is -(x12 D_02 + D_01).
        let al = a_left(&wts, 0, 1);
        let expect = d_op(&wts, 0, 2)
            .left_mul(&Poly::var(1, 2))
            .add(&d_op(&wts, 0, 1))
            .neg();
        assert_eq!(al, expect);

        // A^R_12 on [0,2] is x01 D_02 + D_12.
        let ar = a_right(&wts, 1, 2);
        let expect = d_op(&wts, 0, 2)
            .left_mul(&Poly::var(0, 1))
            .add(&d_op(&wts, 1, 2));
        assert_eq!(ar, expect);

        // q = hi leaves only the single D term in A^L.
        assert_eq!(a_left(&wts, 0, 2), d_op(&wts, 0, 2).neg());
        // k = lo leaves only the single D term in A^R, which is also what the
        // misprinted spelling always degenerates to.
        assert_eq!(a_right(&wts, 0, 1), d_op(&wts, 0, 1));
        assert_eq!(a_right_misprint(&wts, 1, 2), d_op(&wts, 1, 2));
    }

    #[test]
    fn w_polynomials() {
        let w = window(0, 2);
        // Nearest-neighbour w vanishes: x^{-1} = -x there.
        assert!(w_poly(w, 0, 1).is_zero());
        assert!(w_poly(w, 1, 2).is_zero());
        // w_02 = (x01 x12)(2 x02 - x01 x12).
        let prod = &Poly::var(0, 1) * &Poly::var(1, 2);
        let expect = &prod * &(Poly::var(0, 2).scale(&rat_int(2)) - prod.clone());
        assert_eq!(w_poly(w, 0, 2), expect);

        // On a two-index window the weighted sum has only vanishing terms.
        let wts = geometric(0, 1);
        assert!(neg_log_delta(&wts).is_zero());
    }

    #[test]
    fn neg_log_delta_uses_weights() {
        let wts = geometric(0, 2);
        let w = wts.window();
        let expect = w_poly(w, 0, 2).scale(&wts.get(0, 2));
        assert_eq!(neg_log_delta(&wts), expect);
        assert!(!expect.is_zero());
    }
}
