//! Operator evaluators: each operator is a transformer of test functions,
//! and compositions nest transformations, so an identity between operator
//! products becomes a pointwise comparison of two evaluators on a dictionary
//! of test functions.

use super::{GaussianSpec, PointState};
use crate::matrix::F64Matrix;
use crate::poly::Poly;
use crate::weyl::WeylOp;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::sync::Arc;

/// A pointwise-evaluable test function on `(x, t)`.
pub type TestFn = Arc<dyn Fn(&PointState) -> Complex64 + Send + Sync>;

pub fn const_one() -> TestFn {
    Arc::new(|_| Complex64::new(1.0, 0.0))
}

/// Unit-modulus phase from an angle, as an explicit `(cos, sin)` pair.
pub fn phase(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

/// One operator, represented by what it does to a test function.
#[derive(Clone)]
pub struct OpEvaluator {
    name: String,
    transform: Arc<dyn Fn(TestFn) -> TestFn + Send + Sync>,
}

impl OpEvaluator {
    pub fn new(
        name: impl Into<String>,
        transform: impl Fn(TestFn) -> TestFn + Send + Sync + 'static,
    ) -> Self {
        OpEvaluator {
            name: name.into(),
            transform: Arc::new(transform),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn apply(&self, f: &TestFn) -> TestFn {
        (self.transform)(f.clone())
    }

    pub fn eval(&self, f: &TestFn, p: &PointState) -> Complex64 {
        self.apply(f)(p)
    }
}

/// Operator product `ops[0] ops[1] ... ops[last]`, applied like a product:
/// the rightmost factor acts first.
pub fn compose(ops: &[OpEvaluator]) -> OpEvaluator {
    let ops: Vec<OpEvaluator> = ops.to_vec();
    let name = ops
        .iter()
        .map(OpEvaluator::name)
        .collect::<Vec<_>>()
        .join(" ");
    OpEvaluator::new(name, move |f| {
        let mut g = f;
        for op in ops.iter().rev() {
            g = op.apply(&g);
        }
        g
    })
}

/// Right regular representation `(T^R_tau f)(x) = rn(x,tau)^{1/2} f(x tau)`.
pub fn op_t_right(spec: &Arc<GaussianSpec>, tau: &F64Matrix) -> OpEvaluator {
    let spec = spec.clone();
    let tau = tau.clone();
    OpEvaluator::new("T^R", move |f| {
        let spec = spec.clone();
        let tau = tau.clone();
        Arc::new(move |p| {
            let amp = (0.5 * spec.log_rn_right(&p.x, &tau)).exp();
            let moved = p.with_x(p.x.multiply(&tau).expect("same window"));
            f(&moved) * amp
        })
    })
}

/// Left regular representation `(T^L_tau f)(x) = rn(x,tau)^{1/2} f(tau^{-1} x)`.
pub fn op_t_left(spec: &Arc<GaussianSpec>, tau: &F64Matrix) -> OpEvaluator {
    let spec = spec.clone();
    let tau = tau.clone();
    let tau_inv = tau.invert_recursive();
    OpEvaluator::new("T^L", move |f| {
        let spec = spec.clone();
        let tau = tau.clone();
        let tau_inv = tau_inv.clone();
        Arc::new(move |p| {
            let amp = (0.5 * spec.log_rn_left(&p.x, &tau)).exp();
            let moved = p.with_x(tau_inv.multiply(&p.x).expect("same window"));
            f(&moved) * amp
        })
    })
}

/// Modular conjugation
/// `(J f)(x) = (dmu(x^{-1})/dmu(x))^{1/2} conj(f(x^{-1}))`, conjugate linear.
pub fn op_j(spec: &Arc<GaussianSpec>) -> OpEvaluator {
    let spec = spec.clone();
    OpEvaluator::new("J", move |f| {
        let spec = spec.clone();
        Arc::new(move |p| {
            let amp = (-0.5 * spec.log_delta(&p.x)).exp();
            let flipped = p.with_x(p.x.invert_recursive());
            f(&flipped).conj() * amp
        })
    })
}

/// `Delta^{i t0}`: multiplication by the unit-modulus phase
/// `exp(i t0 log Delta(x))` for a fixed parameter `t0`.
pub fn op_delta_it(spec: &Arc<GaussianSpec>, t0: f64) -> OpEvaluator {
    let spec = spec.clone();
    OpEvaluator::new("Delta^it", move |f| {
        let spec = spec.clone();
        Arc::new(move |p| f(p) * phase(t0 * spec.log_delta(&p.x)))
    })
}

/// `(W f)(x, t) = Delta(x)^{-i t} f(x, t)`, with `t` the point coordinate.
pub fn op_w(spec: &Arc<GaussianSpec>) -> OpEvaluator {
    let spec = spec.clone();
    OpEvaluator::new("W", move |f| {
        let spec = spec.clone();
        Arc::new(move |p| f(p) * phase(-p.t * spec.log_delta(&p.x)))
    })
}

pub fn op_w_star(spec: &Arc<GaussianSpec>) -> OpEvaluator {
    let spec = spec.clone();
    OpEvaluator::new("W*", move |f| {
        let spec = spec.clone();
        Arc::new(move |p| f(p) * phase(p.t * spec.log_delta(&p.x)))
    })
}

/// Left translation in the real coordinate: `(lambda(s) f)(x, t) = f(x, t-s)`.
pub fn op_lambda(s: f64) -> OpEvaluator {
    OpEvaluator::new("lambda", move |f| Arc::new(move |p| f(&p.with_t(p.t - s))))
}

/// Right translation in the real coordinate: `(rho(s) f)(x, t) = f(x, t+s)`.
pub fn op_rho(s: f64) -> OpEvaluator {
    OpEvaluator::new("rho", move |f| Arc::new(move |p| f(&p.with_t(p.t + s))))
}

/// Multiplication by a fixed function.
pub fn op_mult(name: impl Into<String>, g: TestFn) -> OpEvaluator {
    OpEvaluator::new(name, move |f| {
        let g = g.clone();
        Arc::new(move |p| g(p) * f(p))
    })
}

/// One-parameter phase group of the coordinate multiplication operator:
/// multiplication by `exp(i s x_kn)`.
pub fn op_q_phase_coord(k: i32, n: i32, s: f64) -> OpEvaluator {
    OpEvaluator::new("exp(isQ_kn)", move |f| {
        Arc::new(move |p| f(p) * phase(s * p.x.get(k, n)))
    })
}

/// Multiplication by `exp(i s t)`.
pub fn op_q_phase_t(s: f64) -> OpEvaluator {
    OpEvaluator::new("exp(isQ_t)", move |f| {
        Arc::new(move |p| f(p) * phase(s * p.t))
    })
}

// ---------------------------------------------------------------------------
// Test function dictionary
// ---------------------------------------------------------------------------

/// Picks up to three reference coordinates of the window (first, middle,
/// last pair in (k, n) order).
fn reference_pairs(spec: &GaussianSpec) -> Vec<(i32, i32)> {
    let pairs = spec.window().pairs();
    let mut out = vec![pairs[0]];
    if pairs.len() > 1 {
        out.push(pairs[pairs.len() / 2]);
    }
    if pairs.len() > 2 {
        out.push(pairs[pairs.len() - 1]);
    }
    out.dedup();
    out
}

/// Monomials of degree at most three in at most three coordinates, times
/// Gaussians `exp(-sum c x^2)` with `c` either `0` or `b/2`: closed under the
/// substitutions the operators perform and square integrable.
pub fn dictionary(spec: &Arc<GaussianSpec>) -> Vec<(String, TestFn)> {
    let refs = reference_pairs(spec);
    let a = refs[0];
    let b = refs[(refs.len() / 2).min(refs.len() - 1)];
    let c = refs[refs.len() - 1];
    let ba = spec.b(a.0, a.1);
    let bb = spec.b(b.0, b.1);
    let bc = spec.b(c.0, c.1);

    let re = |v: f64| Complex64::new(v, 0.0);
    let mut out: Vec<(String, TestFn)> = Vec::new();
    out.push(("one".into(), const_one()));
    out.push((
        format!("x[{},{}]", a.0, a.1),
        Arc::new(move |p: &PointState| re(p.x.get(a.0, a.1))),
    ));
    out.push((
        format!("x[{},{}]^2 g", b.0, b.1),
        Arc::new(move |p: &PointState| {
            let xb = p.x.get(b.0, b.1);
            re(xb * xb * (-0.5 * bb * xb * xb).exp())
        }),
    ));
    out.push((
        "xa xb gab".into(),
        Arc::new(move |p: &PointState| {
            let xa = p.x.get(a.0, a.1);
            let xb = p.x.get(b.0, b.1);
            re(xa * xb * (-0.5 * (ba * xa * xa + bb * xb * xb)).exp())
        }),
    ));
    out.push((
        "xa^3 ga".into(),
        Arc::new(move |p: &PointState| {
            let xa = p.x.get(a.0, a.1);
            re(xa.powi(3) * (-0.5 * ba * xa * xa).exp())
        }),
    ));
    out.push((
        "gabc".into(),
        Arc::new(move |p: &PointState| {
            let xa = p.x.get(a.0, a.1);
            let xb = p.x.get(b.0, b.1);
            let xc = p.x.get(c.0, c.1);
            re((-0.5 * (ba * xa * xa + bb * xb * xb + bc * xc * xc)).exp())
        }),
    ));
    out.push((
        "xb xc^2 gc".into(),
        Arc::new(move |p: &PointState| {
            let xb = p.x.get(b.0, b.1);
            let xc = p.x.get(c.0, c.1);
            re(xb * xc * xc * (-0.5 * bc * xc * xc).exp())
        }),
    ));
    out
}

/// Dictionary extended with `t`-dependent factors, for operators acting on
/// the extended space.
pub fn dictionary_with_t(spec: &Arc<GaussianSpec>) -> Vec<(String, TestFn)> {
    let mut out = dictionary(spec);
    let refs = reference_pairs(spec);
    let a = refs[0];
    let ba = spec.b(a.0, a.1);
    let re = |v: f64| Complex64::new(v, 0.0);
    out.push((
        "t gt".into(),
        Arc::new(move |p: &PointState| re(p.t * (-0.5 * p.t * p.t).exp())),
    ));
    out.push((
        "xa t gat".into(),
        Arc::new(move |p: &PointState| {
            let xa = p.x.get(a.0, a.1);
            re(xa * p.t * (-0.5 * (ba * xa * xa + p.t * p.t)).exp())
        }),
    ));
    out
}

// ---------------------------------------------------------------------------
// Polynomial-times-Gaussian test functions with analytic derivatives
// ---------------------------------------------------------------------------

/// `f(x) = poly(x) exp(-sum c_kn x_kn^2)` with exact partial derivatives,
/// used to compare finite differences of the representations against the
/// symbolic generators.
#[derive(Clone)]
pub struct PolyGauss {
    pub poly: Poly,
    pub gauss: BTreeMap<(i32, i32), f64>,
}

impl PolyGauss {
    pub fn value(&self, x: &F64Matrix) -> f64 {
        let point = |k: i32, n: i32| x.get(k, n);
        self.poly.eval_f64(&point) * self.log_gauss(x).exp()
    }

    fn log_gauss(&self, x: &F64Matrix) -> f64 {
        self.gauss
            .iter()
            .map(|(&(k, n), &c)| -c * x.get(k, n) * x.get(k, n))
            .sum()
    }

    /// Exact `d f / d x_v` at the point.
    pub fn partial(&self, v: (i32, i32), x: &F64Matrix) -> f64 {
        let point = |k: i32, n: i32| x.get(k, n);
        let poly_part = self.poly.partial(v).eval_f64(&point);
        let gauss_part = match self.gauss.get(&v) {
            Some(&c) => -2.0 * c * x.get(v.0, v.1) * self.poly.eval_f64(&point),
            None => 0.0,
        };
        (poly_part + gauss_part) * self.log_gauss(x).exp()
    }

    pub fn test_fn(self: &Arc<Self>) -> TestFn {
        let me = self.clone();
        Arc::new(move |p| Complex64::new(me.value(&p.x), 0.0))
    }
}

/// Evaluate a symbolic first-order operator on a `PolyGauss` at a point:
/// `sum_v p_v(x) (d f / d x_v)(x) + q(x) f(x)`.
pub fn apply_weyl_at(op: &WeylOp, f: &PolyGauss, x: &F64Matrix) -> f64 {
    let point = |k: i32, n: i32| x.get(k, n);
    let mut acc = op.scalar_part().eval_f64(&point) * f.value(x);
    for (&v, coeff) in op.deriv_part() {
        acc += coeff.eval_f64(&point) * f.partial(v, x);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::UniMatrix;
    use crate::weights::WeightConfig;
    use crate::window::IndexWindow;

    fn spec() -> Arc<GaussianSpec> {
        Arc::new(
            GaussianSpec::new(
                &WeightConfig::geometric(2.0).unwrap(),
                IndexWindow::new(-2, 2).unwrap(),
            )
            .unwrap(),
        )
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        let m = a.norm().max(b.norm());
        if m > 1e-12 {
            (a - b).norm() / m
        } else {
            (a - b).norm()
        }
    }

    #[test]
    fn identity_translation_and_zero_power_are_identities() {
        let s = spec();
        let id = UniMatrix::identity(s.window());
        let tr = op_t_right(&s, &id);
        let dz = op_delta_it(&s, 0.0);
        for (_, f) in dictionary_with_t(&s) {
            for p in s.sample_clamped(16, 3, 2.0) {
                assert_eq!(tr.eval(&f, &p), f(&p));
                assert_eq!(dz.eval(&f, &p), f(&p));
            }
        }
    }

    #[test]
    fn j_is_an_involution() {
        let s = spec();
        let j = op_j(&s);
        let jj = compose(&[j.clone(), j]);
        for (_, f) in dictionary(&s) {
            for p in s.sample_clamped(32, 9, 2.0) {
                assert!(rel(jj.eval(&f, &p), f(&p)) < 1e-12);
            }
        }
    }

    #[test]
    fn lambda_and_rho_translate_t() {
        let s = spec();
        let f: TestFn = Arc::new(|p| Complex64::new(p.t, 0.0));
        let p = s.sample(1, 1).remove(0);
        assert_eq!(op_lambda(0.5).eval(&f, &p).re, p.t - 0.5);
        assert_eq!(op_rho(0.5).eval(&f, &p).re, p.t + 0.5);
        let q = op_q_phase_t(2.0).eval(&const_one(), &p);
        assert!((q.norm() - 1.0).abs() < 1e-15);
        let qc = op_q_phase_coord(0, 1, 1.5).eval(&const_one(), &p);
        assert!((qc.arg() - 1.5 * p.x.get(0, 1)).abs() < 1e-12);
    }

    #[test]
    fn poly_gauss_partials_match_finite_differences() {
        let s = spec();
        let f = Arc::new(PolyGauss {
            poly: &(&Poly::var(0, 1) * &Poly::var(-1, 1)) + &Poly::var(0, 2).pow(2),
            gauss: BTreeMap::from([((0, 1), 0.5), ((0, 2), 1.0)]),
        });
        let p = s.sample_clamped(1, 5, 2.0).remove(0);
        let h = 1e-5;
        for v in [(0, 1), (-1, 1), (0, 2), (1, 2)] {
            let mut plus = p.x.clone();
            plus.set(v.0, v.1, p.x.get(v.0, v.1) + h);
            let mut minus = p.x.clone();
            minus.set(v.0, v.1, p.x.get(v.0, v.1) - h);
            let fd = (f.value(&plus) - f.value(&minus)) / (2.0 * h);
            assert!((fd - f.partial(v, &p.x)).abs() < 1e-8, "partial at {v:?}");
        }
    }
}
