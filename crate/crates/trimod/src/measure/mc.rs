//! Monte Carlo integration against the Gaussian measure, with common random
//! numbers for paired comparisons and a deterministic pairwise reduction so
//! a fixed seed gives a bit-identical estimate regardless of thread count.

use super::evaluator::{op_t_right, TestFn};
use super::GaussianSpec;
use crate::matrix::F64Matrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

/// Monte Carlo mean with its standard error.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MCEstimate {
    pub mean_re: f64,
    pub mean_im: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

impl MCEstimate {
    pub fn mean(&self) -> Complex64 {
        Complex64::new(self.mean_re, self.mean_im)
    }

    /// Is zero within `k` standard errors? (For paired difference tests.)
    pub fn consistent_with_zero(&self, k: f64) -> bool {
        self.mean().norm() <= k * self.std_error.max(f64::MIN_POSITIVE)
    }

    pub fn consistent_with(&self, value: f64, k: f64) -> bool {
        (self.mean() - Complex64::new(value, 0.0)).norm()
            <= k * self.std_error.max(f64::MIN_POSITIVE)
    }
}

/// Deterministic pairwise sum, independent of chunking above the leaf size.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

fn estimate(values: Vec<Complex64>, seed: u64) -> MCEstimate {
    let n = values.len();
    let re: Vec<f64> = values.iter().map(|z| z.re).collect();
    let im: Vec<f64> = values.iter().map(|z| z.im).collect();
    let mean = Complex64::new(pairwise_sum(&re) / n as f64, pairwise_sum(&im) / n as f64);
    let dev: Vec<f64> = values.iter().map(|z| (z - mean).norm_sqr()).collect();
    let var = pairwise_sum(&dev) / (n.saturating_sub(1)) as f64;
    MCEstimate {
        mean_re: mean.re,
        mean_im: mean.im,
        std_error: (var / n as f64).sqrt(),
        samples: n as u64,
        seed,
    }
}

/// `integral of f conj(g) dmu`, estimated over `count` samples.
pub fn mc_inner(
    spec: &Arc<GaussianSpec>,
    f: &TestFn,
    g: &TestFn,
    count: usize,
    seed: u64,
) -> MCEstimate {
    let points = spec.sample(count, seed);
    let values: Vec<Complex64> = points.par_iter().map(|p| f(p) * g(p).conj()).collect();
    estimate(values, seed)
}

/// Paired unitarity test: per sample, `|T^R_tau f|^2 - |f|^2` with common
/// random numbers. For a unitary operator the mean is zero to within
/// statistical error.
pub fn check_unitarity(
    spec: &Arc<GaussianSpec>,
    tau: &F64Matrix,
    f: &TestFn,
    count: usize,
    seed: u64,
) -> MCEstimate {
    let points = spec.sample(count, seed);
    let tf = op_t_right(spec, tau).apply(f);
    let values: Vec<Complex64> = points
        .par_iter()
        .map(|p| Complex64::new(tf(p).norm_sqr() - f(p).norm_sqr(), 0.0))
        .collect();
    estimate(values, seed)
}

/// Second moment of one coordinate, `integral x_kn^2 dmu = 1/(2 b_kn)`.
pub fn second_moment(
    spec: &Arc<GaussianSpec>,
    k: i32,
    n: i32,
    count: usize,
    seed: u64,
) -> MCEstimate {
    let points = spec.sample(count, seed);
    let values: Vec<Complex64> = points
        .par_iter()
        .map(|p| Complex64::new(p.x.get(k, n).powi(2), 0.0))
        .collect();
    estimate(values, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::UniMatrix;
    use crate::measure::evaluator::{const_one, dictionary};
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

    #[test]
    fn unit_function_has_inner_product_one_exactly() {
        let s = spec();
        let one = const_one();
        let est = mc_inner(&s, &one, &one, 1000, 3);
        assert_eq!(est.mean_re, 1.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn second_moments_match_the_variance() {
        let s = spec();
        for (k, n) in [(0, 1), (-2, 2)] {
            let est = second_moment(&s, k, n, 100_000, 11);
            let expect = s.variance(k, n);
            assert!(
                est.consistent_with(expect, 5.0),
                "moment {} vs {} +- {}",
                est.mean_re,
                expect,
                est.std_error
            );
        }
    }

    #[test]
    fn translation_is_unitary_statistically() {
        let s = spec();
        let tau = UniMatrix::elementary(s.window(), 0, 1, 0.8).unwrap();
        for (name, f) in dictionary(&s).into_iter().take(4) {
            let est = check_unitarity(&s, &tau, &f, 100_000, 17);
            assert!(
                est.consistent_with_zero(3.0),
                "{name}: {} +- {}",
                est.mean_re,
                est.std_error
            );
        }
    }

    #[test]
    fn estimates_are_deterministic() {
        let s = spec();
        let one = const_one();
        let f = dictionary(&s).remove(3).1;
        let a = mc_inner(&s, &f, &one, 20_000, 5);
        let b = mc_inner(&s, &f, &one, 20_000, 5);
        assert_eq!(a.mean_re, b.mean_re);
        assert_eq!(a.std_error, b.std_error);
    }
}
