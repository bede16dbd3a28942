//! Binary64 realization of the Gaussian product measure and the operators
//! built from it: regular representations, modular conjugation and modular
//! phases, the crossed-product unitaries, and Monte Carlo integration.
//!
//! Identities checked here hold exactly in real arithmetic on a window, so
//! the pointwise tests demand agreement near machine precision. Densities are
//! accumulated in log space and exponentiated once; phases are evaluated as
//! `(cos, sin)` pairs.

pub mod checks;
pub mod evaluator;
pub mod mc;
pub mod suite;

use crate::error::Result;
use crate::matrix::F64Matrix;
use crate::weights::{FloatWeights, WeightConfig};
use crate::window::IndexWindow;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// The measure on a window: independent centered Gaussians with densities
/// `(b_kn/pi)^{1/2} exp(-b_kn x^2)`, i.e. variance `1/(2 b_kn)` per
/// coordinate.
#[derive(Clone, Debug)]
pub struct GaussianSpec {
    window: IndexWindow,
    weights: FloatWeights,
}

/// A sample point `(x, t)` of the extended space; `t` is the real coordinate
/// the crossed-product operators act on.
#[derive(Clone, Debug)]
pub struct PointState {
    pub x: F64Matrix,
    pub t: f64,
}

impl PointState {
    pub fn with_x(&self, x: F64Matrix) -> PointState {
        PointState { x, t: self.t }
    }

    pub fn with_t(&self, t: f64) -> PointState {
        PointState {
            x: self.x.clone(),
            t,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn coordinate_seed(root: u64, k: i32, n: i32) -> u64 {
    let tag = ((k as u32 as u64) << 32) | (n as u32 as u64);
    splitmix64(root ^ splitmix64(tag))
}

impl GaussianSpec {
    pub fn new(cfg: &WeightConfig, window: IndexWindow) -> Result<Self> {
        Ok(GaussianSpec {
            window,
            weights: FloatWeights::from_config(cfg, window)?,
        })
    }

    pub fn window(&self) -> IndexWindow {
        self.window
    }

    pub fn weights(&self) -> &FloatWeights {
        &self.weights
    }

    pub fn b(&self, k: i32, n: i32) -> f64 {
        self.weights.get(k, n)
    }

    /// Per-coordinate variance `1/(2 b_kn)`.
    pub fn variance(&self, k: i32, n: i32) -> f64 {
        1.0 / (2.0 * self.b(k, n))
    }

    /// Draw `count` points. Each coordinate gets its own counter-based
    /// substream keyed on `(seed, k, n)`, so the batch is reproducible and
    /// independent of evaluation order; `t` is standard normal, a test-point
    /// generator rather than part of the measure.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<PointState> {
        let pairs = self.window.pairs();
        let mut columns: Vec<Vec<f64>> = Vec::with_capacity(pairs.len());
        for &(k, n) in &pairs {
            let mut rng = ChaCha8Rng::seed_from_u64(coordinate_seed(seed, k, n));
            let dist = Normal::new(0.0, self.variance(k, n).sqrt()).expect("positive variance");
            columns.push((0..count).map(|_| dist.sample(&mut rng)).collect());
        }
        let mut t_rng = ChaCha8Rng::seed_from_u64(coordinate_seed(seed, i32::MAX, i32::MIN));
        let t_dist = Normal::new(0.0, 1.0).unwrap();
        (0..count)
            .map(|i| {
                let mut x = F64Matrix::identity(self.window);
                for (j, &(k, n)) in pairs.iter().enumerate() {
                    x.set(k, n, columns[j][i]);
                }
                PointState {
                    x,
                    t: t_dist.sample(&mut t_rng),
                }
            })
            .collect()
    }

    /// Sample and clamp coordinates to `[-c, c]` (and `t` to `[-2, 2]`).
    /// Pointwise identities are measure independent, and bounded coordinates
    /// keep the intermediate density ratios well inside binary64 range.
    pub fn sample_clamped(&self, count: usize, seed: u64, c: f64) -> Vec<PointState> {
        self.sample(count, seed)
            .into_iter()
            .map(|p| {
                let mut x = F64Matrix::identity(self.window);
                for (&(k, n), &v) in p.x.entries() {
                    x.set(k, n, v.clamp(-c, c));
                }
                PointState {
                    x,
                    t: p.t.clamp(-2.0, 2.0),
                }
            })
            .collect()
    }

    /// `log [dmu(x tau) / dmu(x)] = sum b_kn (x_kn^2 - (x tau)_kn^2)`.
    pub fn log_rn_right(&self, x: &F64Matrix, tau: &F64Matrix) -> f64 {
        let moved = x.multiply(tau).expect("same window");
        self.log_density_shift(x, &moved)
    }

    /// `log [dmu(tau^{-1} x) / dmu(x)]`.
    pub fn log_rn_left(&self, x: &F64Matrix, tau: &F64Matrix) -> f64 {
        let moved = tau.invert_recursive().multiply(x).expect("same window");
        self.log_density_shift(x, &moved)
    }

    fn log_density_shift(&self, x: &F64Matrix, moved: &F64Matrix) -> f64 {
        let mut acc = 0.0;
        for (k, n) in self.window.pairs() {
            let a = x.get(k, n);
            let b = moved.get(k, n);
            acc += self.b(k, n) * (a * a - b * b);
        }
        acc
    }

    /// `dmu(x tau) / dmu(x)` as a positive number.
    pub fn rn_right(&self, x: &F64Matrix, tau: &F64Matrix) -> f64 {
        self.log_rn_right(x, tau).exp()
    }

    pub fn rn_left(&self, x: &F64Matrix, tau: &F64Matrix) -> f64 {
        self.log_rn_left(x, tau).exp()
    }

    /// `log Delta(x) = sum b_kn ((x^{-1}_kn)^2 - x_kn^2)`, the log of the
    /// density ratio `dmu(x)/dmu(x^{-1})` on the window.
    pub fn log_delta(&self, x: &F64Matrix) -> f64 {
        let inv = x.invert_recursive();
        let mut acc = 0.0;
        for (k, n) in self.window.pairs() {
            let a = inv.get(k, n);
            let b = x.get(k, n);
            acc += self.b(k, n) * (a * a - b * b);
        }
        acc
    }

    pub fn delta_density(&self, x: &F64Matrix) -> f64 {
        self.log_delta(x).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::UniMatrix;

    fn spec() -> GaussianSpec {
        GaussianSpec::new(
            &WeightConfig::geometric(2.0).unwrap(),
            IndexWindow::new(-2, 2).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let s = spec();
        let a = s.sample(16, 7);
        let b = s.sample(16, 7);
        let c = s.sample(16, 8);
        for i in 0..16 {
            assert_eq!(a[i].x, b[i].x);
            assert_eq!(a[i].t, b[i].t);
        }
        assert!(a.iter().zip(&c).any(|(p, q)| p.x != q.x));
    }

    #[test]
    fn sample_moments_match_the_variances() {
        let s = spec();
        let n = 100_000;
        let pts = s.sample(n, 42);
        for (k, m) in [(-2, -1), (0, 1), (1, 2), (-2, 2)] {
            let var = pts.iter().map(|p| p.x.get(k, m).powi(2)).sum::<f64>() / n as f64;
            let scaled = var * 2.0 * s.b(k, m);
            // Var of the variance estimator is about 2/n in these units.
            let sigma = (2.0 / n as f64).sqrt();
            assert!(
                (scaled - 1.0).abs() < 5.0 * sigma,
                "2 b Var = {scaled} at ({k},{m})"
            );
        }
        // Distinct coordinates are uncorrelated within 5 sigma.
        let (k1, k2) = ((-1, 1), (0, 2));
        let mut cov = 0.0;
        for p in &pts {
            cov += p.x.get(k1.0, k1.1) * p.x.get(k2.0, k2.1);
        }
        cov /= n as f64;
        let sigma = (s.variance(k1.0, k1.1) * s.variance(k2.0, k2.1) / n as f64).sqrt();
        assert!(cov.abs() < 5.0 * sigma, "cov = {cov}");
    }

    #[test]
    fn density_ratio_is_one_at_identity_translation() {
        let s = spec();
        let id = UniMatrix::identity(s.window());
        for p in s.sample(8, 3) {
            assert_eq!(s.rn_right(&p.x, &id), 1.0);
            assert!(s.rn_right(&p.x, &p.x.invert_recursive()) > 0.0);
        }
    }

    #[test]
    fn cocycle_identity_for_rn_right() {
        let s = spec();
        let pts = s.sample_clamped(32, 11, 2.0);
        let sigma = UniMatrix::elementary(s.window(), 0, 1, 0.7).unwrap();
        let tau = UniMatrix::elementary(s.window(), -1, 1, -0.4).unwrap();
        let prod = sigma.multiply(&tau).unwrap();
        for p in pts {
            let lhs = s.log_rn_right(&p.x, &prod);
            let moved = p.x.multiply(&sigma).unwrap();
            let rhs = s.log_rn_right(&p.x, &sigma) + s.log_rn_right(&moved, &tau);
            assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));
        }
    }

    #[test]
    fn delta_at_identity_point_and_reciprocity() {
        let s = spec();
        let id = UniMatrix::identity(s.window());
        assert_eq!(s.delta_density(&id), 1.0);
        for p in s.sample_clamped(16, 5, 2.0) {
            let inv = p.x.invert_recursive();
            let prod = s.delta_density(&p.x) * s.delta_density(&inv);
            assert!((prod - 1.0).abs() < 1e-10, "Delta(x) Delta(x^-1) = {prod}");
        }
    }

    #[test]
    fn delta_hand_example_on_0_2() {
        // Window [0,2], x01 = x12 = 1, x02 = 0, geometric s = 2:
        // only the (0,2) term survives and x02^{-1} = 1, so Delta = exp(b_02).
        let s = GaussianSpec::new(
            &WeightConfig::geometric(2.0).unwrap(),
            IndexWindow::new(0, 2).unwrap(),
        )
        .unwrap();
        let mut x = F64Matrix::identity(s.window());
        x.set(0, 1, 1.0);
        x.set(1, 2, 1.0);
        let expect = s.b(0, 2).exp(); // b_02 = 2^0 = 1
        assert!((s.delta_density(&x) - expect).abs() < 1e-12);
        assert_eq!(expect, 1.0f64.exp());
    }
}
