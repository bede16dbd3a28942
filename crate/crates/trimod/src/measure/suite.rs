//! The verification suite: a JSON-configured run over the symbolic identity
//! sweeps and the numeric pointwise and Monte Carlo checks, emitting one
//! machine-readable record per check.

use super::checks::{
    check_cocycle, check_commutation, check_delta_crosscheck, check_j_involution, check_tgt,
    check_u_consistency, default_group_elements, generator_fd_check, verify_phase_commutators,
    verify_urm, GeneratorSide, NumericCheckReport,
};
use super::evaluator::TestFn;
use super::mc::{check_unitarity, second_moment, MCEstimate};
use super::GaussianSpec;
use crate::error::Result;
use crate::identities::{
    verify_al_brackets, verify_bracket_ar_w, verify_lemma_d_inverse, verify_triple_commutator,
    IdentityReport,
};
use crate::matrix::UniMatrix;
use crate::weights::{RationalWeights, WeightConfig};
use crate::window::IndexWindow;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

pub const ALL_CHECKS: &[&str] = &[
    "d_inverse",
    "ar_w",
    "al_brackets",
    "triple_commutator",
    "commutation",
    "tgt",
    "u_consistency",
    "urm",
    "phase_commutators",
    "generator_fd",
    "j_involution",
    "cocycle",
    "delta_crosscheck",
    "mc_unitarity",
    "moments",
];

/// Tolerances for a verification run. Pointwise identities are exact in real
/// arithmetic, so their tolerances sit near machine precision.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub pointwise: f64,
    pub perturbation: f64,
    pub unit_modulus: f64,
    pub generator_fd: f64,
    pub mc_sigmas: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            pointwise: 1e-9,
            perturbation: 1e-10,
            unit_modulus: 1e-12,
            generator_fd: 1e-6,
            mc_sigmas: 3.0,
        }
    }
}

/// One verification run, as configured from JSON:
/// `{window, weights, checks, seed, points, mc_samples, tolerances, ...}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub window: IndexWindow,
    pub weights: serde_json::Value,
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_mc_samples")]
    pub mc_samples: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Swap in the rejected spelling of the right generator; the generator
    /// check then fails by construction, demonstrating the control.
    #[serde(default)]
    pub negative_control: bool,
}

fn default_seed() -> u64 {
    42
}
fn default_points() -> usize {
    200
}
fn default_mc_samples() -> usize {
    100_000
}

impl RunConfig {
    pub fn geometric_default(window: IndexWindow) -> Self {
        RunConfig {
            window,
            weights: WeightConfig::geometric(2.0).unwrap().to_json(),
            checks: Vec::new(),
            seed: default_seed(),
            points: default_points(),
            mc_samples: default_mc_samples(),
            tolerances: Tolerances::default(),
            negative_control: false,
        }
    }

    pub fn weight_config(&self) -> Result<WeightConfig> {
        WeightConfig::from_json(&self.weights)
    }
}

/// One suite entry: either a symbolic sweep or a numeric check.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SuiteCheck {
    Symbolic {
        name: String,
        pass: bool,
        checked: usize,
        residuals: usize,
        report: IdentityReport,
    },
    Numeric {
        name: String,
        pass: bool,
        report: NumericCheckReport,
    },
    Statistical {
        name: String,
        pass: bool,
        estimate: MCEstimate,
        target: f64,
        sigmas: f64,
    },
}

impl SuiteCheck {
    pub fn name(&self) -> &str {
        match self {
            SuiteCheck::Symbolic { name, .. }
            | SuiteCheck::Numeric { name, .. }
            | SuiteCheck::Statistical { name, .. } => name,
        }
    }

    pub fn passed(&self) -> bool {
        match self {
            SuiteCheck::Symbolic { pass, .. }
            | SuiteCheck::Numeric { pass, .. }
            | SuiteCheck::Statistical { pass, .. } => *pass,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub config: RunConfig,
    pub checks: Vec<SuiteCheck>,
    pub pass: bool,
}

fn symbolic(report: IdentityReport) -> SuiteCheck {
    SuiteCheck::Symbolic {
        name: report.name.clone(),
        pass: report.all_exact(),
        checked: report.checked_count(),
        residuals: report.residuals().count(),
        report,
    }
}

fn numeric(report: NumericCheckReport) -> SuiteCheck {
    SuiteCheck::Numeric {
        name: report.name.clone(),
        pass: report.pass,
        report,
    }
}

/// Run the selected checks (all of them when the list is empty).
pub fn run_suite(config: &RunConfig) -> Result<SuiteReport> {
    let cfg = config.weight_config()?;
    let window = config.window;
    let wants = |name: &str| config.checks.is_empty() || config.checks.iter().any(|c| c == name);
    let weights = RationalWeights::from_config(&cfg, window)?;
    let spec = Arc::new(GaussianSpec::new(&cfg, window)?);
    let points = spec.sample_clamped(config.points, config.seed, 1.5);
    let tol = config.tolerances;
    let mut checks = Vec::new();

    // The exact sweeps cost roughly 4^size through the inverse-coordinate
    // chains; past size 7 they run on a centered sub-window (recorded in the
    // report) instead of stalling the suite.
    let sym_window = if window.size() > 7 {
        let mid = (window.lo + window.hi) / 2;
        IndexWindow::new(mid - 3, mid + 4)?
    } else {
        window
    };
    let sym_weights = if sym_window == window {
        weights.clone()
    } else {
        RationalWeights::from_config(&cfg, sym_window)?
    };

    if wants("d_inverse") {
        checks.push(symbolic(verify_lemma_d_inverse(sym_window)));
    }
    if wants("ar_w") {
        checks.push(symbolic(verify_bracket_ar_w(&sym_weights)));
    }
    if wants("al_brackets") {
        checks.push(symbolic(verify_al_brackets(sym_window)));
    }
    if wants("triple_commutator") {
        checks.push(symbolic(verify_triple_commutator(&sym_weights)));
    }

    if wants("commutation") {
        let taus = default_group_elements(&spec, 10);
        checks.push(numeric(check_commutation(
            &spec,
            &taus,
            &points,
            tol.pointwise,
        )));
    }
    if wants("tgt") {
        let pairs = window.pairs();
        let (k0, n0) = pairs[0];
        let tau = UniMatrix::elementary(
            window,
            pairs[pairs.len() - 1].0,
            pairs[pairs.len() - 1].1,
            1.0,
        )
        .expect("pair on window");
        let g: TestFn = Arc::new(move |p| Complex64::new(p.x.get(k0, n0), 0.0));
        checks.push(numeric(check_tgt(&spec, &tau, &g, &points, tol.pointwise)));
    }
    if wants("u_consistency") {
        let elements = default_group_elements(&spec, 4);
        let tau = elements[elements.len() - 1].clone();
        let sigma = elements[0].clone();
        checks.push(numeric(check_u_consistency(
            &spec,
            &tau,
            &sigma,
            &points,
            tol.pointwise,
        )));
    }
    // The crossed-product phase checks involve weights along one row and one
    // column; centering the index pair keeps those weights moderate on wide
    // windows.
    let urm_pair = if window.lo <= -1 && window.hi >= 1 {
        (-1, 0)
    } else {
        (window.lo, window.lo + 1)
    };
    if wants("urm") {
        let (r, m) = urm_pair;
        checks.push(numeric(verify_urm(
            &spec,
            r,
            m,
            &[0.0, 0.7, -0.4, 1.3, 0.25],
            &points,
            tol.pointwise,
            tol.perturbation,
        )));
    }
    if wants("phase_commutators") {
        let (r, m) = urm_pair;
        let (report, _) =
            verify_phase_commutators(&spec, r, m, &[0.3, -0.5, 0.9], &points, tol.pointwise);
        checks.push(numeric(report));
    }
    if wants("generator_fd") {
        let pairs = window.pairs();
        let (p, q) = pairs[pairs.len() / 2];
        let h = 1e-4;
        checks.push(numeric(generator_fd_check(
            &spec,
            &weights,
            GeneratorSide::Right,
            p,
            q,
            &points,
            h,
            tol.generator_fd,
            config.negative_control,
        )));
        checks.push(numeric(generator_fd_check(
            &spec,
            &weights,
            GeneratorSide::Left,
            p,
            q,
            &points,
            h,
            tol.generator_fd,
            config.negative_control,
        )));
    }
    if wants("j_involution") {
        checks.push(numeric(check_j_involution(
            &spec,
            &points,
            tol.unit_modulus,
        )));
    }
    if wants("cocycle") {
        checks.push(numeric(check_cocycle(&spec, &points, tol.perturbation)));
    }
    if wants("delta_crosscheck") {
        checks.push(numeric(check_delta_crosscheck(
            &spec,
            &weights,
            &points,
            tol.perturbation,
        )));
    }
    if wants("mc_unitarity") {
        // Shift by under one standard deviation of the shifted coordinate:
        // the estimator is unbiased for any shift, but a shift of many sigma
        // parks all the mass where no finite sample reaches.
        let (k0, n0) = (window.lo, window.lo + 1);
        let tau = UniMatrix::elementary(window, k0, n0, 0.8 * spec.variance(k0, n0).sqrt())
            .expect("pair on window");
        for (i, (name, f)) in super::evaluator::dictionary(&spec)
            .into_iter()
            .take(5)
            .enumerate()
        {
            let est = check_unitarity(&spec, &tau, &f, config.mc_samples, config.seed + i as u64);
            checks.push(SuiteCheck::Statistical {
                name: format!("mc_unitarity[{name}]"),
                pass: est.consistent_with_zero(tol.mc_sigmas),
                estimate: est,
                target: 0.0,
                sigmas: tol.mc_sigmas,
            });
        }
    }
    if wants("moments") {
        let pairs = window.pairs();
        for &(k, n) in [pairs[0], pairs[pairs.len() - 1]].iter() {
            let est = second_moment(&spec, k, n, config.mc_samples, config.seed);
            checks.push(SuiteCheck::Statistical {
                name: format!("moment[x({k},{n})^2]"),
                pass: est.consistent_with(spec.variance(k, n), 5.0),
                estimate: est,
                target: spec.variance(k, n),
                sigmas: 5.0,
            });
        }
    }

    let pass = checks.iter().all(SuiteCheck::passed);
    Ok(SuiteReport {
        config: config.clone(),
        checks,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_runs_green_on_a_small_window() {
        let mut config = RunConfig::geometric_default(IndexWindow::new(-1, 2).unwrap());
        config.points = 40;
        config.mc_samples = 20_000;
        config.tolerances.mc_sigmas = 5.0;
        let report = run_suite(&config).unwrap();
        for c in &report.checks {
            assert!(c.passed(), "check {} failed", c.name());
        }
        assert!(report.pass);
    }

    #[test]
    fn check_filtering_produces_a_single_entry() {
        let mut config = RunConfig::geometric_default(IndexWindow::new(0, 2).unwrap());
        config.checks = vec!["triple_commutator".into()];
        let report = run_suite(&config).unwrap();
        assert_eq!(report.checks.len(), 1);
        assert_eq!(report.checks[0].name(), "triple_commutator");
    }

    #[test]
    fn negative_control_fails_the_generator_check() {
        let mut config = RunConfig::geometric_default(IndexWindow::new(-1, 1).unwrap());
        config.checks = vec!["generator_fd".into()];
        config.points = 30;
        config.negative_control = true;
        let report = run_suite(&config).unwrap();
        assert!(!report.pass);
        assert!(report
            .checks
            .iter()
            .any(|c| c.name() == "generator_fd_misprint" && !c.passed()));
    }

    #[test]
    fn run_config_round_trips_through_json() {
        let config = RunConfig::geometric_default(IndexWindow::new(-3, 3).unwrap());
        let text = serde_json::to_string(&config).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back.window, config.window);
        assert_eq!(back.seed, config.seed);
    }
}
