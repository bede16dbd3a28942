//! Aggregation of the series estimates into a classification report: which
//! measure-theoretic properties of the weight family hold on a window, each
//! verdict citing the estimates it rests on.

use crate::error::Result;
use crate::series::{
    e_m, e_total, s_left, s_right, s_right_left, sigma, ERoute, SeriesEstimate, TruncationBudget,
    Verdict,
};
use crate::weights::WeightConfig;
use crate::window::IndexWindow;
use rayon::prelude::*;
use serde::Serialize;

/// One cited estimate.
#[derive(Clone, Debug, Serialize)]
pub struct LabeledEstimate {
    pub label: String,
    pub estimate: SeriesEstimate,
}

/// Verdict counts over the window pairs.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct VerdictTally {
    pub convergent: usize,
    pub divergent: usize,
    pub undecided: usize,
}

impl VerdictTally {
    fn add(&mut self, v: Verdict) {
        match v {
            Verdict::Convergent => self.convergent += 1,
            Verdict::Divergent => self.divergent += 1,
            Verdict::Undecided => self.undecided += 1,
        }
    }

    fn aggregate(&self) -> Verdict {
        if self.undecided > 0 {
            Verdict::Undecided
        } else if self.divergent > 0 {
            Verdict::Divergent
        } else {
            Verdict::Convergent
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub name: String,
    /// The mathematical criterion the verdict rests on.
    pub criterion: String,
    pub verdict: Verdict,
    pub tally: VerdictTally,
    /// Whether the named property holds; None when undecided or mixed.
    pub condition_met: Option<bool>,
    pub consequence: String,
    pub estimates: Vec<LabeledEstimate>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub window: IndexWindow,
    pub weights: serde_json::Value,
    pub budget: TruncationBudget,
    pub conditions: Vec<ConditionReport>,
    pub summary: Vec<String>,
    pub all_decided: bool,
}

fn sweep(
    window: IndexWindow,
    label: &str,
    eval: impl Fn(i32, i32) -> Result<SeriesEstimate> + Sync,
) -> Result<(VerdictTally, Vec<LabeledEstimate>)> {
    let pairs = window.pairs();
    let estimates: Result<Vec<LabeledEstimate>> = pairs
        .par_iter()
        .map(|&(k, n)| {
            Ok(LabeledEstimate {
                label: format!("{label}({k},{n})"),
                estimate: eval(k, n)?,
            })
        })
        .collect();
    let estimates = estimates?;
    let mut tally = VerdictTally::default();
    for e in &estimates {
        tally.add(e.estimate.verdict);
    }
    Ok((tally, estimates))
}

/// Evaluate every condition on the window and assemble the report.
pub fn classify(
    cfg: &WeightConfig,
    window: IndexWindow,
    budget: &TruncationBudget,
) -> Result<ClassificationReport> {
    let mut conditions = Vec::new();
    let mut summary = Vec::new();

    // Right quasi-invariance: S^R_kn < infinity for every pair.
    let (tally, estimates) = sweep(window, "S^R", |k, n| s_right(cfg, k, n, budget))?;
    let verdict = tally.aggregate();
    let met = match verdict {
        Verdict::Convergent => Some(true),
        Verdict::Divergent => Some(false),
        Verdict::Undecided => None,
    };
    summary.push(match met {
        Some(true) => "S^R_kn convergent on the window: right quasi-invariance holds".into(),
        Some(false) => "S^R_kn divergent: some right translate gives an orthogonal measure".into(),
        None => "right quasi-invariance undecided".into(),
    });
    conditions.push(ConditionReport {
        name: "right_quasi_invariance".into(),
        criterion: "measure equivalent to all right translates iff S^R_kn < infinity \
                    for every k < n"
            .into(),
        verdict,
        tally,
        condition_met: met,
        consequence: match met {
            Some(true) => "right regular representation is defined".into(),
            Some(false) => "right regular representation undefined for some generators".into(),
            None => "no certificate either way".into(),
        },
        estimates,
    });

    // Left quasi-invariance: S^L_kn < infinity for every pair; divergence of
    // any single S^L_kn makes the corresponding translates orthogonal.
    let (tally, estimates) = sweep(window, "S^L", |k, n| s_left(cfg, k, n, budget))?;
    let verdict = tally.aggregate();
    let met = match verdict {
        Verdict::Convergent => Some(true),
        Verdict::Divergent => Some(false),
        Verdict::Undecided => None,
    };
    summary.push(match met {
        Some(true) => "S^L_kn convergent on the window: left quasi-invariance holds".into(),
        Some(false) => "S^L_kn divergent: left translates give orthogonal measures \
                        and the left regular representation is undefined"
            .into(),
        None => "left quasi-invariance undecided".into(),
    });
    conditions.push(ConditionReport {
        name: "left_quasi_invariance".into(),
        criterion: "measure equivalent to all left translates iff S^L_kn < infinity \
                    for every k < n; a divergent S^L_kn makes the translates orthogonal"
            .into(),
        verdict,
        tally,
        condition_met: met,
        consequence: match met {
            Some(true) => "left regular representation is defined".into(),
            Some(false) => "translated measure orthogonal to the original".into(),
            None => "no certificate either way".into(),
        },
        estimates,
    });

    // Inversion equivalence via E(b), evaluated by all three routes.
    let routes = [
        ("E triple sum", e_total(cfg, budget, ERoute::Triple)),
        ("E via sum S^L/b", e_total(cfg, budget, ERoute::ViaLeft)),
        ("E via sum S^R/b", e_total(cfg, budget, ERoute::ViaRight)),
    ];
    let mut tally = VerdictTally::default();
    for (_, est) in &routes {
        tally.add(est.verdict);
    }
    let routes_consistent = routes[0].1.consistent_with(&routes[1].1)
        && routes[0].1.consistent_with(&routes[2].1)
        && routes[1].1.consistent_with(&routes[2].1);
    let verdict = tally.aggregate();
    let met = match verdict {
        Verdict::Convergent => Some(true),
        Verdict::Divergent => Some(false),
        Verdict::Undecided => None,
    };
    let e_convergent = met == Some(true);
    summary.push(match met {
        Some(true) => "E(b) convergent; inversion equivalence holds; \
                       commutation theorem applies; type III_1 factor expected"
            .into(),
        Some(false) => "E(b) divergent: inversion equivalence not certified by this route".into(),
        None => "E(b) undecided".into(),
    });
    conditions.push(ConditionReport {
        name: "inversion_equivalence".into(),
        criterion: "E(b) < infinity implies the measure is equivalent to its inversion \
                    pushforward, the commutation theorem holds, and the generated \
                    von Neumann algebra is the hyperfinite type III_1 factor"
            .into(),
        verdict,
        tally,
        condition_met: met,
        consequence: if e_convergent {
            format!(
                "three evaluation routes {}",
                if routes_consistent {
                    "agree within combined tails"
                } else {
                    "DISAGREE: numerical defect"
                }
            )
        } else {
            "commutation theorem not certified".into()
        },
        estimates: routes
            .into_iter()
            .map(|(label, estimate)| LabeledEstimate {
                label: label.into(),
                estimate,
            })
            .collect(),
    });

    // Ergodicity carries only a sufficient condition: E_m(b) < infinity for
    // all m, which E(b) < infinity dominates. Never report "ergodic".
    let em = e_m(cfg, window.hi, budget);
    let (verdict, met) = if e_convergent {
        (Verdict::Convergent, Some(true))
    } else {
        match em.verdict {
            Verdict::Divergent => (Verdict::Divergent, Some(false)),
            v => (v, None),
        }
    };
    let mut tally = VerdictTally::default();
    tally.add(em.verdict);
    summary.push(match met {
        Some(true) => "ergodicity sufficient condition met (E_m(b) finite for every m)".into(),
        Some(false) => "ergodicity sufficient condition unmet (E_m(b) divergent)".into(),
        None => "ergodicity sufficient condition undecided".into(),
    });
    conditions.push(ConditionReport {
        name: "ergodicity_sufficient_condition".into(),
        criterion: "E_m(b) < infinity for all m is sufficient for right ergodicity; \
                    no criterion is known, so the verdict concerns the sufficient \
                    condition only"
            .into(),
        verdict,
        tally,
        condition_met: met,
        consequence: "reported as condition met/unmet, never as ergodic/not ergodic".into(),
        estimates: vec![LabeledEstimate {
            label: format!("E_m(b) at m = {}", window.hi),
            estimate: em,
        }],
    });

    // Irreducibility series: the right regular representation is irreducible
    // only if sigma_kn diverges for every pair.
    let (tally, estimates) = sweep(window, "sigma", |k, n| sigma(cfg, k, n, budget))?;
    let met = if tally.undecided > 0 {
        None
    } else {
        Some(tally.convergent == 0)
    };
    summary.push(match met {
        Some(true) => "sigma_kn divergent on the window: irreducibility condition met".into(),
        Some(false) => {
            "sigma_kn convergent somewhere: irreducibility condition (sigma = infinity) not met"
                .into()
        }
        None => "irreducibility series undecided".into(),
    });
    conditions.push(ConditionReport {
        name: "irreducibility_series".into(),
        criterion: "irreducibility of the right regular representation requires \
                    sigma_kn = infinity for every k < n (with orthogonal left \
                    translates and ergodicity)"
            .into(),
        verdict: tally.aggregate(),
        tally,
        condition_met: met,
        consequence: match met {
            Some(true) => "points toward an irreducible representation (type I setting)".into(),
            Some(false) => "representation not irreducible by this test".into(),
            None => "no certificate either way".into(),
        },
        estimates,
    });

    // Factor condition through the two-sided series S^{R,L}.
    let (tally, estimates) = sweep(window, "S^{R,L}", |k, n| s_right_left(cfg, k, n, budget))?;
    let met = if tally.undecided > 0 {
        None
    } else {
        Some(tally.convergent == 0)
    };
    summary.push(match met {
        Some(true) => "S^{R,L}_kn divergent on the window: factor condition met".into(),
        Some(false) => {
            let mut line = String::from(
                "S^{R,L}_kn convergent somewhere: this sufficient factor condition not met",
            );
            if e_convergent {
                line.push_str("; E(b) < infinity already gives the factor property");
            }
            line
        }
        None => "factor series undecided".into(),
    });
    conditions.push(ConditionReport {
        name: "factor_series".into(),
        criterion: "S^{R,L}_kn = infinity for every k < n (plus ergodicity) is \
                    sufficient for the generated algebra to be a factor; \
                    E(b) < infinity suffices on its own"
            .into(),
        verdict: tally.aggregate(),
        tally,
        condition_met: met,
        consequence: "informational; the inversion-equivalence condition already \
                      settles the factor question when E(b) converges"
            .into(),
        estimates,
    });

    let all_decided = conditions
        .iter()
        .all(|c| c.verdict != Verdict::Undecided || c.condition_met.is_some());

    Ok(ClassificationReport {
        window,
        weights: cfg.to_json(),
        budget: *budget,
        conditions,
        summary,
        all_decided,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn geometric_two_gives_the_expected_chain() {
        let cfg = WeightConfig::geometric(2.0).unwrap();
        let w = IndexWindow::new(-3, 3).unwrap();
        let report = classify(&cfg, w, &TruncationBudget::default()).unwrap();
        assert!(report.all_decided);
        let text = report.summary.join("; ");
        assert!(text.contains("right quasi-invariance holds"));
        assert!(text.contains("left quasi-invariance holds"));
        assert!(text.contains("E(b) convergent"));
        assert!(text.contains("commutation theorem applies"));
        assert!(text.contains("type III_1 factor expected"));
        let inv = &report.conditions[2];
        assert_eq!(inv.condition_met, Some(true));
        assert!(inv.consequence.contains("agree within combined tails"));
    }

    #[test]
    fn decreasing_power_family_kills_left_invariance() {
        let cfg = WeightConfig::power_scaled(1.0, 0.5).unwrap();
        let w = IndexWindow::new(-2, 2).unwrap();
        let report = classify(&cfg, w, &TruncationBudget::default()).unwrap();
        let left = &report.conditions[1];
        assert_eq!(left.condition_met, Some(false));
        assert!(left.consequence.contains("orthogonal"));
    }

    #[test]
    fn table_config_is_fully_decided() {
        let cfg = WeightConfig::table(BTreeMap::from([
            ((0, 1), 1.0),
            ((0, 2), 2.0),
            ((1, 2), 4.0),
        ]))
        .unwrap();
        let w = IndexWindow::new(0, 2).unwrap();
        let report = classify(&cfg, w, &TruncationBudget::default()).unwrap();
        for c in &report.conditions {
            assert_ne!(c.verdict, Verdict::Undecided, "{}", c.name);
        }
        assert!(report.all_decided);
    }

    #[test]
    fn report_serializes() {
        let cfg = WeightConfig::geometric(2.0).unwrap();
        let w = IndexWindow::new(-1, 1).unwrap();
        let report = classify(&cfg, w, &TruncationBudget::default()).unwrap();
        let v = serde_json::to_value(&report).unwrap();
        assert_eq!(v["conditions"][0]["name"], "right_quasi_invariance");
        assert!(v["summary"].as_array().unwrap().len() >= 5);
    }
}
