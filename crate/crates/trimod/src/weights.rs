//! Positive weight families `b = (b_kn)_{k<n}` and their exact-rational and
//! binary64 snapshots on a window.
//!
//! Three kinds are understood:
//!
//! * `table` — finitely many explicit entries;
//! * `power` — `b_kn = (a_k)^n`, with the base sequence `a` given either as
//!   an explicit table or parametrically as `a_k = c s^k`;
//! * `geometric` — `b_kn = (s^k)^n` with `s > 1`, the worked example family.

use crate::error::{Error, Result};
use crate::matrix::f64_to_rational;
use crate::window::IndexWindow;
use num::{BigRational, One};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Base sequence `a` of a power family `b_kn = (a_k)^n`.
#[derive(Clone, Debug, PartialEq)]
pub enum PowerBase {
    /// Parametric `a_k = c * s^k`, `c > 0`, `s > 0`.
    Scaled { c: f64, s: f64 },
    /// Explicit values; queries outside the table are refused.
    Table(BTreeMap<i32, f64>),
}

/// A weight family.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightConfig {
    Geometric { s: f64 },
    Power { a: PowerBase },
    Table { entries: BTreeMap<(i32, i32), f64> },
}

impl WeightConfig {
    pub fn geometric(s: f64) -> Result<Self> {
        if !s.is_finite() || s <= 1.0 || s.is_nan() {
            return Err(Error::BadConfig(format!(
                "geometric family requires s > 1, got {s}"
            )));
        }
        Ok(WeightConfig::Geometric { s })
    }

    pub fn power_scaled(c: f64, s: f64) -> Result<Self> {
        if !c.is_finite() || !s.is_finite() || c <= 0.0 || s <= 0.0 {
            return Err(Error::BadConfig(format!(
                "power family a_k = c*s^k requires c > 0 and s > 0, got c={c}, s={s}"
            )));
        }
        Ok(WeightConfig::Power {
            a: PowerBase::Scaled { c, s },
        })
    }

    pub fn power_table(a: BTreeMap<i32, f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::BadConfig("empty power base table".into()));
        }
        if let Some((k, v)) = a.iter().find(|(_, v)| v.is_nan() || **v <= 0.0) {
            return Err(Error::BadConfig(format!("a_{k} = {v} is not positive")));
        }
        Ok(WeightConfig::Power {
            a: PowerBase::Table(a),
        })
    }

    pub fn table(entries: BTreeMap<(i32, i32), f64>) -> Result<Self> {
        for (&(k, n), &v) in &entries {
            if k >= n {
                return Err(Error::BadWeightIndex { k, n });
            }
            if v.is_nan() || v <= 0.0 {
                return Err(Error::BadConfig(format!(
                    "b({k},{n}) = {v} is not positive"
                )));
            }
        }
        Ok(WeightConfig::Table { entries })
    }

    /// The weight `b_kn`.
    pub fn b_value(&self, k: i32, n: i32) -> Result<f64> {
        if k >= n {
            return Err(Error::BadWeightIndex { k, n });
        }
        let v = match self {
            WeightConfig::Geometric { s } => s.powi(k.checked_mul(n).expect("index overflow")),
            WeightConfig::Power { a } => match a {
                PowerBase::Scaled { c, s } => (c * s.powi(k)).powi(n),
                PowerBase::Table(t) => t.get(&k).ok_or(Error::MissingWeight { k, n })?.powi(n),
            },
            WeightConfig::Table { entries } => {
                *entries.get(&(k, n)).ok_or(Error::MissingWeight { k, n })?
            }
        };
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::BadConfig(format!(
                "b({k},{n}) evaluated to {v}; weights must be positive finite"
            )));
        }
        Ok(v)
    }

    /// `Some((beta, gamma))` when `b_kn = beta^n * gamma^(k n)` exactly, the
    /// shape for which certified series tails exist.
    pub fn geometric_shape(&self) -> Option<(f64, f64)> {
        match self {
            WeightConfig::Geometric { s } => Some((1.0, *s)),
            WeightConfig::Power {
                a: PowerBase::Scaled { c, s },
            } => Some((*c, *s)),
            _ => None,
        }
    }

    // ---- JSON wire format --------------------------------------------

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let repr: ConfigRepr = serde_json::from_value(v.clone())?;
        repr.validate()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let repr: ConfigRepr = serde_json::from_str(s)?;
        repr.validate()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let repr = match self {
            WeightConfig::Geometric { s } => ConfigRepr::Geometric { s: *s },
            WeightConfig::Power { a } => ConfigRepr::Power {
                a: match a {
                    PowerBase::Scaled { c, s } => {
                        serde_json::json!({ "c": c, "s": s })
                    }
                    PowerBase::Table(t) => serde_json::Value::Object(
                        t.iter()
                            .map(|(k, v)| (k.to_string(), serde_json::json!(v)))
                            .collect(),
                    ),
                },
            },
            WeightConfig::Table { entries } => ConfigRepr::Table {
                entries: entries.iter().map(|(&(k, n), &b)| (k, n, b)).collect(),
            },
        };
        serde_json::to_value(repr).expect("config serialization")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
enum ConfigRepr {
    Geometric { s: f64 },
    Power { a: serde_json::Value },
    Table { entries: Vec<(i32, i32, f64)> },
}

impl ConfigRepr {
    fn validate(self) -> Result<WeightConfig> {
        match self {
            ConfigRepr::Geometric { s } => WeightConfig::geometric(s),
            ConfigRepr::Power { a } => {
                let obj = a
                    .as_object()
                    .ok_or_else(|| Error::BadConfig("power base 'a' must be an object".into()))?;
                let parametric = obj.contains_key("c") || obj.contains_key("s");
                if parametric {
                    let get = |key: &str| -> Result<f64> {
                        obj.get(key)
                            .and_then(serde_json::Value::as_f64)
                            .ok_or_else(|| {
                                Error::BadConfig(format!("power base needs numeric '{key}'"))
                            })
                    };
                    WeightConfig::power_scaled(get("c")?, get("s")?)
                } else {
                    let mut t = BTreeMap::new();
                    for (key, val) in obj {
                        let k: i32 = key.parse().map_err(|_| {
                            Error::BadConfig(format!("power base key '{key}' is not an integer"))
                        })?;
                        let v = val
                            .as_f64()
                            .ok_or_else(|| Error::BadConfig(format!("a_{key} is not a number")))?;
                        t.insert(k, v);
                    }
                    WeightConfig::power_table(t)
                }
            }
            ConfigRepr::Table { entries } => {
                let mut map = BTreeMap::new();
                for (k, n, b) in entries {
                    if map.insert((k, n), b).is_some() {
                        return Err(Error::BadConfig(format!("duplicate entry ({k},{n})")));
                    }
                }
                WeightConfig::table(map)
            }
        }
    }
}

/// Exact-rational snapshot of a weight family on a window. Weights given as
/// binary64 are rationalized exactly (every finite float is a dyadic
/// rational), so symbolic identities hold with no rounding at all.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalWeights {
    window: IndexWindow,
    b: BTreeMap<(i32, i32), BigRational>,
}

impl RationalWeights {
    pub fn from_config(cfg: &WeightConfig, window: IndexWindow) -> Result<Self> {
        let mut b = BTreeMap::new();
        for (k, n) in window.pairs() {
            b.insert((k, n), exact_b(cfg, k, n)?);
        }
        Ok(RationalWeights { window, b })
    }

    /// All weights equal to one; commutators with pure multiplication
    /// operators do not depend on `b`, and this keeps those sweeps cheap.
    pub fn ones(window: IndexWindow) -> Self {
        let b = window
            .pairs()
            .into_iter()
            .map(|kn| (kn, BigRational::one()))
            .collect();
        RationalWeights { window, b }
    }

    pub fn window(&self) -> IndexWindow {
        self.window
    }

    pub fn get(&self, k: i32, n: i32) -> BigRational {
        self.b
            .get(&(k, n))
            .cloned()
            .unwrap_or_else(|| panic!("b({k},{n}) not on window {}", self.window))
    }
}

fn exact_b(cfg: &WeightConfig, k: i32, n: i32) -> Result<BigRational> {
    let v = match cfg {
        WeightConfig::Geometric { s } => f64_to_rational(*s).pow(k * n),
        WeightConfig::Power { a } => match a {
            PowerBase::Scaled { c, s } => (f64_to_rational(*c) * f64_to_rational(*s).pow(k)).pow(n),
            PowerBase::Table(t) => {
                f64_to_rational(*t.get(&k).ok_or(Error::MissingWeight { k, n })?).pow(n)
            }
        },
        WeightConfig::Table { entries } => {
            f64_to_rational(*entries.get(&(k, n)).ok_or(Error::MissingWeight { k, n })?)
        }
    };
    Ok(v)
}

/// Binary64 snapshot used by the numeric layer.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatWeights {
    window: IndexWindow,
    b: BTreeMap<(i32, i32), f64>,
}

impl FloatWeights {
    pub fn from_config(cfg: &WeightConfig, window: IndexWindow) -> Result<Self> {
        let mut b = BTreeMap::new();
        for (k, n) in window.pairs() {
            b.insert((k, n), cfg.b_value(k, n)?);
        }
        Ok(FloatWeights { window, b })
    }

    pub fn window(&self) -> IndexWindow {
        self.window
    }

    pub fn get(&self, k: i32, n: i32) -> f64 {
        *self
            .b
            .get(&(k, n))
            .unwrap_or_else(|| panic!("b({k},{n}) not on window {}", self.window))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(i32, i32), &f64)> {
        self.b.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_values() {
        let cfg = WeightConfig::geometric(2.0).unwrap();
        // b_kn = (2^k)^n
        assert_eq!(cfg.b_value(0, 1).unwrap(), 1.0);
        assert_eq!(cfg.b_value(1, 2).unwrap(), 4.0);
        assert_eq!(cfg.b_value(-1, 2).unwrap(), 0.25);
        assert!(cfg.b_value(1, 1).is_err());
        assert!(cfg.b_value(2, 1).is_err());
    }

    #[test]
    fn geometric_requires_s_above_one() {
        assert!(WeightConfig::geometric(1.0).is_err());
        assert!(WeightConfig::geometric(0.5).is_err());
        assert!(WeightConfig::from_json_str(r#"{"family":"geometric","s":1.0}"#).is_err());
    }

    #[test]
    fn table_returns_stored_entries_verbatim() {
        let cfg = WeightConfig::table(BTreeMap::from([((0, 1), 3.5)])).unwrap();
        assert_eq!(cfg.b_value(0, 1).unwrap(), 3.5);
        assert!(matches!(
            cfg.b_value(0, 2),
            Err(Error::MissingWeight { k: 0, n: 2 })
        ));
    }

    #[test]
    fn json_forms_round_trip() {
        let geo = WeightConfig::from_json_str(r#"{"family":"geometric","s":2.0}"#).unwrap();
        assert_eq!(geo, WeightConfig::geometric(2.0).unwrap());
        assert_eq!(WeightConfig::from_json(&geo.to_json()).unwrap(), geo);

        let scaled =
            WeightConfig::from_json_str(r#"{"family":"power","a":{"c":1.0,"s":0.5}}"#).unwrap();
        assert_eq!(scaled.geometric_shape(), Some((1.0, 0.5)));

        let tab =
            WeightConfig::from_json_str(r#"{"family":"power","a":{"-1":0.5,"0":1.0}}"#).unwrap();
        assert_eq!(tab.b_value(-1, 1).unwrap(), 0.5);
        assert_eq!(WeightConfig::from_json(&tab.to_json()).unwrap(), tab);

        let ent =
            WeightConfig::from_json_str(r#"{"family":"table","entries":[[0,1,2.0],[0,2,0.125]]}"#)
                .unwrap();
        assert_eq!(ent.b_value(0, 2).unwrap(), 0.125);
        assert!(
            WeightConfig::from_json_str(r#"{"family":"table","entries":[[1,0,2.0]]}"#).is_err()
        );
    }

    #[test]
    fn exact_snapshot_matches_float_one() {
        let cfg = WeightConfig::geometric(2.0).unwrap();
        let w = IndexWindow::new(-2, 2).unwrap();
        let exact = RationalWeights::from_config(&cfg, w).unwrap();
        let float = FloatWeights::from_config(&cfg, w).unwrap();
        for (k, n) in w.pairs() {
            assert_eq!(
                crate::matrix::rational_to_f64(&exact.get(k, n)),
                float.get(k, n)
            );
        }
        // b(-2, 2) = 2^-4 exactly.
        assert_eq!(exact.get(-2, 2), BigRational::new(1.into(), 16.into()));
    }
}
