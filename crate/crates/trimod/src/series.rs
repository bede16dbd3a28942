//! Certified evaluation of the convergence series attached to a weight
//! family: the right and left translation series `S^R_kn`, `S^L_kn`, the
//! inversion series `E(b)` and its truncations `E_m(b)`, the irreducibility
//! series `sigma_kn` and the two-sided series `S^{R,L}_kn`.
//!
//! Every estimate is a partial sum plus a certified remainder: for a
//! convergent verdict the true value lies in
//! `[partial_sum, partial_sum + tail_bound]`. Closed-form tails exist for
//! weight families of the shape `b_kn = beta^n gamma^(kn)` with `gamma > 1`
//! (the geometric family has `beta = 1`) and for finite tables; a divergent
//! verdict is issued only with a certificate (ratio at least one, or terms
//! bounded below along the whole tail); anything else is refused as
//! undecided rather than guessed.

use crate::error::{Error, Result};
use crate::interval::Iv;
use crate::weights::{PowerBase, WeightConfig};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// Summation effort: index radius, term cap, and the tail size at which a
/// partial sum may stop early.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TruncationBudget {
    pub radius: u32,
    pub max_terms: u64,
    pub target_tail: f64,
}

impl Default for TruncationBudget {
    fn default() -> Self {
        TruncationBudget {
            radius: 48,
            max_terms: 200_000,
            target_tail: 1e-13,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Convergent,
    Divergent,
    Undecided,
}

/// Partial sum with certified enclosure and remainder.
#[derive(Clone, Debug)]
pub struct SeriesEstimate {
    partial: Iv,
    remainder: f64,
    pub terms_used: u64,
    pub verdict: Verdict,
    pub note: Option<String>,
}

impl SeriesEstimate {
    fn convergent(partial: Iv, remainder: f64, terms_used: u64) -> Self {
        SeriesEstimate {
            partial,
            remainder,
            terms_used,
            verdict: Verdict::Convergent,
            note: None,
        }
    }

    fn divergent(partial: Iv, terms_used: u64, certificate: impl Into<String>) -> Self {
        SeriesEstimate {
            partial,
            remainder: f64::INFINITY,
            terms_used,
            verdict: Verdict::Divergent,
            note: Some(certificate.into()),
        }
    }

    fn undecided(partial: Iv, terms_used: u64, reason: impl Into<String>) -> Self {
        SeriesEstimate {
            partial,
            remainder: f64::INFINITY,
            terms_used,
            verdict: Verdict::Undecided,
            note: Some(reason.into()),
        }
    }

    pub fn partial_sum(&self) -> f64 {
        self.partial.lo
    }

    /// Covers both the series remainder and the accumulated rounding width.
    pub fn tail_bound(&self) -> f64 {
        if self.remainder.is_infinite() {
            f64::INFINITY
        } else {
            (self.partial.width() + self.remainder).next_up()
        }
    }

    /// Certified enclosure `[lo, hi]` of the exact value (convergent only).
    pub fn bracket(&self) -> (f64, f64) {
        (self.partial.lo, self.partial.hi + self.remainder)
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.bracket();
        lo <= x && x <= hi
    }

    /// Do two enclosures overlap? (Consistency of two evaluation routes.)
    pub fn consistent_with(&self, other: &SeriesEstimate) -> bool {
        let (alo, ahi) = self.bracket();
        let (blo, bhi) = other.bracket();
        alo <= bhi && blo <= ahi
    }
}

impl Serialize for SeriesEstimate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SeriesEstimate", 5)?;
        st.serialize_field("verdict", &self.verdict)?;
        st.serialize_field("partial_sum", &self.partial_sum())?;
        st.serialize_field("tail_bound", &self.tail_bound())?;
        st.serialize_field("terms_used", &self.terms_used)?;
        st.serialize_field("note", &self.note)?;
        st.end()
    }
}

// ---------------------------------------------------------------------------
// Closed forms for the geometric shape b_kn = beta^n gamma^(kn)
// ---------------------------------------------------------------------------

#[derive(Clone, Copy)]
struct GeoShape {
    beta: Iv,
    gamma: Iv,
}

fn geo_shape(cfg: &WeightConfig) -> Option<GeoShape> {
    cfg.geometric_shape().map(|(beta, gamma)| GeoShape {
        beta: Iv::point(beta),
        gamma: Iv::point(gamma),
    })
}

impl GeoShape {
    fn expanding(&self) -> bool {
        self.gamma.lo > 1.0
    }

    /// `gamma / (gamma - 1)`, the uniform bound for `1 / (1 - gamma^{-d})`,
    /// `d >= 1`.
    fn denom_cap(&self) -> Iv {
        self.gamma.div(&self.gamma.sub(&Iv::ONE))
    }

    /// `sum_{r <= r0} gamma^(r d)` for `d >= 1`.
    fn lower_geometric_tail(&self, r0: i64, d: i64) -> Iv {
        let u = self.gamma.powi(d);
        self.gamma.powi(r0 * d).mul(&u.div(&u.sub(&Iv::ONE)))
    }

    /// `sum_{m >= m0} rho^m` for `rho = gamma^{-d} < 1`.
    fn upper_geometric_tail(&self, m0: i64, d: i64) -> Iv {
        let rho = self.gamma.powi(-d);
        rho.powi(m0).div(&Iv::ONE.sub(&rho))
    }

    /// `S^R_kn / b_kn` as a closed-form interval:
    /// `beta^{-k} gamma^{-n - k^2 + k} / (1 - gamma^{-(n-k)})`.
    fn rho_right(&self, k: i64, n: i64) -> Iv {
        let num = self.beta.powi(-k).mul(&self.gamma.powi(-n - k * k + k));
        let den = Iv::ONE.sub(&self.gamma.powi(-(n - k)));
        num.div(&den)
    }

    /// `S^L_kn / b_kn` as a closed-form interval:
    /// `beta^{-n} gamma^{k - n^2 - n} / (1 - gamma^{-(n-k)})`.
    fn rho_left(&self, k: i64, n: i64) -> Iv {
        let num = self.beta.powi(-n).mul(&self.gamma.powi(k - n * n - n));
        let den = Iv::ONE.sub(&self.gamma.powi(-(n - k)));
        num.div(&den)
    }

    /// `Theta = sum_{n in Z} beta^{-n} gamma^{e(n)}` for a concave quadratic
    /// exponent `e`, with certified geometric bounds on both tails. Returns
    /// None when no summation radius yields a tail ratio below one half.
    fn theta(&self, e: impl Fn(i64) -> i64) -> Option<Iv> {
        let term = |n: i64| self.beta.powi(-n).mul(&self.gamma.powi(e(n)));
        for radius in [8i64, 16, 32, 64, 128] {
            // Ratio of successive terms is beta^{-1} gamma^{e(n+1)-e(n)},
            // decreasing in n since e is concave.
            let q_up = self
                .beta
                .recip()
                .mul(&self.gamma.powi(e(radius + 1) - e(radius)));
            let q_dn = self.beta.mul(&self.gamma.powi(e(-radius - 1) - e(-radius)));
            if !(q_up.hi < 0.5 && q_dn.hi < 0.5) {
                continue;
            }
            let mut sum = Iv::ZERO;
            for n in -radius..=radius {
                sum = sum.add(&term(n));
            }
            let tail_up = term(radius + 1).div(&Iv::ONE.sub(&q_up));
            let tail_dn = term(-radius - 1).div(&Iv::ONE.sub(&q_dn));
            sum = sum
                .add(&Iv::new(0.0, tail_up.hi))
                .add(&Iv::new(0.0, tail_dn.hi));
            return Some(sum);
        }
        None
    }
}

// ---------------------------------------------------------------------------
// S^R and S^L
// ---------------------------------------------------------------------------

fn check_pair(k: i32, n: i32) -> Result<()> {
    if k < n {
        Ok(())
    } else {
        Err(Error::BadWeightIndex { k, n })
    }
}

/// `S^R_kn(b) = sum_{r=-infinity}^{k-1} b_rn / b_rk`.
pub fn s_right(
    cfg: &WeightConfig,
    k: i32,
    n: i32,
    budget: &TruncationBudget,
) -> Result<SeriesEstimate> {
    check_pair(k, n)?;
    let (k64, n64) = (k as i64, n as i64);
    if let Some(g) = geo_shape(cfg) {
        let d = n64 - k64;
        let beta_pow = g.beta.powi(d);
        if !g.expanding() {
            // Terms grow (or stay constant) as r decreases; the term at
            // r = k-1 is a positive lower bound for the entire tail.
            let floor = beta_pow.mul(&g.gamma.powi((k64 - 1) * d));
            let mut sum = Iv::ZERO;
            for r in (k64 - budget.radius as i64)..k64 {
                sum = sum.add(&beta_pow.mul(&g.gamma.powi(r * d)));
            }
            return Ok(SeriesEstimate::divergent(
                sum,
                budget.radius as u64,
                format!(
                    "terms b_rn/b_rk are nondecreasing as r decreases and at least {:.3e}",
                    floor.lo
                ),
            ));
        }
        let mut sum = Iv::ZERO;
        let mut terms = 0u64;
        let mut r = k64 - 1;
        let lowest = k64 - budget.radius as i64;
        loop {
            let remainder = beta_pow.mul(&g.lower_geometric_tail(r, d));
            if (remainder.hi <= budget.target_tail && terms > 0)
                || r < lowest
                || terms >= budget.max_terms
            {
                return Ok(SeriesEstimate::convergent(sum, remainder.hi, terms));
            }
            sum = sum.add(&beta_pow.mul(&g.gamma.powi(r * d)));
            terms += 1;
            r -= 1;
        }
    }
    match cfg {
        WeightConfig::Table { entries } => {
            let mut sum = Iv::ZERO;
            let mut terms = 0;
            let rows: std::collections::BTreeSet<i32> =
                entries.keys().map(|&(r, _)| r).filter(|&r| r < k).collect();
            for r in rows {
                if let (Some(num), Some(den)) = (entries.get(&(r, n)), entries.get(&(r, k))) {
                    sum = sum.add(&Iv::point(*num).div(&Iv::point(*den)));
                    terms += 1;
                }
            }
            Ok(SeriesEstimate::convergent(sum, 0.0, terms))
        }
        WeightConfig::Power {
            a: PowerBase::Table(a),
        } => {
            let d = (n - k) as i64;
            let mut sum = Iv::ZERO;
            let mut terms = 0;
            for &ar in a.range(..k).map(|(_, v)| v) {
                sum = sum.add(&Iv::point(ar).powi(d));
                terms += 1;
            }
            Ok(SeriesEstimate::undecided(
                sum,
                terms,
                "base sequence a is tabulated on a finite range; the tail \
                 below it carries no certificate",
            ))
        }
        _ => unreachable!("parametric families have a geometric shape"),
    }
}

/// `S^L_kn(b) = sum_{m=n+1}^{infinity} b_km / b_nm`.
pub fn s_left(
    cfg: &WeightConfig,
    k: i32,
    n: i32,
    budget: &TruncationBudget,
) -> Result<SeriesEstimate> {
    check_pair(k, n)?;
    let (k64, n64) = (k as i64, n as i64);
    // For every power-shaped family the term is (a_k / a_n)^m.
    let ratio: Option<Iv> = match cfg {
        WeightConfig::Geometric { .. }
        | WeightConfig::Power {
            a: PowerBase::Scaled { .. },
        } => {
            let g = geo_shape(cfg).expect("geometric shape");
            Some(g.gamma.powi(k64 - n64))
        }
        WeightConfig::Power {
            a: PowerBase::Table(t),
        } => match (t.get(&k), t.get(&n)) {
            (Some(&ak), Some(&an)) => Some(Iv::point(ak).div(&Iv::point(an))),
            _ => None,
        },
        WeightConfig::Table { .. } => None,
    };
    if let Some(rho) = ratio {
        if rho.hi >= 1.0 {
            let mut sum = Iv::ZERO;
            for m in (n64 + 1)..(n64 + 1 + budget.radius.min(32) as i64) {
                sum = sum.add(&rho.powi(m));
            }
            return Ok(SeriesEstimate::divergent(
                sum,
                budget.radius.min(32) as u64,
                format!("term ratio a_k/a_n = {:.6} is at least one", rho.lo),
            ));
        }
        let mut sum = Iv::ZERO;
        let mut terms = 0u64;
        let mut m = n64 + 1;
        let highest = n64 + budget.radius as i64;
        loop {
            let remainder = rho.powi(m).div(&Iv::ONE.sub(&rho));
            if (remainder.hi <= budget.target_tail && terms > 0)
                || m > highest
                || terms >= budget.max_terms
            {
                return Ok(SeriesEstimate::convergent(sum, remainder.hi, terms));
            }
            sum = sum.add(&rho.powi(m));
            terms += 1;
            m += 1;
        }
    }
    match cfg {
        WeightConfig::Table { entries } => {
            let mut sum = Iv::ZERO;
            let mut terms = 0;
            let cols: std::collections::BTreeSet<i32> =
                entries.keys().map(|&(_, m)| m).filter(|&m| m > n).collect();
            for m in cols {
                if let (Some(num), Some(den)) = (entries.get(&(k, m)), entries.get(&(n, m))) {
                    sum = sum.add(&Iv::point(*num).div(&Iv::point(*den)));
                    terms += 1;
                }
            }
            Ok(SeriesEstimate::convergent(sum, 0.0, terms))
        }
        _ => Ok(SeriesEstimate::undecided(
            Iv::ZERO,
            0,
            "a_k or a_n missing from the tabulated base sequence",
        )),
    }
}

// ---------------------------------------------------------------------------
// E(b) and E_m(b)
// ---------------------------------------------------------------------------

/// Which decomposition of the triple sum `E(b)` to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ERoute {
    /// Direct triple sum over `k < n < r`.
    Triple,
    /// `sum_{k<n} S^L_kn / b_kn`.
    ViaLeft,
    /// `sum_{n<r} S^R_nr / b_nr`.
    ViaRight,
}

/// `E(b) = sum_{k<n<r} b_kr / (b_kn b_nr)` by the requested route.
pub fn e_total(cfg: &WeightConfig, budget: &TruncationBudget, route: ERoute) -> SeriesEstimate {
    e_capped(cfg, budget, route, None)
}

/// `E_m(b)`: the same sum restricted to `r <= m`.
pub fn e_m(cfg: &WeightConfig, m: i32, budget: &TruncationBudget) -> SeriesEstimate {
    e_capped(cfg, budget, ERoute::ViaRight, Some(m as i64))
}

fn e_capped(
    cfg: &WeightConfig,
    budget: &TruncationBudget,
    route: ERoute,
    r_cap: Option<i64>,
) -> SeriesEstimate {
    if let Some(g) = geo_shape(cfg) {
        if !g.expanding() {
            // Every S^L_kn diverges, and E(b) dominates each S^L_kn / b_kn.
            return SeriesEstimate::divergent(
                Iv::ZERO,
                0,
                "contains the divergent sub-series S^L_kn / b_kn (term ratio at least one)",
            );
        }
        return e_geometric(&g, budget, route, r_cap);
    }
    match cfg {
        WeightConfig::Table { entries } => {
            // Finitely many positive terms.
            let mut sum = Iv::ZERO;
            let mut terms = 0;
            let idx: std::collections::BTreeSet<i32> =
                entries.keys().flat_map(|&(k, n)| [k, n]).collect();
            for &k in &idx {
                for &n in idx.range((k + 1)..) {
                    for &r in idx.range((n + 1)..) {
                        if r_cap.is_some_and(|cap| (r as i64) > cap) {
                            continue;
                        }
                        if let (Some(kr), Some(kn), Some(nr)) = (
                            entries.get(&(k, r)),
                            entries.get(&(k, n)),
                            entries.get(&(n, r)),
                        ) {
                            sum =
                                sum.add(&Iv::point(*kr).div(&Iv::point(*kn)).div(&Iv::point(*nr)));
                            terms += 1;
                        }
                    }
                }
            }
            SeriesEstimate::convergent(sum, 0.0, terms)
        }
        _ => SeriesEstimate::undecided(
            Iv::ZERO,
            0,
            "no tail certificate for a tabulated base sequence",
        ),
    }
}

fn e_geometric(
    g: &GeoShape,
    budget: &TruncationBudget,
    route: ERoute,
    r_cap: Option<i64>,
) -> SeriesEstimate {
    let radius = budget.radius.min(40) as i64;
    let cap = g.denom_cap();

    // Tail of sum_{k<n} S^L_kn / b_kn outside the index box [-R, R]^2,
    // assembled from the closed forms (see rho_left):
    //   n > R:   F(n) <= cap * beta^{-n} gamma^{-n^2 + 1} / (gamma - 1)
    //   k < -R:  G(k) <= cap * gamma^k * Theta1,
    // with Theta1 = sum_n beta^{-n} gamma^{-n(n+1)}.
    let pair_tail_left = |r: i64| -> Option<Iv> {
        let gm1 = g.gamma.sub(&Iv::ONE);
        let f_ub = |n: i64| {
            cap.mul(&g.beta.powi(-n))
                .mul(&g.gamma.powi(-n * n + 1))
                .div(&gm1)
        };
        let q_a = g.beta.recip().mul(&g.gamma.powi(-(2 * r + 3)));
        if q_a.hi >= 0.5 {
            return None;
        }
        let tail_a = f_ub(r + 1).div(&Iv::ONE.sub(&q_a));
        let theta1 = g.theta(|n| -n * (n + 1))?;
        let tail_b = cap
            .mul(&theta1)
            .mul(&g.gamma.powi(-r))
            .div(&g.gamma.sub(&Iv::ONE));
        Some(Iv::new(0.0, tail_a.hi + tail_b.hi))
    };

    // Tail of sum_{n<r} S^R_nr / b_nr outside the box (see rho_right):
    //   r > R:   H(r) <= cap * gamma^{-r} * Theta2
    //   n < -R:  cap * beta^{-n} gamma^{-n^2} / (gamma - 1)  summed by ratio
    // with Theta2 = sum_n beta^{-n} gamma^{n - n^2}.
    let pair_tail_right = |r: i64| -> Option<Iv> {
        let gm1 = g.gamma.sub(&Iv::ONE);
        let theta2 = g.theta(|n| n - n * n)?;
        let tail_a = cap.mul(&theta2).mul(&g.gamma.powi(-r)).div(&gm1);
        let term_dn = |n: i64| {
            cap.mul(&g.beta.powi(-n))
                .mul(&g.gamma.powi(-n * n))
                .div(&gm1)
        };
        let q_c = g.beta.mul(&g.gamma.powi(-(2 * r + 1)));
        if q_c.hi >= 0.5 {
            return None;
        }
        let tail_b = term_dn(-r - 1).div(&Iv::ONE.sub(&q_c));
        Some(Iv::new(0.0, tail_a.hi + tail_b.hi))
    };

    let undecided = |why: &str| SeriesEstimate::undecided(Iv::ZERO, 0, why);

    match route {
        ERoute::ViaLeft => {
            let Some(tail) = pair_tail_left(radius) else {
                return undecided("no usable tail ratio at this radius");
            };
            let mut sum = Iv::ZERO;
            let mut terms = 0;
            for k in -radius..=radius {
                for n in (k + 1)..=radius {
                    sum = sum.add(&g.rho_left(k, n));
                    terms += 1;
                }
            }
            SeriesEstimate::convergent(sum, tail.hi, terms)
        }
        ERoute::ViaRight => {
            let hi_r = r_cap.unwrap_or(radius).min(radius);
            let tail = if r_cap.is_some_and(|c| c <= radius) {
                // r is capped inside the box; only the n -> -infinity side
                // contributes to the remainder.
                let gm1 = g.gamma.sub(&Iv::ONE);
                let q_c = g.beta.mul(&g.gamma.powi(-(2 * radius + 1)));
                if q_c.hi >= 0.5 {
                    return undecided("no usable tail ratio at this radius");
                }
                let term_dn = |n: i64| {
                    cap.mul(&g.beta.powi(-n))
                        .mul(&g.gamma.powi(-n * n))
                        .div(&gm1)
                };
                Iv::new(0.0, term_dn(-radius - 1).div(&Iv::ONE.sub(&q_c)).hi)
            } else {
                let Some(t) = pair_tail_right(radius) else {
                    return undecided("no usable tail ratio at this radius");
                };
                t
            };
            let mut sum = Iv::ZERO;
            let mut terms = 0;
            for n in -radius..=radius {
                for r in (n + 1)..=hi_r {
                    sum = sum.add(&g.rho_right(n, r));
                    terms += 1;
                }
            }
            SeriesEstimate::convergent(sum, tail.hi, terms)
        }
        ERoute::Triple => {
            // Box triple sum; remainder = pairs outside the box (left-route
            // bound) plus, for in-box pairs, the capped inner sums over
            // r > R, which are exact geometric tails of S^L_kn / b_kn.
            let Some(pair_tail) = pair_tail_left(radius) else {
                return undecided("no usable tail ratio at this radius");
            };
            let mut sum = Iv::ZERO;
            let mut terms = 0;
            let mut inner_tails = Iv::ZERO;
            for k in -radius..=radius {
                for n in (k + 1)..=radius {
                    for r in (n + 1)..=radius {
                        // b_kr / (b_kn b_nr) = beta^{-n} gamma^{kr - kn - nr}
                        sum = sum.add(&g.beta.powi(-n).mul(&g.gamma.powi(k * r - k * n - n * r)));
                        terms += 1;
                    }
                    // S^L_kn tail beyond R, divided by b_kn, with the
                    // exponents folded first so nothing under- or overflows:
                    // beta^{-n} gamma^{(k-n)(R+1) - kn} / (1 - gamma^{k-n}).
                    let inner = g
                        .beta
                        .powi(-n)
                        .mul(&g.gamma.powi((k - n) * (radius + 1) - k * n))
                        .div(&Iv::ONE.sub(&g.gamma.powi(k - n)));
                    inner_tails = inner_tails.add(&Iv::new(0.0, inner.hi));
                }
            }
            SeriesEstimate::convergent(sum, pair_tail.hi + inner_tails.hi, terms)
        }
    }
}

// ---------------------------------------------------------------------------
// sigma_kn and S^{R,L}_kn (nested series)
// ---------------------------------------------------------------------------

/// `sigma_kn(b) = sum_{m>n} b_km^2 / ([S^R_km + b_km][S^R_nm + b_nm])`.
pub fn sigma(
    cfg: &WeightConfig,
    k: i32,
    n: i32,
    budget: &TruncationBudget,
) -> Result<SeriesEstimate> {
    nested_series(cfg, k, n, budget, false)
}

/// `S^{R,L}_kn(b) = sum_{m>n} b_km^2 / ([S^R_km + b_km][S^L_nm + S^R_nm])`.
pub fn s_right_left(
    cfg: &WeightConfig,
    k: i32,
    n: i32,
    budget: &TruncationBudget,
) -> Result<SeriesEstimate> {
    nested_series(cfg, k, n, budget, true)
}

fn nested_series(
    cfg: &WeightConfig,
    k: i32,
    n: i32,
    budget: &TruncationBudget,
    left_denominator: bool,
) -> Result<SeriesEstimate> {
    check_pair(k, n)?;
    let (k64, n64) = (k as i64, n as i64);
    if let Some(g) = geo_shape(cfg) {
        if !g.expanding() {
            // Both inner denominators blow up: S^R_km diverges, so every term
            // is squeezed to zero.
            return Ok(SeriesEstimate::convergent(Iv::ZERO, 0.0, 0));
        }
        // term(m) = gamma^{(k-n)m} / [(1 + rho^R_km)(D_m)] with
        // D_m = 1 + rho^R_nm (sigma) or rho^L_nm + rho^R_nm (two-sided).
        let term = |m: i64| -> Iv {
            let d1 = Iv::ONE.add(&g.rho_right(k64, m));
            let d2 = if left_denominator {
                g.rho_left(n64, m).add(&g.rho_right(n64, m))
            } else {
                Iv::ONE.add(&g.rho_right(n64, m))
            };
            g.gamma.powi((k64 - n64) * m).div(&d1).div(&d2)
        };
        let top = n64 + budget.radius as i64;
        let mut sum = Iv::ZERO;
        let mut terms = 0u64;
        for m in (n64 + 1)..=top {
            sum = sum.add(&term(m));
            terms += 1;
        }
        if !left_denominator {
            // Denominators are at least one, so the remainder is dominated by
            // the plain geometric tail of gamma^{(k-n)m}.
            let rem = g.upper_geometric_tail(top + 1, n64 - k64);
            return Ok(SeriesEstimate::convergent(sum, rem.hi, terms));
        }
        if n64 - k64 >= 2 {
            // term(m) <= gamma^{(k-n)m} / rho^L+R >= rho^R:
            //   <= beta^n gamma^{n^2-n} gamma^{(k-n+1)m}, ratio < 1.
            let lead = g.beta.powi(n64).mul(&g.gamma.powi(n64 * n64 - n64));
            let rem = lead.mul(&g.upper_geometric_tail(top + 1, n64 - k64 - 1));
            return Ok(SeriesEstimate::convergent(sum, rem.hi, terms));
        }
        // k = n - 1: the terms approach a positive constant. Certify a lower
        // bound valid for every m > M simultaneously:
        //   gamma^{-m} / rho^R_nm = beta^n gamma^{n^2-n} (1 - gamma^{-(m-n)})
        // increases in m, rho^R_km decreases in m, and
        //   rho^L_nm / rho^R_nm = (beta gamma^{n+m})^{n-m}
        // decreases once beta gamma^{n+M+1} > 1.
        let m_probe = top.max(n64 + 8);
        let base = g.beta.mul(&g.gamma.powi(n64 + m_probe + 1));
        if base.lo > 1.0 {
            let lead = g
                .beta
                .powi(n64)
                .mul(&g.gamma.powi(n64 * n64 - n64))
                .mul(&Iv::ONE.sub(&g.gamma.powi(-(m_probe + 1 - n64))));
            let rho1_cap = Iv::ONE.add(&g.rho_right(k64, m_probe + 1));
            let ratio_cap = Iv::ONE.add(&base.powi(n64 - m_probe - 1));
            let floor = lead.div(&rho1_cap).div(&ratio_cap);
            if floor.lo > 0.0 {
                return Ok(SeriesEstimate::divergent(
                    sum,
                    terms,
                    format!(
                        "terms stay at least {:.3e} for every m > {}",
                        floor.lo, m_probe
                    ),
                ));
            }
        }
        return Ok(SeriesEstimate::undecided(
            sum,
            terms,
            "no certificate separated the terms from zero at this radius",
        ));
    }
    match cfg {
        WeightConfig::Table { entries } => {
            let zero_budget = TruncationBudget {
                radius: budget.radius,
                max_terms: budget.max_terms,
                target_tail: 0.0,
            };
            let mut sum = Iv::ZERO;
            let mut terms = 0;
            let cols: std::collections::BTreeSet<i32> =
                entries.keys().map(|&(_, m)| m).filter(|&m| m > n).collect();
            for m in cols {
                let (Some(&bkm), Some(&bnm)) = (entries.get(&(k, m)), entries.get(&(n, m))) else {
                    continue;
                };
                let srk = s_right(cfg, k, m, &zero_budget)?;
                let srn = s_right(cfg, n, m, &zero_budget)?;
                let (d1lo, d1hi) = srk.bracket();
                let d1 = Iv::new(d1lo, d1hi).add(&Iv::point(bkm));
                let d2 = if left_denominator {
                    let sl = s_left(cfg, n, m, &zero_budget)?;
                    let (lo, hi) = sl.bracket();
                    let (rlo, rhi) = srn.bracket();
                    Iv::new(lo + rlo, hi + rhi)
                } else {
                    let (rlo, rhi) = srn.bracket();
                    Iv::new(rlo, rhi).add(&Iv::point(bnm))
                };
                if d2.lo <= 0.0 {
                    return Ok(SeriesEstimate::undecided(
                        sum,
                        terms,
                        format!("denominator at m = {m} is not certifiably positive"),
                    ));
                }
                sum = sum.add(&Iv::point(bkm).powi(2).div(&d1).div(&d2));
                terms += 1;
            }
            Ok(SeriesEstimate::convergent(sum, 0.0, terms))
        }
        _ => Ok(SeriesEstimate::undecided(
            Iv::ZERO,
            0,
            "inner series are undecided for a tabulated base sequence",
        )),
    }
}
