//! Exact arithmetic for finite truncations of the upper unitriangular group.
//!
//! A `UniMatrix` stores only the strictly upper entries of `X = I + x` on an
//! index window; the unit diagonal is implicit and absent keys are exact
//! zeros. Entries live in any commutative ring, so the same code runs over
//! exact rationals, binary64 floats and symbolic polynomials.

use crate::error::{Error, Result};
use crate::window::IndexWindow;
use num::{BigRational, FromPrimitive, One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Commutative-ring interface for matrix entries: exact rationals, binary64
/// floats and (in the symbolic layer) polynomials all qualify.
pub trait Ring:
    Clone
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + std::ops::Neg<Output = Self>
    + std::ops::Sub<Output = Self>
{
}

impl<T> Ring for T where
    T: Clone
        + PartialEq
        + Send
        + Sync
        + Zero
        + One
        + std::ops::Neg<Output = T>
        + std::ops::Sub<Output = T>
{
}

/// Upper unitriangular matrix on a window: unit diagonal, sparse strictly
/// upper entries, everything else zero.
#[derive(Clone, Debug, PartialEq)]
pub struct UniMatrix<S: Ring> {
    window: IndexWindow,
    entries: BTreeMap<(i32, i32), S>,
}

/// Exact-rational matrix, the default mode for identity checking.
pub type RatMatrix = UniMatrix<BigRational>;
/// Binary64 matrix, used by the numeric layer.
pub type F64Matrix = UniMatrix<f64>;

impl<S: Ring> UniMatrix<S> {
    /// The identity: no off-diagonal entries.
    pub fn identity(window: IndexWindow) -> Self {
        UniMatrix {
            window,
            entries: BTreeMap::new(),
        }
    }

    /// `I + s E_{pq}`, the elementary one-parameter subgroup element.
    pub fn elementary(window: IndexWindow, p: i32, q: i32, s: S) -> Result<Self> {
        window.check_pair(p, q)?;
        let mut m = UniMatrix::identity(window);
        m.set(p, q, s);
        Ok(m)
    }

    pub fn window(&self) -> IndexWindow {
        self.window
    }

    /// Strictly upper entry `x_{kn}`; zero when absent.
    pub fn get(&self, k: i32, n: i32) -> S {
        self.entries.get(&(k, n)).cloned().unwrap_or_else(S::zero)
    }

    /// Full matrix entry `X_{kn}` including the unit diagonal.
    pub fn full_entry(&self, k: i32, n: i32) -> S {
        if k == n {
            S::one()
        } else {
            self.get(k, n)
        }
    }

    pub fn set(&mut self, k: i32, n: i32, v: S) {
        assert!(
            self.window.contains_pair(k, n),
            "entry ({k},{n}) outside window {}",
            self.window
        );
        if v.is_zero() {
            self.entries.remove(&(k, n));
        } else {
            self.entries.insert((k, n), v);
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(i32, i32), &S)> {
        self.entries.iter()
    }

    pub fn is_identity(&self) -> bool {
        self.entries.is_empty()
    }

    /// Product, using `(AB)_{kn} = sum_{r=k}^{n} A_{kr} B_{rn}` with unit
    /// diagonals. Windows must agree.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.window != other.window {
            return Err(Error::WindowMismatch {
                left: self.window,
                right: other.window,
            });
        }
        let mut out = UniMatrix::identity(self.window);
        for (k, n) in self.window.pairs() {
            // r = k and r = n contribute through the implicit diagonal.
            let mut acc = self.get(k, n) + other.get(k, n);
            for r in (k + 1)..n {
                let a = self.get(k, r);
                if a.is_zero() {
                    continue;
                }
                let b = other.get(r, n);
                if b.is_zero() {
                    continue;
                }
                acc = acc + a * b;
            }
            out.set(k, n, acc);
        }
        Ok(out)
    }

    /// Inverse by the short recurrence
    /// `x_{kn}^{-1} = -x_{kn} - sum_{r=k+1}^{n-1} x_{kr} x_{rn}^{-1}`,
    /// filled in by increasing gap `n - k`.
    pub fn invert_recursive(&self) -> Self {
        let mut inv: BTreeMap<(i32, i32), S> = BTreeMap::new();
        let w = self.window;
        for gap in 1..=w.size() {
            for k in w.lo..=(w.hi - gap) {
                let n = k + gap;
                let mut acc = -self.get(k, n);
                for r in (k + 1)..n {
                    let a = self.get(k, r);
                    if a.is_zero() {
                        continue;
                    }
                    if let Some(b) = inv.get(&(r, n)) {
                        acc = acc - a * b.clone();
                    }
                }
                if !acc.is_zero() {
                    inv.insert((k, n), acc);
                }
            }
        }
        UniMatrix {
            window: w,
            entries: inv,
        }
    }

    /// Inverse by the explicit alternating chain sum
    /// `x_{kn}^{-1} = sum_j (-1)^j (x^j)_{kn}`, enumerating every index chain
    /// `k = i_0 < i_1 < ... < i_j = n`. Exponential in the gap; this is the
    /// independent oracle for `invert_recursive`, not a production path.
    pub fn invert_explicit(&self) -> Self {
        let w = self.window;
        let mut inv = UniMatrix::identity(w);
        for (k, n) in w.pairs() {
            let mut acc = S::zero();
            // Chains with one step: -x_{kn}.
            self.chain_sum(k, n, &S::one(), 1, &mut acc);
            inv.set(k, n, acc);
        }
        inv
    }

    fn chain_sum(&self, from: i32, to: i32, prefix: &S, steps: u32, acc: &mut S) {
        // Close the chain directly: prefix * x_{from,to} with sign (-1)^steps.
        let last = self.get(from, to);
        if !last.is_zero() {
            let term = prefix.clone() * last;
            *acc = if steps % 2 == 1 {
                acc.clone() - term
            } else {
                acc.clone() + term
            };
        }
        for mid in (from + 1)..to {
            let step = self.get(from, mid);
            if step.is_zero() {
                continue;
            }
            let next = prefix.clone() * step;
            self.chain_sum(mid, to, &next, steps + 1, acc);
        }
    }

    /// Copy into a strictly larger window; new coordinates stay zero.
    pub fn embed_symmetric(&self, bigger: IndexWindow) -> Result<Self> {
        if !bigger.strictly_contains(&self.window) {
            return Err(Error::NotContained {
                inner: self.window,
                outer: bigger,
            });
        }
        Ok(UniMatrix {
            window: bigger,
            entries: self.entries.clone(),
        })
    }

    /// Restriction onto a sub-window, dropping outside entries.
    pub fn project(&self, smaller: IndexWindow) -> Result<Self> {
        if !(self.window.lo <= smaller.lo && smaller.hi <= self.window.hi) {
            return Err(Error::NotContained {
                inner: smaller,
                outer: self.window,
            });
        }
        let entries = self
            .entries
            .iter()
            .filter(|((k, n), _)| smaller.contains_pair(*k, *n))
            .map(|(kn, v)| (*kn, v.clone()))
            .collect();
        Ok(UniMatrix {
            window: smaller,
            entries,
        })
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T) -> UniMatrix<T> {
        let entries = self
            .entries
            .iter()
            .map(|(kn, v)| (*kn, f(v)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        UniMatrix {
            window: self.window,
            entries,
        }
    }
}

impl RatMatrix {
    pub fn to_f64(&self) -> F64Matrix {
        self.map(rational_to_f64)
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    num::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

/// Exact dyadic rational equal to the given finite float.
pub fn f64_to_rational(x: f64) -> BigRational {
    BigRational::from_f64(x).expect("finite float")
}

// ---------------------------------------------------------------------------
// JSON form: {"lo":..,"hi":..,"entries":[[k,n,"num/den" | float],...]}
// ---------------------------------------------------------------------------

/// Tagged scalar for the wire format: exact rationals travel as "num/den"
/// strings, floats as JSON numbers.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarJson {
    Exact(String),
    Float(f64),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub lo: i32,
    pub hi: i32,
    pub entries: Vec<(i32, i32, ScalarJson)>,
}

impl From<&RatMatrix> for MatrixJson {
    fn from(m: &RatMatrix) -> Self {
        MatrixJson {
            lo: m.window.lo,
            hi: m.window.hi,
            entries: m
                .entries
                .iter()
                .map(|(&(k, n), v)| {
                    (
                        k,
                        n,
                        ScalarJson::Exact(format!("{}/{}", v.numer(), v.denom())),
                    )
                })
                .collect(),
        }
    }
}

impl From<&F64Matrix> for MatrixJson {
    fn from(m: &F64Matrix) -> Self {
        MatrixJson {
            lo: m.window.lo,
            hi: m.window.hi,
            entries: m
                .entries
                .iter()
                .map(|(&(k, n), &v)| (k, n, ScalarJson::Float(v)))
                .collect(),
        }
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let parse = |t: &str| {
        t.parse::<num::BigInt>()
            .map_err(|e| Error::BadConfig(format!("bad rational '{s}': {e}")))
    };
    match s.split_once('/') {
        Some((a, b)) => {
            let den = parse(b)?;
            if den.is_zero() {
                return Err(Error::BadConfig(format!("zero denominator in '{s}'")));
            }
            Ok(BigRational::new(parse(a)?, den))
        }
        None => Ok(BigRational::from(parse(s)?)),
    }
}

impl MatrixJson {
    pub fn to_rational(&self) -> Result<RatMatrix> {
        let w = IndexWindow::new(self.lo, self.hi)?;
        let mut m = RatMatrix::identity(w);
        for (k, n, v) in &self.entries {
            w.check_pair(*k, *n)?;
            let val = match v {
                ScalarJson::Exact(s) => parse_rational(s)?,
                ScalarJson::Float(x) => f64_to_rational(*x),
            };
            m.set(*k, *n, val);
        }
        Ok(m)
    }

    pub fn to_float(&self) -> Result<F64Matrix> {
        Ok(self.to_rational()?.to_f64())
    }
}

impl<S: Ring + fmt::Display> fmt::Display for UniMatrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "I")?;
        for (&(k, n), v) in &self.entries {
            write!(f, " + ({v})E[{k},{n}]")?;
        }
        Ok(())
    }
}

/// Uniform random rational with small numerator/denominator, for tests and
/// randomized sweeps.
pub fn small_rational(rng: &mut impl rand::Rng) -> BigRational {
    let num = rng.gen_range(-9i64..=9);
    let den = rng.gen_range(1i64..=9);
    BigRational::new(num.into(), den.into())
}

/// Random exact-rational matrix with the given fill probability.
pub fn random_rational_matrix(
    window: IndexWindow,
    fill: f64,
    rng: &mut impl rand::Rng,
) -> RatMatrix {
    let mut m = RatMatrix::identity(window);
    for (k, n) in window.pairs() {
        if rng.gen_bool(fill) {
            m.set(k, n, small_rational(rng));
        }
    }
    m
}
