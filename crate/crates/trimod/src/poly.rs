//! Sparse multivariate polynomials over exact rationals in the coordinates
//! `x_kn`, `lo <= k < n <= hi`.
//!
//! Monomials are kept in graded lexicographic order over the variable pairs
//! `(k, n)`; no zero coefficient is ever stored, so equality of canonical
//! forms is literal map equality.

use num::{BigRational, One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Integer as an exact rational, a recurring small convenience.
pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Coordinate variable label.
pub type Var = (i32, i32);

/// Exponent vector, sorted by variable; zero exponents are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(BTreeMap<Var, u32>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(BTreeMap::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(BTreeMap::from([(v, 1)]))
    }

    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0.get(&v).copied().unwrap_or(0)
    }

    pub fn vars(&self) -> impl Iterator<Item = (&Var, &u32)> {
        self.0.iter()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.0.clone();
        for (v, e) in &other.0 {
            *out.entry(*v).or_insert(0) += e;
        }
        Monomial(out)
    }

    /// Divide out one power of `v`; None if `v` does not occur.
    fn reduce(&self, v: Var) -> Option<Self> {
        let e = self.exponent(v);
        if e == 0 {
            return None;
        }
        let mut out = self.0.clone();
        if e == 1 {
            out.remove(&v);
        } else {
            out.insert(v, e - 1);
        }
        Some(Monomial(out))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        // Graded lex: total degree first, then exponents in (k, n) order.
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let mut a = self.0.iter();
        let mut b = other.0.iter();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some((va, ea)), Some((vb, eb))) => {
                    // Earlier variable with nonzero exponent ranks higher in lex.
                    match va.cmp(vb) {
                        Ordering::Equal => match ea.cmp(eb) {
                            Ordering::Equal => continue,
                            ord => return ord,
                        },
                        Ordering::Less => return Ordering::Greater,
                        Ordering::Greater => return Ordering::Less,
                    }
                }
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial: canonical monomial -> nonzero rational coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::unit(), c);
        }
        Poly { terms }
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(BigRational::from_integer(n.into()))
    }

    /// The coordinate `x_kn`. Panics on a non-upper pair; the strictly upper
    /// chart has no other coordinates.
    pub fn var(k: i32, n: i32) -> Self {
        assert!(k < n, "x[{k},{n}] is not a strictly upper coordinate");
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var((k, n)), BigRational::one());
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    fn insert(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    /// Partial derivative with respect to `x_kn`.
    pub fn partial(&self, v: Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if let Some(reduced) = m.reduce(v) {
                let e = BigRational::from_integer((m.exponent(v) as i64).into());
                out.insert(reduced, c * e);
            }
        }
        out
    }

    /// Set of variables actually occurring.
    pub fn support(&self) -> std::collections::BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.vars().map(|(v, _)| *v))
            .collect()
    }

    /// Evaluate in binary64 at a coordinate assignment.
    pub fn eval_f64(&self, point: &impl Fn(i32, i32) -> f64) -> f64 {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut term = crate::matrix::rational_to_f64(c);
            for (&(k, n), &e) in m.vars() {
                term *= point(k, n).powi(e as i32);
            }
            acc += term;
        }
        acc
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.insert(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Zero for Poly {
    fn zero() -> Self {
        Poly::zero()
    }
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
}

impl One for Poly {
    fn one() -> Self {
        Poly::one()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Highest order first reads better.
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            let unit_coeff = mag.is_one() && m.degree() > 0;
            if !unit_coeff {
                write!(f, "{mag}")?;
            }
            for (j, (&(k, n), &e)) in m.vars().enumerate() {
                if j > 0 || !unit_coeff {
                    write!(f, "*")?;
                }
                write!(f, "x[{k},{n}]")?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn arithmetic_and_canonical_form() {
        let x = Poly::var(0, 1);
        let y = Poly::var(1, 2);
        let p = (&x + &y) * (&x - &y);
        let q = &(&x * &x) - &(&y * &y);
        assert_eq!(p, q);
        assert_eq!(p.num_terms(), 2);
        let cancel = &p - &p;
        assert!(cancel.is_zero());
        assert_eq!(cancel.num_terms(), 0);
    }

    #[test]
    fn partial_derivative() {
        // d/dx01 (x01^2) = 2 x01
        let x = Poly::var(0, 1);
        let p = (&x * &x).partial((0, 1));
        assert_eq!(p, x.scale(&rat(2, 1)));
        // d/dx01 (x01 * x12 + x12) = x12
        let q = &(&Poly::var(0, 1) * &Poly::var(1, 2)) + &Poly::var(1, 2);
        assert_eq!(q.partial((0, 1)), Poly::var(1, 2));
        assert!(q.partial((0, 2)).is_zero());
    }

    #[test]
    fn graded_lex_ordering() {
        let x01 = Monomial::var((0, 1));
        let x12 = Monomial::var((1, 2));
        let sq = x01.mul(&x01);
        assert!(sq > x01); // higher degree ranks higher
        assert!(x01 > x12); // same degree: earlier variable ranks higher
        assert!(sq > x01.mul(&x12));
    }

    #[test]
    fn eval_matches_structure() {
        // p = 3/2 x01^2 x12 - x02
        let p = Poly::var(0, 1).pow(2) * Poly::var(1, 2).scale(&rat(3, 2)) - Poly::var(0, 2);
        let point = |k: i32, n: i32| match (k, n) {
            (0, 1) => 2.0,
            (1, 2) => -1.0,
            (0, 2) => 0.5,
            _ => 0.0,
        };
        assert_eq!(p.eval_f64(&point), -(1.5 * 4.0) - 0.5);
    }

    #[test]
    fn display_is_readable() {
        let p = Poly::var(0, 1).pow(2).scale(&rat(-3, 4)) + Poly::one();
        assert_eq!(p.to_string(), "-3/4*x[0,1]^2 + 1");
    }
}
