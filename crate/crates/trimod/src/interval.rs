//! Minimal outward-rounded interval arithmetic over binary64.
//!
//! Every operation widens the result by one ulp on each side, which
//! over-covers the true rounding error of the underlying IEEE operation.
//! That is enough to make the series estimates in [`crate::series`] honest:
//! a computed enclosure always contains the exact real value.

/// Closed interval `[lo, hi]`, `lo <= hi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Iv {
    pub lo: f64,
    pub hi: f64,
}

fn down(x: f64) -> f64 {
    if x.is_finite() {
        x.next_down()
    } else {
        x
    }
}

fn up(x: f64) -> f64 {
    if x.is_finite() {
        x.next_up()
    } else {
        x
    }
}

impl Iv {
    pub fn point(x: f64) -> Self {
        Iv { lo: x, hi: x }
    }

    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        Iv { lo, hi }
    }

    pub const ZERO: Iv = Iv { lo: 0.0, hi: 0.0 };
    pub const ONE: Iv = Iv { lo: 1.0, hi: 1.0 };

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn add(&self, o: &Iv) -> Iv {
        Iv::new(down(self.lo + o.lo), up(self.hi + o.hi))
    }

    pub fn sub(&self, o: &Iv) -> Iv {
        Iv::new(down(self.lo - o.hi), up(self.hi - o.lo))
    }

    pub fn mul(&self, o: &Iv) -> Iv {
        let products = [
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        ];
        let lo = products.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = products.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Iv::new(down(lo), up(hi))
    }

    /// Reciprocal; requires an interval strictly away from zero.
    pub fn recip(&self) -> Iv {
        assert!(
            self.lo > 0.0 || self.hi < 0.0,
            "reciprocal of an interval containing zero"
        );
        Iv::new(down(1.0 / self.hi), up(1.0 / self.lo))
    }

    pub fn div(&self, o: &Iv) -> Iv {
        self.mul(&o.recip())
    }

    /// Integer power by repeated interval multiplication; exponent may be
    /// negative when the base excludes zero.
    pub fn powi(&self, e: i64) -> Iv {
        if e < 0 {
            return self.recip().powi(-e);
        }
        let mut base = *self;
        let mut e = e as u64;
        let mut acc = Iv::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}
