use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Contiguous integer index range `[lo, hi]` (inclusive), the finite
/// truncation all matrices, coordinates and operators live on.
///
/// Every coordinate pair `(k, n)` satisfies `lo <= k < n <= hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexWindow {
    pub lo: i32,
    pub hi: i32,
}

impl IndexWindow {
    pub fn new(lo: i32, hi: i32) -> Result<Self> {
        if hi - lo >= 1 {
            Ok(IndexWindow { lo, hi })
        } else {
            Err(Error::BadWindow { lo, hi })
        }
    }

    /// Symmetric window `[-r, r]`.
    pub fn symmetric(radius: u32) -> Self {
        let r = radius.max(1) as i32;
        IndexWindow { lo: -r, hi: r }
    }

    /// Number of indices, `hi - lo + 1`.
    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `hi - lo`, the "size" used when talking about truncation levels.
    pub fn size(&self) -> i32 {
        self.hi - self.lo
    }

    pub fn contains_index(&self, i: i32) -> bool {
        self.lo <= i && i <= self.hi
    }

    /// Valid strictly-upper coordinate pair?
    pub fn contains_pair(&self, k: i32, n: i32) -> bool {
        self.lo <= k && k < n && n <= self.hi
    }

    pub fn check_pair(&self, k: i32, n: i32) -> Result<()> {
        if self.contains_pair(k, n) {
            Ok(())
        } else {
            Err(Error::IndexOutOfWindow {
                k,
                n,
                window: *self,
            })
        }
    }

    /// Strict containment of another window.
    pub fn strictly_contains(&self, other: &IndexWindow) -> bool {
        self.lo <= other.lo && other.hi <= self.hi && self.size() > other.size()
    }

    pub fn indices(&self) -> impl Iterator<Item = i32> {
        self.lo..=self.hi
    }

    /// All coordinate pairs `(k, n)` with `lo <= k < n <= hi`, in (k, n) order.
    pub fn pairs(&self) -> Vec<(i32, i32)> {
        let mut out = Vec::with_capacity(self.len() * (self.len() - 1) / 2);
        for k in self.lo..=self.hi {
            for n in (k + 1)..=self.hi {
                out.push((k, n));
            }
        }
        out
    }
}

impl fmt::Display for IndexWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_windows() {
        assert!(IndexWindow::new(0, 0).is_err());
        assert!(IndexWindow::new(3, 1).is_err());
        assert!(IndexWindow::new(0, 1).is_ok());
    }

    #[test]
    fn pair_enumeration_counts() {
        let w = IndexWindow::new(0, 3).unwrap();
        assert_eq!(w.pairs().len(), 6);
        assert!(w.contains_pair(0, 3));
        assert!(!w.contains_pair(3, 0));
        assert!(!w.contains_pair(0, 4));
        assert!(!w.contains_pair(1, 1));
    }

    #[test]
    fn strict_containment() {
        let small = IndexWindow::new(0, 2).unwrap();
        let big = IndexWindow::new(-1, 3).unwrap();
        assert!(big.strictly_contains(&small));
        assert!(!small.strictly_contains(&big));
        assert!(!small.strictly_contains(&small));
    }
}
