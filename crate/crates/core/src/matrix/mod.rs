//! Dense binary matrices, rectangles and rectangle decompositions.
//!
//! All row/column indices are 1-based. A [`BinaryMatrix`] keeps each row in
//! its own run of `u64` words so that range scans over a row are word-parallel.

mod classify;
mod diagnostics;
pub mod io;

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;

use crate::error::{bounds, Error, Result};

pub use classify::{classify, corners, ClassifyTable, SubmatrixType};
pub use diagnostics::{diagnostics, zone_family_naive, Diagnostics, ZoneMatrix};

/// Inclusive 1-based row/column bounds of a submatrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct Rect {
    pub r1: usize,
    pub r2: usize,
    pub c1: usize,
    pub c2: usize,
}

impl Rect {
    pub const fn new(r1: usize, r2: usize, c1: usize, c2: usize) -> Self {
        Rect { r1, r2, c1, c2 }
    }

    pub fn check(&self, n: usize) -> Result<()> {
        if self.r1 == 0 || self.c1 == 0 || self.r1 > self.r2 || self.c1 > self.c2 || self.r2 > n || self.c2 > n {
            return Err(bounds(format!("rect {self} invalid for n={n}")));
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.r2 - self.r1 + 1
    }

    pub fn cols(&self) -> usize {
        self.c2 - self.c1 + 1
    }

    pub fn area(&self) -> usize {
        self.rows() * self.cols()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.r1 <= i && i <= self.r2 && self.c1 <= j && j <= self.c2
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        self.r1 <= other.r1 && other.r2 <= self.r2 && self.c1 <= other.c1 && other.c2 <= self.c2
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.r1 <= other.r2 && other.r1 <= self.r2 && self.c1 <= other.c2 && other.c1 <= self.c2
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.r1, self.r2, self.c1, self.c2)
    }
}

/// Square bit grid, row-major, each row padded to whole words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    n: usize,
    stride: usize,
    words: Vec<u64>,
}

#[inline]
fn range_mask(lo: usize, hi: usize) -> u64 {
    // bits lo..=hi of a word, 0 <= lo <= hi < 64
    let upper = if hi == 63 { u64::MAX } else { (1u64 << (hi + 1)) - 1 };
    upper & !((1u64 << lo) - 1)
}

impl BinaryMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "matrix order must be positive");
        let stride = n.div_ceil(64);
        BinaryMatrix { n, stride, words: vec![0; stride * n] }
    }

    pub fn ones(n: usize) -> Self {
        let mut m = Self::zeros(n);
        m.fill(&Rect::new(1, n, 1, n), true);
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Parses the `"01;10"` literal form.
    pub fn from_literal(s: &str) -> Result<Self> {
        let rows: Vec<&str> = s.split(';').map(str::trim).collect();
        let n = rows.len();
        if n == 0 || rows[0].is_empty() {
            return Err(Error::Format("empty matrix literal".into()));
        }
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Format(format!("row {} has length {}, expected {n}", i + 1, row.len())));
            }
            for (j, ch) in row.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => m.set(i + 1, j + 1, true),
                    other => return Err(Error::Format(format!("unexpected character {other:?}"))),
                }
            }
        }
        Ok(m)
    }

    pub fn to_literal(&self) -> String {
        (1..=self.n).map(|i| (1..=self.n).map(|j| if self.get(i, j) { '1' } else { '0' }).collect::<String>()).collect::<Vec<_>>().join(";")
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i >= 1 && i <= self.n && j >= 1 && j <= self.n);
        let b = j - 1;
        (self.words[(i - 1) * self.stride + b / 64] >> (b % 64)) & 1 == 1
    }

    pub fn entry(&self, i: usize, j: usize) -> Result<bool> {
        if i == 0 || j == 0 || i > self.n || j > self.n {
            return Err(bounds(format!("entry ({i},{j}) outside 1..={}", self.n)));
        }
        Ok(self.get(i, j))
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let b = j - 1;
        let w = &mut self.words[(i - 1) * self.stride + b / 64];
        if v {
            *w |= 1 << (b % 64);
        } else {
            *w &= !(1 << (b % 64));
        }
    }

    fn row_span(&self, i: usize, c1: usize, c2: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        let (b1, b2) = (c1 - 1, c2 - 1);
        let base = (i - 1) * self.stride;
        (b1 / 64..=b2 / 64).map(move |w| {
            let lo = if w == b1 / 64 { b1 % 64 } else { 0 };
            let hi = if w == b2 / 64 { b2 % 64 } else { 63 };
            (base + w, range_mask(lo, hi))
        })
    }

    /// Sets every entry of `rect` to `v`.
    pub fn fill(&mut self, rect: &Rect, v: bool) {
        for i in rect.r1..=rect.r2 {
            let spans: Vec<_> = self.row_span(i, rect.c1, rect.c2).collect();
            for (w, mask) in spans {
                if v {
                    self.words[w] |= mask;
                } else {
                    self.words[w] &= !mask;
                }
            }
        }
    }

    /// `Some(v)` when every entry of `rect` equals `v`, `None` otherwise.
    pub fn zone_constant(&self, rect: &Rect) -> Option<bool> {
        let first = self.get(rect.r1, rect.c1);
        for i in rect.r1..=rect.r2 {
            for (w, mask) in self.row_span(i, rect.c1, rect.c2) {
                let bits = self.words[w] & mask;
                if (first && bits != mask) || (!first && bits != 0) {
                    return None;
                }
            }
        }
        Some(first)
    }

    fn any_set(&self, rect: &Rect) -> bool {
        (rect.r1..=rect.r2).any(|i| self.row_span(i, rect.c1, rect.c2).any(|(w, m)| self.words[w] & m != 0))
    }

    /// Packed words of row `i`; bit `b` of word `w` is column `64 w + b + 1`.
    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.words[(i - 1) * self.stride..i * self.stride]
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Copy of the top-left `n x n` corner (`n <= self.n`), or a zero-padded
    /// enlargement when `n > self.n`.
    pub fn resized(&self, n: usize) -> BinaryMatrix {
        let mut out = BinaryMatrix::zeros(n);
        let k = n.min(self.n);
        for i in 1..=k {
            for j in 1..=k {
                if self.get(i, j) {
                    out.set(i, j, true);
                }
            }
        }
        out
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n <= 16 {
            write!(f, "BinaryMatrix({})", self.to_literal())
        } else {
            write!(f, "BinaryMatrix(n={}, ones={})", self.n, self.count_ones())
        }
    }
}

/// Pairwise disjoint all-1 rectangles; the 1-entries of the realized matrix
/// are exactly their union.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RectangleDecomposition {
    n: usize,
    rects: Vec<Rect>,
}

impl RectangleDecomposition {
    pub fn new(n: usize, rects: Vec<Rect>) -> Result<Self> {
        if n == 0 {
            return Err(bounds("matrix order must be positive"));
        }
        for r in &rects {
            r.check(n)?;
        }
        check_disjoint(&rects)?;
        Ok(RectangleDecomposition { n, rects })
    }

    pub fn empty(n: usize) -> Self {
        RectangleDecomposition { n, rects: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rects(&self) -> &[Rect] {
        &self.rects
    }

    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    /// Same rectangles inside a larger zero-padded `n x n` matrix.
    pub fn padded(&self, n: usize) -> Result<Self> {
        if n < self.n {
            return Err(bounds(format!("cannot pad order {} down to {n}", self.n)));
        }
        Ok(RectangleDecomposition { n, rects: self.rects.clone() })
    }

    pub fn realize(&self) -> BinaryMatrix {
        let mut m = BinaryMatrix::zeros(self.n);
        for r in &self.rects {
            m.fill(r, true);
        }
        m
    }
}

/// Paints the decomposition into a dense matrix, rejecting overlaps.
pub fn realize(dec: &RectangleDecomposition) -> Result<BinaryMatrix> {
    let mut m = BinaryMatrix::zeros(dec.n);
    for (k, r) in dec.rects.iter().enumerate() {
        r.check(dec.n)?;
        if m.any_set(r) {
            let other = dec.rects[..k].iter().find(|o| o.intersects(r)).copied().unwrap_or(*r);
            return Err(Error::Overlap(other, *r));
        }
        m.fill(r, true);
    }
    Ok(m)
}

/// Sweep over rows keeping the active column intervals in an ordered map.
pub(crate) fn check_disjoint(rects: &[Rect]) -> Result<()> {
    let mut order: Vec<usize> = (0..rects.len()).collect();
    order.sort_by_key(|&k| (rects[k].r1, rects[k].c1));
    let mut active: BTreeMap<usize, usize> = BTreeMap::new(); // c1 -> rect index
    let mut expiry: BinaryHeap<Reverse<(usize, usize)>> = BinaryHeap::new(); // (r2, index)
    for k in order {
        let r = rects[k];
        while let Some(&Reverse((r2, idx))) = expiry.peek() {
            if r2 >= r.r1 {
                break;
            }
            expiry.pop();
            if active.get(&rects[idx].c1) == Some(&idx) {
                active.remove(&rects[idx].c1);
            }
        }
        if let Some((_, &idx)) = active.range(..=r.c2).next_back() {
            if rects[idx].c2 >= r.c1 {
                return Err(Error::Overlap(rects[idx], r));
            }
        }
        active.insert(r.c1, k);
        expiry.push(Reverse((r.r2, k)));
    }
    Ok(())
}

/// The `s`-regular division of an `n x n` matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegularDivision {
    n: usize,
    s: usize,
}

impl RegularDivision {
    pub fn new(n: usize, s: usize) -> Result<Self> {
        if n == 0 || s == 0 || s > n {
            return Err(bounds(format!("regular division needs 1 <= s <= n (n={n}, s={s})")));
        }
        Ok(RegularDivision { n, s })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// Number of row (and column) blocks, `ceil(n/s)`.
    pub fn blocks(&self) -> usize {
        self.n.div_ceil(self.s)
    }

    pub fn block_span(&self, b: usize) -> (usize, usize) {
        ((b - 1) * self.s + 1, (b * self.s).min(self.n))
    }

    pub fn zone_bounds(&self, i: usize, j: usize) -> Result<Rect> {
        let t = self.blocks();
        if i == 0 || j == 0 || i > t || j > t {
            return Err(bounds(format!("zone ({i},{j}) outside 1..={t}")));
        }
        let (r1, r2) = self.block_span(i);
        let (c1, c2) = self.block_span(j);
        Ok(Rect::new(r1, r2, c1, c2))
    }

    /// Union of zones `i1..=i2` x `j1..=j2`.
    pub fn span_bounds(&self, i1: usize, i2: usize, j1: usize, j2: usize) -> Result<Rect> {
        let a = self.zone_bounds(i1, j1)?;
        let b = self.zone_bounds(i2, j2)?;
        Ok(Rect::new(a.r1, b.r2, a.c1, b.c2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn realize_examples() {
        let d = RectangleDecomposition::new(2, vec![]).unwrap();
        assert_eq!(realize(&d).unwrap().to_literal(), "00;00");
        let d = RectangleDecomposition::new(2, vec![Rect::new(1, 2, 1, 2)]).unwrap();
        assert_eq!(realize(&d).unwrap().to_literal(), "11;11");
        let d = RectangleDecomposition::new(3, vec![Rect::new(1, 1, 1, 3), Rect::new(3, 3, 3, 3)]).unwrap();
        assert_eq!(realize(&d).unwrap().to_literal(), "111;000;001");
    }

    #[test]
    fn overlap_and_bounds_rejected() {
        let err = RectangleDecomposition::new(4, vec![Rect::new(1, 2, 1, 2), Rect::new(2, 3, 2, 3)]).unwrap_err();
        assert!(matches!(err, Error::Overlap(..)));
        let err = RectangleDecomposition::new(4, vec![Rect::new(1, 5, 1, 1)]).unwrap_err();
        assert!(matches!(err, Error::Bounds(_)));
        // a rect that starts after another ended in the same columns is fine
        RectangleDecomposition::new(4, vec![Rect::new(1, 1, 1, 4), Rect::new(2, 4, 1, 4)]).unwrap();
        // a long rect still active when a later one starts underneath
        let err = RectangleDecomposition::new(6, vec![Rect::new(1, 6, 3, 3), Rect::new(1, 1, 1, 2), Rect::new(4, 4, 1, 5)]).unwrap_err();
        assert!(matches!(err, Error::Overlap(..)));
    }

    #[test]
    fn zone_bounds_examples() {
        let d = RegularDivision::new(4, 2).unwrap();
        assert_eq!(d.zone_bounds(1, 1).unwrap(), Rect::new(1, 2, 1, 2));
        assert_eq!(d.zone_bounds(2, 2).unwrap(), Rect::new(3, 4, 3, 4));
        let d = RegularDivision::new(5, 2).unwrap();
        assert_eq!(d.zone_bounds(3, 3).unwrap(), Rect::new(5, 5, 5, 5));
        assert!(d.zone_bounds(4, 1).is_err());
        assert!(d.zone_bounds(0, 1).is_err());
    }

    #[test]
    fn word_spanning_ranges() {
        let mut m = BinaryMatrix::zeros(130);
        let r = Rect::new(3, 5, 60, 129);
        m.fill(&r, true);
        assert_eq!(m.zone_constant(&r), Some(true));
        assert_eq!(m.zone_constant(&Rect::new(3, 5, 59, 129)), None);
        assert_eq!(m.zone_constant(&Rect::new(6, 130, 1, 130)), Some(false));
        assert_eq!(m.count_ones(), 3 * 70);
    }

    #[test]
    fn literal_round_trip() {
        let m = BinaryMatrix::from_literal("011;101;000").unwrap();
        assert_eq!(m.to_literal(), "011;101;000");
        assert!(BinaryMatrix::from_literal("01;1").is_err());
        assert!(BinaryMatrix::from_literal("0x;11").is_err());
    }
}
