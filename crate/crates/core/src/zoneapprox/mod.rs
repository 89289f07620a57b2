//! Representative zones of a regular division: the grid of blocks is
//! partitioned greedily into mixed zones, vertical and horizontal strips and
//! constant submatrices; every block is mapped to the top-left block of its
//! part, which holds an identical zone.

mod cover;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{HalfOpenRect, PersistentKTree, PointLocator};
use crate::matrix::{Rect, RegularDivision, SubmatrixType};
use crate::subtypes::TypesOracle;

pub use cover::CoverMaintainer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CoverKind {
    #[serde(rename = "mixed")]
    MixedZone,
    #[serde(rename = "vstrip")]
    VStrip,
    #[serde(rename = "hstrip")]
    HStrip,
    #[serde(rename = "const0")]
    Constant0,
    #[serde(rename = "const1")]
    Constant1,
}

impl CoverKind {
    pub fn is_constant(self) -> bool {
        matches!(self, CoverKind::Constant0 | CoverKind::Constant1)
    }
}

impl fmt::Display for CoverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoverKind::MixedZone => "mixed",
            CoverKind::VStrip => "vstrip",
            CoverKind::HStrip => "hstrip",
            CoverKind::Constant0 => "const0",
            CoverKind::Constant1 => "const1",
        })
    }
}

/// One part of the partition, in block coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CoverElement {
    pub rect: Rect,
    pub kind: CoverKind,
}

#[derive(Debug, Clone)]
pub struct ZoneCover {
    n: usize,
    s: usize,
    m: usize,
    elements: Vec<CoverElement>,
    locator: PointLocator,
}

/// Largest `x` in `lo..=hi` with `pred(x)`, given `pred(lo)` and that `pred`
/// is monotone (true then false).
fn last_true(lo: usize, hi: usize, mut pred: impl FnMut(usize) -> bool) -> usize {
    let (mut good, mut bad) = (lo, hi + 1);
    while bad - good > 1 {
        let mid = good + (bad - good) / 2;
        if pred(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

/// Partitions the `s`-regular division of the oracle's matrix (`s` must
/// divide `n`). Scanning uncovered blocks in row-major order, the first
/// uncovered block is covered alone when mixed, extended down to a maximal
/// vertical strip, right to a maximal horizontal strip, or down and then
/// right to a maximal constant submatrix.
pub fn zone_approximation(oracle: &TypesOracle, s: usize) -> Result<ZoneCover> {
    let n = oracle.n();
    if s == 0 || !n.is_multiple_of(s) {
        return Err(Error::InvalidParameter(format!("granularity {s} does not divide n={n}")));
    }
    let div = RegularDivision::new(n, s)?;
    let m = n / s;
    let span = |i1: usize, i2: usize, j1: usize, j2: usize| -> SubmatrixType {
        oracle.classify(&div.span_bounds(i1, i2, j1, j2).expect("block range within the grid"))
    };
    let mut cm = CoverMaintainer::new(m);
    let mut elements = Vec::new();
    while let Some((i, j)) = cm.get_first() {
        let r = cm.extend_right()?;
        let (i2, j2, kind) = match span(i, i, j, j) {
            SubmatrixType::Mixed => (i, j, CoverKind::MixedZone),
            SubmatrixType::Vertical => {
                let i2 = last_true(i, m, |x| span(i, x, j, j) == SubmatrixType::Vertical);
                (i2, j, CoverKind::VStrip)
            }
            SubmatrixType::Horizontal => {
                let j2 = last_true(j, r, |y| span(i, i, j, y) == SubmatrixType::Horizontal);
                (i, j2, CoverKind::HStrip)
            }
            t @ (SubmatrixType::Constant0 | SubmatrixType::Constant1) => {
                let i2 = last_true(i, m, |x| span(i, x, j, j) == t);
                let j2 = last_true(j, r, |y| span(i, i2, j, y) == t);
                let kind = if t == SubmatrixType::Constant1 { CoverKind::Constant1 } else { CoverKind::Constant0 };
                (i2, j2, kind)
            }
        };
        cm.cover(i2, j2)?;
        elements.push(CoverElement { rect: Rect::new(i, i2, j, j2), kind });
    }
    let parts: Vec<(HalfOpenRect, u32)> = elements
        .iter()
        .enumerate()
        .map(|(k, e)| (HalfOpenRect::new(e.rect.c1 - 1, e.rect.c2, e.rect.r1 - 1, e.rect.r2), k as u32))
        .collect();
    let locator = PointLocator::build(m, &parts, PersistentKTree::binary_depth(m))?;
    let zc = ZoneCover { n, s, m, elements, locator };
    if crate::debug_checks() {
        zc.check_partition()?;
    }
    Ok(zc)
}

impl ZoneCover {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// Side of the block grid, `n / s`.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn elements(&self) -> &[CoverElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Top-left block of every element, in cover order.
    pub fn representatives(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.elements.iter().map(|e| (e.rect.r1, e.rect.c1))
    }

    /// Index of the element containing block `(i, j)`.
    pub fn element_of(&self, i: usize, j: usize) -> Result<usize> {
        if i == 0 || j == 0 || i > self.m || j > self.m {
            return Err(Error::Bounds(format!("block ({i},{j}) outside 1..={}", self.m)));
        }
        self.locator
            .locate(j - 1, i - 1)
            .map(|k| k as usize)
            .ok_or_else(|| Error::ConstructionInvariant(format!("block ({i},{j}) not covered")))
    }

    /// Representative block of block `(i, j)`.
    pub fn xi(&self, i: usize, j: usize) -> Result<(usize, usize)> {
        let e = &self.elements[self.element_of(i, j)?];
        Ok((e.rect.r1, e.rect.c1))
    }

    /// Every block lies in exactly one element.
    pub fn check_partition(&self) -> Result<()> {
        let m = self.m;
        let mut seen = vec![false; m * m];
        for e in &self.elements {
            for i in e.rect.r1..=e.rect.r2 {
                for j in e.rect.c1..=e.rect.c2 {
                    if std::mem::replace(&mut seen[(i - 1) * m + j - 1], true) {
                        return Err(Error::ConstructionInvariant(format!("block ({i},{j}) covered twice")));
                    }
                }
            }
        }
        match seen.iter().position(|&b| !b) {
            Some(k) => Err(Error::ConstructionInvariant(format!("block ({},{}) uncovered", k / m + 1, k % m + 1))),
            None => Ok(()),
        }
    }

    /// Constant elements away from the grid border whose one-block shell is
    /// not mixed.
    pub fn unguarded_constants(&self, oracle: &TypesOracle) -> Result<Vec<CoverElement>> {
        let div = RegularDivision::new(self.n, self.s)?;
        let mut out = Vec::new();
        for e in &self.elements {
            let r = e.rect;
            if !e.kind.is_constant() || r.r1 == 1 || r.c1 == 1 || r.r2 == self.m || r.c2 == self.m {
                continue;
            }
            let shell = div.span_bounds(r.r1 - 1, r.r2 + 1, r.c1 - 1, r.c2 + 1)?;
            if oracle.query_type(&shell)? != SubmatrixType::Mixed {
                out.push(*e);
            }
        }
        Ok(out)
    }
}
