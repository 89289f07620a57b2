use super::{BinaryMatrix, Rect};
use crate::error::Result;

/// Type of a submatrix. `Vertical` means all rows are equal and
/// `Horizontal` means all columns are equal; both exclude the constant case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubmatrixType {
    Constant0,
    Constant1,
    Horizontal,
    Vertical,
    Mixed,
}

impl SubmatrixType {
    pub fn constant(v: bool) -> Self {
        if v {
            SubmatrixType::Constant1
        } else {
            SubmatrixType::Constant0
        }
    }

    pub fn is_constant(self) -> bool {
        matches!(self, SubmatrixType::Constant0 | SubmatrixType::Constant1)
    }

    pub fn constant_value(self) -> Option<bool> {
        match self {
            SubmatrixType::Constant0 => Some(false),
            SubmatrixType::Constant1 => Some(true),
            _ => None,
        }
    }

    fn from_flags(vertical: bool, horizontal: bool, first: bool) -> Self {
        match (vertical, horizontal) {
            (true, true) => SubmatrixType::constant(first),
            (true, false) => SubmatrixType::Vertical,
            (false, true) => SubmatrixType::Horizontal,
            (false, false) => SubmatrixType::Mixed,
        }
    }
}

/// Classifies `z` straight from the definition, in O(area).
pub fn classify(m: &BinaryMatrix, z: &Rect) -> Result<SubmatrixType> {
    z.check(m.n())?;
    let vertical = (z.r1 + 1..=z.r2).all(|i| (z.c1..=z.c2).all(|j| m.get(i, j) == m.get(z.r1, j)));
    let horizontal = (z.r1..=z.r2).all(|i| (z.c1 + 1..=z.c2).all(|j| m.get(i, j) == m.get(i, z.c1)));
    Ok(SubmatrixType::from_flags(vertical, horizontal, m.get(z.r1, z.c1)))
}

#[inline]
fn window_mixed(m: &BinaryMatrix, i: usize, j: usize) -> bool {
    let (a, b, c, d) = (m.get(i, j), m.get(i, j + 1), m.get(i + 1, j), m.get(i + 1, j + 1));
    !(a == c && b == d) && !(a == b && c == d)
}

/// Top-left positions `(i, j)` of every mixed 2x2 window of consecutive
/// rows and columns, in row-major order.
pub fn corners(m: &BinaryMatrix) -> Vec<(usize, usize)> {
    let n = m.n();
    let mut out = Vec::new();
    for i in 1..n {
        for j in 1..n {
            if window_mixed(m, i, j) {
                out.push((i, j));
            }
        }
    }
    out
}

/// O(1) classifier from 2D prefix sums of row-to-row and column-to-column
/// differences. Used as a fast brute-force reference in exhaustive tests.
pub struct ClassifyTable {
    n: usize,
    // vdiff[i][j]: M[i][j] != M[i+1][j], hdiff[i][j]: M[i][j] != M[i][j+1]
    vpre: Vec<u32>,
    hpre: Vec<u32>,
    first: BinaryMatrix,
}

impl ClassifyTable {
    pub fn new(m: &BinaryMatrix) -> Self {
        let n = m.n();
        let w = n + 1;
        let mut vpre = vec![0u32; w * w];
        let mut hpre = vec![0u32; w * w];
        for i in 1..=n {
            for j in 1..=n {
                let v = (i < n && m.get(i, j) != m.get(i + 1, j)) as u32;
                let h = (j < n && m.get(i, j) != m.get(i, j + 1)) as u32;
                vpre[i * w + j] = v + vpre[(i - 1) * w + j] + vpre[i * w + j - 1] - vpre[(i - 1) * w + j - 1];
                hpre[i * w + j] = h + hpre[(i - 1) * w + j] + hpre[i * w + j - 1] - hpre[(i - 1) * w + j - 1];
            }
        }
        ClassifyTable { n, vpre, hpre, first: m.clone() }
    }

    fn sum(pre: &[u32], w: usize, r1: usize, r2: usize, c1: usize, c2: usize) -> u32 {
        if r1 > r2 || c1 > c2 {
            return 0;
        }
        pre[r2 * w + c2] + pre[(r1 - 1) * w + (c1 - 1)] - pre[(r1 - 1) * w + c2] - pre[r2 * w + (c1 - 1)]
    }

    pub fn classify(&self, z: &Rect) -> SubmatrixType {
        debug_assert!(z.check(self.n).is_ok());
        let w = self.n + 1;
        let vertical = Self::sum(&self.vpre, w, z.r1, z.r2 - 1, z.c1, z.c2) == 0;
        let horizontal = Self::sum(&self.hpre, w, z.r1, z.r2, z.c1, z.c2 - 1) == 0;
        SubmatrixType::from_flags(vertical, horizontal, self.first.get(z.r1, z.c1))
    }
}
