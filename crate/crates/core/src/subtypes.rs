//! Submatrix type queries answered from the geometry of a rectangle
//! decomposition, without materializing the matrix.
//!
//! Coordinates are doubled: cell `(i, j)` is the square
//! `[2j-2, 2j] x [2i-2, 2i]` with centre `(2j-1, 2i-1)`, so query points and
//! query segments never lie on a cell boundary.

use std::collections::{BTreeSet, HashMap};

use crate::error::{bounds, Result};
use crate::geom::{HSegment, HalfOpenRect, PersistentKTree, PointLocator, RangeEmptiness, RayShooter};
use crate::matrix::{Rect, RectangleDecomposition, SubmatrixType};

#[derive(Debug, Clone)]
pub struct TypesOracle {
    n: usize,
    inside: PointLocator,
    corners: Vec<(usize, usize)>,
    corner_index: RangeEmptiness,
    // horizontal boundary segments, queried along columns
    across_rows: RayShooter,
    // vertical boundary segments in transposed coordinates, queried along rows
    across_cols: RayShooter,
    boundary_segments: usize,
}

/// Maximal runs of columns covered by exactly one of two families of
/// pairwise disjoint column intervals.
fn odd_runs(intervals: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut events: Vec<(usize, i32)> = intervals.iter().flat_map(|&(a, b)| [(a, 1), (b + 1, -1)]).collect();
    events.sort_unstable();
    let mut out = Vec::new();
    let mut depth = 0;
    let mut run_start = None;
    let mut k = 0;
    while k < events.len() {
        let x = events[k].0;
        while k < events.len() && events[k].0 == x {
            depth += events[k].1;
            k += 1;
        }
        match (depth == 1, run_start) {
            (true, None) => run_start = Some(x),
            (false, Some(s)) => {
                out.push((s, x - 1));
                run_start = None;
            }
            _ => {}
        }
    }
    out
}

/// Boundary segments along lines `2i` (`i = 0..=n`) where the cells on the
/// two sides differ. `edges` yields `(line, lo, hi)` for every rectangle edge
/// lying on that line and covering cells `lo..=hi`.
fn boundary(edges: impl Iterator<Item = (usize, usize, usize)>) -> Vec<HSegment> {
    let mut by_line: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for (line, lo, hi) in edges {
        by_line.entry(line).or_default().push((lo, hi));
    }
    let mut lines: Vec<_> = by_line.into_iter().collect();
    lines.sort_unstable_by_key(|(l, _)| *l);
    let mut out = Vec::new();
    for (line, intervals) in lines {
        for (a, b) in odd_runs(&intervals) {
            out.push(HSegment { y: 2 * line, x1: 2 * a - 2, x2: 2 * b });
        }
    }
    out
}

impl TypesOracle {
    pub fn build(dec: &RectangleDecomposition) -> Result<Self> {
        let n = dec.n();
        let rects = dec.rects();
        let cells: Vec<(HalfOpenRect, u32)> =
            rects.iter().map(|r| (HalfOpenRect::new(2 * r.c1 - 2, 2 * r.c2, 2 * r.r1 - 2, 2 * r.r2), 1)).collect();
        let inside = PointLocator::build(2 * n, &cells, PersistentKTree::binary_depth(2 * n))?;

        let horizontal = boundary(rects.iter().flat_map(|r| [(r.r1 - 1, r.c1, r.c2), (r.r2, r.c1, r.c2)]));
        let vertical = boundary(rects.iter().flat_map(|r| [(r.c1 - 1, r.r1, r.r2), (r.c2, r.r1, r.r2)]));
        let boundary_segments = horizontal.len() + vertical.len();
        let across_rows = RayShooter::new(2 * n + 1, &horizontal);
        let across_cols = RayShooter::new(2 * n + 1, &vertical);

        let mut oracle = TypesOracle {
            n,
            inside,
            corners: Vec::new(),
            corner_index: RangeEmptiness::new(&[]),
            across_rows,
            across_cols,
            boundary_segments,
        };
        // every corner window contains a corner cell of some rectangle
        let mut found = BTreeSet::new();
        for r in rects {
            for (ci, cj) in [(r.r1, r.c1), (r.r1, r.c2), (r.r2, r.c1), (r.r2, r.c2)] {
                for i in ci.saturating_sub(1).max(1)..=ci.min(n - 1) {
                    for j in cj.saturating_sub(1).max(1)..=cj.min(n - 1) {
                        if oracle.window_mixed(i, j) {
                            found.insert((j, i));
                        }
                    }
                }
            }
        }
        oracle.corners = found.into_iter().collect();
        oracle.corner_index = RangeEmptiness::new(&oracle.corners);
        Ok(oracle)
    }

    fn window_mixed(&self, i: usize, j: usize) -> bool {
        let (a, b) = (self.get(i, j), self.get(i, j + 1));
        let (c, d) = (self.get(i + 1, j), self.get(i + 1, j + 1));
        !(a == c && b == d) && !(a == b && c == d)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Corner set as `(column, row)` top-left window positions.
    pub fn corners(&self) -> &[(usize, usize)] {
        &self.corners
    }

    pub fn boundary_segments(&self) -> usize {
        self.boundary_segments
    }

    #[inline]
    pub(crate) fn get(&self, i: usize, j: usize) -> bool {
        self.inside.locate(2 * j - 1, 2 * i - 1).is_some()
    }

    pub fn entry(&self, i: usize, j: usize) -> Result<bool> {
        if i == 0 || j == 0 || i > self.n || j > self.n {
            return Err(bounds(format!("entry ({i},{j}) outside 1..={}", self.n)));
        }
        Ok(self.get(i, j))
    }

    pub fn query_type(&self, z: &Rect) -> Result<SubmatrixType> {
        z.check(self.n)?;
        Ok(self.classify(z))
    }

    pub(crate) fn classify(&self, z: &Rect) -> SubmatrixType {
        if z.r1 < z.r2 && z.c1 < z.c2 && !self.corner_index.range_empty(z.c1, z.c2 - 1, z.r1, z.r2 - 1) {
            return SubmatrixType::Mixed;
        }
        // without corners, first column constant <=> vertical, first row
        // constant <=> horizontal
        let vertical = self.across_rows.seg_intersect_empty(2 * z.c1 - 1, 2 * z.r1 - 1, 2 * z.r2 - 1);
        let horizontal = self.across_cols.seg_intersect_empty(2 * z.r1 - 1, 2 * z.c1 - 1, 2 * z.c2 - 1);
        match (vertical, horizontal) {
            (true, true) => SubmatrixType::constant(self.get(z.r1, z.c1)),
            (true, false) => SubmatrixType::Vertical,
            (false, true) => SubmatrixType::Horizontal,
            (false, false) => {
                debug_assert!(false, "corner-free submatrix {z} is neither vertical nor horizontal");
                SubmatrixType::Mixed
            }
        }
    }

    /// Approximate size of the auxiliary structures in bits (not bounded).
    pub fn aux_bits(&self) -> usize {
        let word = usize::BITS as usize;
        self.inside.bits()
            + self.corner_index.stored_values() * word
            + (self.across_rows.node_count() + self.across_cols.node_count()) * 4 * 32
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{classify, corners, realize, BinaryMatrix};
    use rand::{Rng, SeedableRng};

    /// Row-run decomposition of a matrix: one rectangle per maximal run of
    /// 1s in each row, then vertically merged when identical.
    fn decompose(m: &BinaryMatrix) -> RectangleDecomposition {
        let n = m.n();
        let mut open: HashMap<(usize, usize), usize> = HashMap::new();
        let mut rects: Vec<Rect> = Vec::new();
        for i in 1..=n {
            let mut runs = Vec::new();
            let mut j = 1;
            while j <= n {
                if m.get(i, j) {
                    let s = j;
                    while j <= n && m.get(i, j) {
                        j += 1;
                    }
                    runs.push((s, j - 1));
                } else {
                    j += 1;
                }
            }
            let mut next = HashMap::new();
            for run in runs {
                match open.get(&run) {
                    Some(&k) => {
                        rects[k].r2 = i;
                        next.insert(run, k);
                    }
                    None => {
                        rects.push(Rect::new(i, i, run.0, run.1));
                        next.insert(run, rects.len() - 1);
                    }
                }
            }
            open = next;
        }
        RectangleDecomposition::new(n, rects).unwrap()
    }

    fn random_matrix(rng: &mut impl Rng, n: usize) -> BinaryMatrix {
        // blocky matrices so that rectangles, corners and strips all occur
        let mut m = BinaryMatrix::zeros(n);
        let (bh, bw) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let p = rng.gen_range(0.1..0.9);
        for bi in (1..=n).step_by(bh) {
            for bj in (1..=n).step_by(bw) {
                if rng.gen_bool(p) {
                    m.fill(&Rect::new(bi, (bi + bh - 1).min(n), bj, (bj + bw - 1).min(n)), true);
                }
            }
        }
        for _ in 0..rng.gen_range(0..4) {
            let (i, j) = (rng.gen_range(1..=n), rng.gen_range(1..=n));
            m.set(i, j, !m.get(i, j));
        }
        m
    }

    #[test]
    fn examples() {
        let o = TypesOracle::build(&RectangleDecomposition::empty(4)).unwrap();
        assert!(o.corners().is_empty());
        assert_eq!(o.query_type(&Rect::new(1, 4, 1, 4)).unwrap(), SubmatrixType::Constant0);
        assert!(!o.entry(2, 3).unwrap());

        let full = RectangleDecomposition::new(4, vec![Rect::new(1, 4, 1, 4)]).unwrap();
        let o = TypesOracle::build(&full).unwrap();
        assert!(o.corners().is_empty());
        assert_eq!(o.query_type(&Rect::new(2, 3, 1, 4)).unwrap(), SubmatrixType::Constant1);

        let o = TypesOracle::build(&decompose(&BinaryMatrix::from_literal("01;11").unwrap())).unwrap();
        assert_eq!(o.corners(), &[(1, 1)]);

        let o = TypesOracle::build(&decompose(&BinaryMatrix::from_literal("01;01").unwrap())).unwrap();
        assert_eq!(o.query_type(&Rect::new(1, 2, 1, 2)).unwrap(), SubmatrixType::Vertical);
        assert_eq!(o.query_type(&Rect::new(2, 2, 2, 2)).unwrap(), SubmatrixType::Constant1);

        let o = TypesOracle::build(&decompose(&BinaryMatrix::from_literal("01;10").unwrap())).unwrap();
        assert_eq!(o.query_type(&Rect::new(1, 2, 1, 2)).unwrap(), SubmatrixType::Mixed);

        let one = RectangleDecomposition::new(3, vec![Rect::new(1, 1, 1, 1)]).unwrap();
        let o = TypesOracle::build(&one).unwrap();
        assert!(o.entry(1, 1).unwrap());
        assert!(o.entry(0, 1).is_err());
        assert!(o.query_type(&Rect::new(1, 4, 1, 1)).is_err());
    }

    #[test]
    fn entries_and_corners_match_realized_matrix() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for n in [1, 2, 5, 17, 64, 128] {
            let m = random_matrix(&mut rng, n);
            let dec = decompose(&m);
            assert_eq!(realize(&dec).unwrap(), m);
            let o = TypesOracle::build(&dec).unwrap();
            for i in 1..=n {
                for j in 1..=n {
                    assert_eq!(o.entry(i, j).unwrap(), m.get(i, j));
                }
            }
            let expected: Vec<(usize, usize)> = {
                let mut v: Vec<_> = corners(&m).into_iter().map(|(i, j)| (j, i)).collect();
                v.sort();
                v
            };
            assert_eq!(o.corners(), expected.as_slice());
        }
    }

    #[test]
    fn every_submatrix_classified_like_the_definition() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(32);
        for n in [2, 3, 6, 11, 16] {
            for _ in 0..3 {
                let m = random_matrix(&mut rng, n);
                let o = TypesOracle::build(&decompose(&m)).unwrap();
                for r1 in 1..=n {
                    for r2 in r1..=n {
                        for c1 in 1..=n {
                            for c2 in c1..=n {
                                let z = Rect::new(r1, r2, c1, c2);
                                assert_eq!(o.query_type(&z).unwrap(), classify(&m, &z).unwrap(), "{m:?} {z}");
                            }
                        }
                    }
                }
            }
        }
    }
}
