use super::PersistentKTree;
use crate::error::{Error, Result};
use crate::matrix::{check_disjoint, Rect};

/// Half-open integer rectangle `[x1, x2) x [y1, y2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfOpenRect {
    pub x1: usize,
    pub x2: usize,
    pub y1: usize,
    pub y2: usize,
}

impl HalfOpenRect {
    pub fn new(x1: usize, x2: usize, y1: usize, y2: usize) -> Self {
        HalfOpenRect { x1, x2, y1, y2 }
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.x1 <= x && x < self.x2 && self.y1 <= y && y < self.y2
    }

    fn is_empty(&self) -> bool {
        self.x1 >= self.x2 || self.y1 >= self.y2
    }
}

/// Orthogonal point location over interior-disjoint rectangles in
/// `[0, n]^2`. A left-to-right sweep inserts each rectangle's y-range into a
/// persistent k-ary tree at `x1` and removes it at `x2`; `ver_x` keeps the
/// version current at every `x`. A query descends one version.
#[derive(Debug, Clone)]
pub struct PointLocator {
    n: usize,
    tree: PersistentKTree,
    ver: Vec<usize>,
    payloads: Vec<u32>,
}

impl PointLocator {
    pub fn build(n: usize, rects: &[(HalfOpenRect, u32)], h: usize) -> Result<Self> {
        Self::build_in(PersistentKTree::for_universe(n.max(1), h)?, n, rects)
    }

    /// Same, over a `k`-ary tree of depth `h`; requires `k^h >= n`.
    pub fn build_with_arity(n: usize, rects: &[(HalfOpenRect, u32)], k: usize, h: usize) -> Result<Self> {
        let tree = PersistentKTree::new(k, h)?;
        if tree.universe() < n {
            return Err(Error::InvalidParameter(format!("k^h = {} does not cover {n}", tree.universe())));
        }
        Self::build_in(tree, n, rects)
    }

    fn build_in(mut tree: PersistentKTree, n: usize, rects: &[(HalfOpenRect, u32)]) -> Result<Self> {
        let live: Vec<usize> = (0..rects.len()).filter(|&k| !rects[k].0.is_empty()).collect();
        for &k in &live {
            let r = rects[k].0;
            if r.x2 > n || r.y2 > n {
                return Err(Error::Bounds(format!("rectangle {r:?} outside [0, {n}]^2")));
            }
        }
        let as_cells: Vec<Rect> = live
            .iter()
            .map(|&k| {
                let r = rects[k].0;
                Rect::new(r.y1 + 1, r.y2, r.x1 + 1, r.x2)
            })
            .collect();
        check_disjoint(&as_cells)?;

        let mut starts: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
        let mut ends: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
        for &k in &live {
            starts[rects[k].0.x1].push(k);
            ends[rects[k].0.x2].push(k);
        }
        let mut ver = Vec::with_capacity(n);
        let mut cur = 0;
        for x in 0..n {
            for &k in &ends[x] {
                let r = rects[k].0;
                cur = tree.remove(cur, r.y1, r.y2 - 1)?;
            }
            for &k in &starts[x] {
                let r = rects[k].0;
                // label k + 1 so that 0 stays "outside"
                cur = tree.insert_labeled(cur, r.y1, r.y2 - 1, k as u32 + 1)?;
            }
            ver.push(cur);
        }
        Ok(PointLocator { n, tree, ver, payloads: rects.iter().map(|&(_, p)| p).collect() })
    }

    /// Index (into the build input) of the rectangle containing `(x, y)`.
    pub fn locate_index(&self, x: usize, y: usize) -> Option<usize> {
        if x >= self.n || y >= self.n {
            return None;
        }
        match self.tree.label_unchecked(self.ver[x], y) {
            0 => None,
            l => Some(l as usize - 1),
        }
    }

    /// Like `locate_index`, plus the number of tree nodes visited.
    pub fn locate_with_path(&self, x: usize, y: usize) -> Result<(Option<usize>, usize)> {
        if x >= self.n || y >= self.n {
            return Err(Error::Bounds(format!("point ({x}, {y}) outside [0, {})^2", self.n)));
        }
        let (label, path) = self.tree.label_with_path(self.ver[x], y)?;
        Ok(((label as usize).checked_sub(1), path))
    }

    pub fn locate(&self, x: usize, y: usize) -> Option<u32> {
        self.locate_index(x, y).map(|k| self.payloads[k])
    }

    pub fn depth(&self) -> usize {
        self.tree.h()
    }

    pub fn tree(&self) -> &PersistentKTree {
        &self.tree
    }

    /// Node pool plus the version table.
    pub fn bits(&self) -> usize {
        let label_bits = usize::BITS as usize - self.payloads.len().leading_zeros() as usize;
        let ver_bits = usize::BITS as usize - self.tree.versions().leading_zeros() as usize;
        self.tree.pool_bits(label_bits.max(1)) + self.ver.len() * ver_bits
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn examples() {
        let l = PointLocator::build(4, &[], 3).unwrap();
        assert_eq!(l.locate(0, 0), None);
        let l = PointLocator::build(4, &[(HalfOpenRect::new(0, 2, 0, 2), 7)], 3).unwrap();
        assert_eq!(l.locate(1, 1), Some(7));
        assert_eq!(l.locate(2, 1), None);

        // abutting along x = 2 and along y = 2
        let rs = [(HalfOpenRect::new(0, 2, 0, 2), 1), (HalfOpenRect::new(2, 4, 0, 2), 2), (HalfOpenRect::new(0, 2, 2, 4), 3)];
        let l = PointLocator::build(4, &rs, 2).unwrap();
        assert_eq!(l.locate(2, 1), Some(2));
        assert_eq!(l.locate(1, 2), Some(3));
        assert_eq!(l.locate(2, 2), None);
    }

    #[test]
    fn overlap_rejected() {
        let rs = [(HalfOpenRect::new(0, 3, 0, 3), 1), (HalfOpenRect::new(2, 4, 2, 4), 2)];
        assert!(matches!(PointLocator::build(4, &rs, 2), Err(Error::Overlap(..))));
    }

    /// Random disjoint rectangles by carving a grid of random cells.
    fn random_rects(rng: &mut impl Rng, n: usize, count: usize) -> Vec<(HalfOpenRect, u32)> {
        let mut taken = vec![false; n * n];
        let mut out = Vec::new();
        for id in 0..count as u32 * 4 {
            if out.len() == count {
                break;
            }
            let (x1, y1) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let (x2, y2) = ((x1 + rng.gen_range(1..=8)).min(n), (y1 + rng.gen_range(1..=8)).min(n));
            if (x1..x2).any(|x| (y1..y2).any(|y| taken[x * n + y])) {
                continue;
            }
            for x in x1..x2 {
                for y in y1..y2 {
                    taken[x * n + y] = true;
                }
            }
            out.push((HalfOpenRect::new(x1, x2, y1, y2), id));
        }
        out
    }

    #[test]
    fn agrees_with_naive_scan() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let n = 200;
        let rects = random_rects(&mut rng, n, 1000);
        for h in [2, 3, 5] {
            let l = PointLocator::build(n, &rects, h).unwrap();
            for _ in 0..10_000 {
                let (x, y) = (rng.gen_range(0..n + 2), rng.gen_range(0..n + 2));
                let naive = rects.iter().find(|(r, _)| r.contains(x, y)).map(|&(_, p)| p);
                assert_eq!(l.locate(x, y), naive, "({x}, {y})");
            }
        }
    }
}
