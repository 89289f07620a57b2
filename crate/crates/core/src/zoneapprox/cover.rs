use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// Covered region of an `m x m` grid of blocks, stored as the column-height
/// array `H` (block column `j` is covered in rows `1..=H[j]`) compressed into
/// maximal runs `(h, l, r)` of equal height.
///
/// Runs are kept twice: ordered by `(h, l)` to find the lowest leftmost
/// run, and by `l` to reach position neighbours.
#[derive(Debug, Clone)]
pub struct CoverMaintainer {
    m: usize,
    by_height: BTreeSet<(usize, usize, usize)>,
    by_pos: BTreeMap<usize, (usize, usize)>, // l -> (h, r)
}

impl CoverMaintainer {
    pub fn new(m: usize) -> Self {
        let mut cm = CoverMaintainer { m, by_height: BTreeSet::new(), by_pos: BTreeMap::new() };
        if m > 0 {
            cm.add(0, 1, m);
        }
        cm
    }

    fn add(&mut self, h: usize, l: usize, r: usize) {
        self.by_height.insert((h, l, r));
        self.by_pos.insert(l, (h, r));
    }

    fn drop_run(&mut self, l: usize) -> (usize, usize) {
        let (h, r) = self.by_pos.remove(&l).expect("run exists");
        self.by_height.remove(&(h, l, r));
        (h, r)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Runs in position order.
    pub fn runs(&self) -> Vec<(usize, usize, usize)> {
        self.by_pos.iter().map(|(&l, &(h, r))| (h, l, r)).collect()
    }

    /// Smallest uncovered block in row-major order.
    pub fn get_first(&self) -> Option<(usize, usize)> {
        let &(h, l, _) = self.by_height.first()?;
        (h < self.m).then_some((h + 1, l))
    }

    /// Largest `j'` such that blocks `j..=j'` of the first uncovered row are
    /// all uncovered.
    pub fn extend_right(&self) -> Result<usize> {
        match self.by_height.first() {
            Some(&(h, _, r)) if h < self.m => Ok(r),
            _ => Err(Error::Empty),
        }
    }

    /// Covers the blocks `i..=i2` x `j..=j2` where `(i, j) = get_first()`.
    pub fn cover(&mut self, i2: usize, j2: usize) -> Result<()> {
        let (i, j) = self.get_first().ok_or(Error::Empty)?;
        let r = self.extend_right()?;
        if i2 < i || i2 > self.m || j2 < j || j2 > r {
            return Err(Error::ContractViolation(format!("cover({i2}, {j2}) from ({i}, {j}) with extend_right = {r}, m = {}", self.m)));
        }
        let (h, _) = self.drop_run(j);
        let mut l = j;
        let mut rr = j2;
        if j2 < r {
            self.add(h, j2 + 1, r);
        }
        // merge with an equal-height left neighbour
        if let Some((&pl, &(ph, pr))) = self.by_pos.range(..j).next_back() {
            if ph == i2 && pr + 1 == j {
                self.drop_run(pl);
                l = pl;
            }
        }
        if let Some(&(nh, nr)) = self.by_pos.get(&(j2 + 1)) {
            if nh == i2 {
                self.drop_run(j2 + 1);
                rr = nr;
            }
        }
        self.add(i2, l, rr);
        Ok(())
    }

    /// Expanded height array, for tests and debug checks.
    pub fn heights(&self) -> Vec<usize> {
        let mut out = vec![0; self.m];
        for (h, l, r) in self.runs() {
            out[l - 1..r].fill(h);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn get_first_examples() {
        let mut cm = CoverMaintainer::new(4);
        assert_eq!(cm.get_first(), Some((1, 1)));
        assert_eq!(cm.extend_right().unwrap(), 4);
        cm.cover(2, 3).unwrap();
        assert_eq!(cm.heights(), vec![2, 2, 2, 0]);
        assert_eq!(cm.get_first(), Some((1, 4)));
        assert_eq!(cm.extend_right().unwrap(), 4);

        let mut cm = CoverMaintainer::new(4);
        cm.cover(4, 4).unwrap();
        assert_eq!(cm.heights(), vec![4; 4]);
        assert_eq!(cm.get_first(), None);
        assert!(matches!(cm.extend_right(), Err(Error::Empty)));
        assert!(matches!(cm.cover(4, 4), Err(Error::Empty)));
    }

    /// Maintainer whose runs come from an arbitrary height array.
    fn from_heights(h: &[usize]) -> CoverMaintainer {
        let mut cm = CoverMaintainer { m: h.len(), by_height: BTreeSet::new(), by_pos: BTreeMap::new() };
        let mut l = 1;
        while l <= h.len() {
            let r = (l..=h.len()).take_while(|&c| h[c - 1] == h[l - 1]).last().unwrap();
            cm.add(h[l - 1], l, r);
            l = r + 1;
        }
        cm
    }

    #[test]
    fn extend_right_on_uneven_heights() {
        let cm = from_heights(&[1, 0, 0, 1]);
        assert_eq!(cm.get_first(), Some((1, 2)));
        assert_eq!(cm.extend_right().unwrap(), 3);
        let cm = from_heights(&[2, 2, 2, 0]);
        assert_eq!(cm.extend_right().unwrap(), 4);
    }

    #[test]
    fn cover_merges_runs() {
        let mut cm = CoverMaintainer::new(4);
        cm.cover(1, 2).unwrap();
        assert_eq!(cm.heights(), vec![1, 1, 0, 0]);
        assert_eq!(cm.get_first(), Some((1, 3)));
        cm.cover(1, 4).unwrap();
        assert_eq!(cm.heights(), vec![1, 1, 1, 1]);
        assert_eq!(cm.runs(), vec![(1, 1, 4)]);
    }

    #[test]
    fn contract_violations() {
        let mut cm = CoverMaintainer::new(4);
        cm.cover(2, 2).unwrap();
        // first is (1, 3), extend_right = 4
        assert!(matches!(cm.cover(1, 5), Err(Error::ContractViolation(_))));
        assert!(matches!(cm.cover(1, 2), Err(Error::ContractViolation(_))));
        assert!(matches!(cm.cover(0, 3), Err(Error::ContractViolation(_))));
        assert!(matches!(cm.cover(5, 3), Err(Error::ContractViolation(_))));
    }

    /// Random legal covers against a naive height array.
    #[test]
    fn matches_naive_heights() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..200 {
            let m = rng.gen_range(1..20);
            let mut cm = CoverMaintainer::new(m);
            let mut naive = vec![0usize; m];
            while let Some((i, j)) = cm.get_first() {
                let low = *naive.iter().min().unwrap();
                let jn = naive.iter().position(|&h| h == low).unwrap() + 1;
                assert_eq!((i, j), (low + 1, jn));
                let r = cm.extend_right().unwrap();
                let rn = (jn..=m).take_while(|&c| naive[c - 1] == low).last().unwrap();
                assert_eq!(r, rn);
                let (i2, j2) = (rng.gen_range(i..=m), rng.gen_range(j..=r));
                cm.cover(i2, j2).unwrap();
                naive[j - 1..j2].fill(i2);
                assert_eq!(cm.heights(), naive);
                let runs = cm.runs();
                assert!(runs.windows(2).all(|w| w[0].0 != w[1].0 && w[0].2 + 1 == w[1].1));
            }
            assert!(naive.iter().all(|&h| h == m));
        }
    }
}
