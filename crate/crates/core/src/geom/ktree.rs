use crate::error::{Error, Result};

/// Persistent perfect `k`-ary tree of depth `h` over the universe
/// `0..k^h`. Every node carries a label (0 = unset) and `k` child ids; node
/// 0 is the shared all-unset node. Updates copy the touched paths and never
/// modify existing nodes, so every version stays queryable.
///
/// A point `y` belongs to version `t` iff some node on the root-to-leaf-`y`
/// path of `t` has a non-zero label; that label is reported by `label`.
#[derive(Debug, Clone)]
pub struct PersistentKTree {
    k: usize,
    h: usize,
    universe: usize,
    labels: Vec<u32>,
    children: Vec<u32>,
    roots: Vec<u32>,
}

impl PersistentKTree {
    pub fn new(k: usize, h: usize) -> Result<Self> {
        if k < 2 || h == 0 {
            return Err(Error::InvalidParameter(format!("k={k}, h={h}: need k >= 2, h >= 1")));
        }
        let universe = k
            .checked_pow(h as u32)
            .filter(|&u| u <= u32::MAX as usize)
            .ok_or_else(|| Error::InvalidParameter(format!("k^h overflows for k={k}, h={h}")))?;
        Ok(PersistentKTree { k, h, universe, labels: vec![0], children: vec![0; k], roots: vec![0] })
    }

    /// Smallest tree with depth `h` covering `0..n`: `k = ceil(n^(1/h))`.
    pub fn for_universe(n: usize, h: usize) -> Result<Self> {
        let mut k = 2usize;
        while k.checked_pow(h as u32).is_some_and(|u| u < n) {
            k += 1;
        }
        Self::new(k, h)
    }

    /// Depth of a binary tree covering `0..n`.
    pub fn binary_depth(n: usize) -> usize {
        (usize::BITS - n.max(2).saturating_sub(1).leading_zeros()) as usize
    }

    /// `h = ceil(2 / eps) + 1`.
    pub fn depth_for_epsilon(eps: f64) -> Result<usize> {
        if !(eps > 0.0 && eps <= 2.0) {
            return Err(Error::InvalidParameter(format!("epsilon {eps} not in (0, 2]")));
        }
        Ok((2.0 / eps).ceil() as usize + 1)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn versions(&self) -> usize {
        self.roots.len()
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Pool size in bits with labels of `label_bits` and child ids of
    /// `ceil(log2(node_count))` bits.
    pub fn pool_bits(&self, label_bits: usize) -> usize {
        let id_bits = usize::BITS as usize - (self.node_count().max(2) - 1).leading_zeros() as usize;
        self.node_count() * (label_bits + self.k * id_bits) + self.roots.len() * id_bits
    }

    fn check_version(&self, version: usize) -> Result<()> {
        if version >= self.roots.len() {
            return Err(Error::Bounds(format!("version {version} does not exist ({} versions)", self.roots.len())));
        }
        Ok(())
    }

    fn check_interval(&self, l: usize, r: usize) -> Result<()> {
        if l > r || r >= self.universe {
            return Err(Error::Bounds(format!("interval [{l}, {r}] outside 0..{}", self.universe)));
        }
        Ok(())
    }

    fn copy_node(&mut self, id: u32) -> u32 {
        let new = self.labels.len() as u32;
        self.labels.push(self.labels[id as usize]);
        let base = id as usize * self.k;
        self.children.extend_from_within(base..base + self.k);
        new
    }

    fn assign(&mut self, node: u32, lo: usize, size: usize, l: usize, r: usize, label: u32) -> u32 {
        let new = self.copy_node(node);
        if l <= lo && lo + size - 1 <= r {
            debug_assert!(
                (label == 0) != (self.labels[new as usize] == 0),
                "insert over a marked base interval or remove of an unmarked one"
            );
            self.labels[new as usize] = label;
            return new;
        }
        let step = size / self.k;
        for c in 0..self.k {
            let clo = lo + c * step;
            if clo > r || clo + step - 1 < l {
                continue;
            }
            let child = self.children[new as usize * self.k + c];
            let updated = self.assign(child, clo, step, l, r, label);
            self.children[new as usize * self.k + c] = updated;
        }
        new
    }

    /// New version of `version` with `[l, r]` marked by `label` (non-zero).
    /// The caller keeps marked intervals pairwise disjoint.
    pub fn insert_labeled(&mut self, version: usize, l: usize, r: usize, label: u32) -> Result<usize> {
        self.check_version(version)?;
        self.check_interval(l, r)?;
        if label == 0 {
            return Err(Error::InvalidParameter("label 0 is reserved for unset".into()));
        }
        let root = self.assign(self.roots[version], 0, self.universe, l, r, label);
        self.roots.push(root);
        Ok(self.roots.len() - 1)
    }

    pub fn insert(&mut self, version: usize, l: usize, r: usize) -> Result<usize> {
        self.insert_labeled(version, l, r, 1)
    }

    /// New version with a previously inserted interval `[l, r]` unmarked.
    pub fn remove(&mut self, version: usize, l: usize, r: usize) -> Result<usize> {
        self.check_version(version)?;
        self.check_interval(l, r)?;
        let root = self.assign(self.roots[version], 0, self.universe, l, r, 0);
        self.roots.push(root);
        Ok(self.roots.len() - 1)
    }

    /// Label covering `y` in `version` (0 if none) and the number of nodes
    /// visited, which is always `h + 1`.
    pub fn label_with_path(&self, version: usize, y: usize) -> Result<(u32, usize)> {
        self.check_version(version)?;
        if y >= self.universe {
            return Err(Error::Bounds(format!("point {y} outside 0..{}", self.universe)));
        }
        Ok(self.descend(version, y))
    }

    fn descend(&self, version: usize, y: usize) -> (u32, usize) {
        let mut node = self.roots[version] as usize;
        let mut found = self.labels[node];
        let mut visited = 1;
        let mut size = self.universe;
        let mut off = y;
        for _ in 0..self.h {
            size /= self.k;
            node = self.children[node * self.k + off / size] as usize;
            off %= size;
            visited += 1;
            if found == 0 {
                found = self.labels[node];
            }
        }
        (found, visited)
    }

    pub fn label(&self, version: usize, y: usize) -> Result<u32> {
        self.label_with_path(version, y).map(|(l, _)| l)
    }

    pub fn member(&self, version: usize, y: usize) -> Result<bool> {
        self.label(version, y).map(|l| l != 0)
    }

    pub(crate) fn label_unchecked(&self, version: usize, y: usize) -> u32 {
        self.descend(version, y).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn examples() {
        let mut t = PersistentKTree::new(2, 3).unwrap();
        let v = t.insert(0, 0, 7).unwrap();
        assert!((0..8).all(|y| t.member(v, y).unwrap()));
        assert!((0..8).all(|y| !t.member(0, y).unwrap()));

        let mut t = PersistentKTree::new(2, 3).unwrap();
        let v = t.insert(0, 0, 2).unwrap();
        assert!(t.member(v, 2).unwrap());
        assert!(!t.member(v, 3).unwrap());

        let mut t = PersistentKTree::new(4, 2).unwrap();
        let v = t.insert(0, 5, 11).unwrap();
        for y in 0..16 {
            assert_eq!(t.member(v, y).unwrap(), (5..=11).contains(&y));
        }

        let mut t = PersistentKTree::new(3, 2).unwrap();
        let v = t.insert(0, 3, 3).unwrap();
        assert!(t.member(v, 3).unwrap());
        let v1 = t.insert(v, 4, 7).unwrap();
        let v2 = t.remove(v1, 4, 7).unwrap();
        assert!(!t.member(v2, 5).unwrap());
        assert!(t.member(v1, 5).unwrap());
    }

    #[test]
    fn bounds_errors() {
        let mut t = PersistentKTree::new(2, 2).unwrap();
        assert!(matches!(t.insert(0, 2, 4), Err(Error::Bounds(_))));
        assert!(matches!(t.insert(3, 0, 0), Err(Error::Bounds(_))));
        assert!(matches!(t.member(0, 4), Err(Error::Bounds(_))));
        assert!(PersistentKTree::new(1, 3).is_err());
    }

    #[test]
    fn depth_for_half_epsilon_is_five() {
        assert_eq!(PersistentKTree::depth_for_epsilon(0.5).unwrap(), 5);
        assert_eq!(PersistentKTree::depth_for_epsilon(2.0).unwrap(), 2);
        assert!(PersistentKTree::depth_for_epsilon(0.0).is_err());
    }

    #[test]
    fn for_universe_picks_smallest_k() {
        let t = PersistentKTree::for_universe(1000, 3).unwrap();
        assert_eq!(t.k(), 10);
        let t = PersistentKTree::for_universe(1001, 3).unwrap();
        assert_eq!(t.k(), 11);
    }

    #[test]
    fn growth_per_update_is_bounded_by_k_squared_h() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for (k, h) in [(2, 6), (4, 4), (16, 2)] {
            let mut t = PersistentKTree::new(k, h).unwrap();
            let u = t.universe();
            for _ in 0..200 {
                let before = t.node_count();
                let a = rng.gen_range(0..u);
                let b = rng.gen_range(a..u);
                let v = t.versions() - 1;
                let v = t.insert(v, a, b).unwrap();
                t.remove(v, a, b).unwrap();
                // two updates, each copying at most 2 paths of base-interval parents
                // plus at most 2(k-1) base-interval nodes per level
                assert!(t.node_count() - before <= 2 * (2 * h + 2 * k * h));
            }
        }
    }
}
