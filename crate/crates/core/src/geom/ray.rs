use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Horizontal segment at height `y` spanning `x1..=x2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HSegment {
    pub y: usize,
    pub x1: usize,
    pub x2: usize,
}

#[derive(Debug, Clone, Copy)]
struct Node {
    key: (usize, u32),
    prio: u32,
    left: u32,
    right: u32,
}

/// Vertical ray shooting among horizontal segments. A sweep over x keeps
/// the segments crossing the sweep line in a persistent treap keyed by
/// `(y, id)`; updates copy the split/merge paths, and `ver[x]` holds the
/// root current at each x. A query is one successor search.
#[derive(Debug, Clone)]
pub struct RayShooter {
    nodes: Vec<Node>,
    ver: Vec<u32>,
    segments: Vec<HSegment>,
}

const NIL: u32 = 0;

impl RayShooter {
    /// Segments must satisfy `x1 <= x2 < width`.
    pub fn new(width: usize, segments: &[HSegment]) -> Self {
        let mut rs = RayShooter {
            nodes: vec![Node { key: (0, 0), prio: 0, left: NIL, right: NIL }],
            ver: Vec::with_capacity(width),
            segments: segments.to_vec(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0x7265_7973);
        let mut starts: Vec<Vec<u32>> = vec![Vec::new(); width + 1];
        let mut ends: Vec<Vec<u32>> = vec![Vec::new(); width + 1];
        for (id, s) in segments.iter().enumerate() {
            assert!(s.x1 <= s.x2 && s.x2 < width, "segment {s:?} outside width {width}");
            starts[s.x1].push(id as u32);
            ends[s.x2 + 1].push(id as u32);
        }
        let mut root = NIL;
        for x in 0..width {
            for &id in &ends[x] {
                root = rs.remove(root, (segments[id as usize].y, id));
            }
            for &id in &starts[x] {
                let prio = rng.gen::<u32>() | 1;
                root = rs.insert(root, (segments[id as usize].y, id), prio);
            }
            rs.ver.push(root);
        }
        rs
    }

    fn copy(&mut self, t: u32) -> u32 {
        let n = self.nodes[t as usize];
        self.nodes.push(n);
        (self.nodes.len() - 1) as u32
    }

    /// Splits `t` into keys `< key` and keys `>= key`, copying touched nodes.
    fn split(&mut self, t: u32, key: (usize, u32)) -> (u32, u32) {
        if t == NIL {
            return (NIL, NIL);
        }
        let c = self.copy(t);
        if self.nodes[c as usize].key < key {
            let (a, b) = self.split(self.nodes[c as usize].right, key);
            self.nodes[c as usize].right = a;
            (c, b)
        } else {
            let (a, b) = self.split(self.nodes[c as usize].left, key);
            self.nodes[c as usize].left = b;
            (a, c)
        }
    }

    fn merge(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        if self.nodes[a as usize].prio >= self.nodes[b as usize].prio {
            let c = self.copy(a);
            let r = self.merge(self.nodes[c as usize].right, b);
            self.nodes[c as usize].right = r;
            c
        } else {
            let c = self.copy(b);
            let l = self.merge(a, self.nodes[c as usize].left);
            self.nodes[c as usize].left = l;
            c
        }
    }

    fn insert(&mut self, t: u32, key: (usize, u32), prio: u32) -> u32 {
        let (a, b) = self.split(t, key);
        self.nodes.push(Node { key, prio, left: NIL, right: NIL });
        let leaf = (self.nodes.len() - 1) as u32;
        let left = self.merge(a, leaf);
        self.merge(left, b)
    }

    fn remove(&mut self, t: u32, key: (usize, u32)) -> u32 {
        let (a, b) = self.split(t, key);
        let (_, c) = self.split(b, (key.0, key.1 + 1));
        self.merge(a, c)
    }

    /// Lowest segment with height `>= y` crossing the vertical line `x`.
    pub fn ray_shoot(&self, x: usize, y: usize) -> Option<usize> {
        let mut t = *self.ver.get(x)?;
        let mut best = None;
        while t != NIL {
            let node = &self.nodes[t as usize];
            if node.key.0 >= y {
                best = Some(node.key.1 as usize);
                t = node.left;
            } else {
                t = node.right;
            }
        }
        best
    }

    /// True iff the vertical segment `{x} x [y1, y2]` meets no segment.
    pub fn seg_intersect_empty(&self, x: usize, y1: usize, y2: usize) -> bool {
        self.ray_shoot(x, y1).is_none_or(|id| self.segments[id].y > y2)
    }

    pub fn segment(&self, id: usize) -> HSegment {
        self.segments[id]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}
