/// Static orthogonal range emptiness: a segment tree over the points sorted
/// by x whose nodes keep their points' y-coordinates sorted. A query splits
/// the x-range into O(log n) nodes and binary-searches each.
#[derive(Debug, Clone)]
pub struct RangeEmptiness {
    xs: Vec<usize>,
    size: usize,
    nodes: Vec<Vec<usize>>,
}

impl RangeEmptiness {
    pub fn new(points: &[(usize, usize)]) -> Self {
        let mut pts = points.to_vec();
        pts.sort_unstable();
        let size = pts.len().next_power_of_two();
        let mut nodes = vec![Vec::new(); 2 * size];
        for (k, &(_, y)) in pts.iter().enumerate() {
            nodes[size + k] = vec![y];
        }
        for v in (1..size).rev() {
            let (a, b) = (&nodes[2 * v], &nodes[2 * v + 1]);
            let mut merged = Vec::with_capacity(a.len() + b.len());
            let (mut i, mut j) = (0, 0);
            while i < a.len() || j < b.len() {
                if j == b.len() || (i < a.len() && a[i] <= b[j]) {
                    merged.push(a[i]);
                    i += 1;
                } else {
                    merged.push(b[j]);
                    j += 1;
                }
            }
            nodes[v] = merged;
        }
        RangeEmptiness { xs: pts.iter().map(|p| p.0).collect(), size, nodes }
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    fn node_hits(&self, v: usize, y1: usize, y2: usize) -> bool {
        let ys = &self.nodes[v];
        let k = ys.partition_point(|&y| y < y1);
        k < ys.len() && ys[k] <= y2
    }

    /// True iff no point lies in `[x1, x2] x [y1, y2]`.
    pub fn range_empty(&self, x1: usize, x2: usize, y1: usize, y2: usize) -> bool {
        if x1 > x2 || y1 > y2 {
            return true;
        }
        let mut lo = self.xs.partition_point(|&x| x < x1) + self.size;
        let mut hi = self.xs.partition_point(|&x| x <= x2) + self.size;
        while lo < hi {
            if lo & 1 == 1 {
                if self.node_hits(lo, y1, y2) {
                    return false;
                }
                lo += 1;
            }
            if hi & 1 == 1 {
                hi -= 1;
                if self.node_hits(hi, y1, y2) {
                    return false;
                }
            }
            lo /= 2;
            hi /= 2;
        }
        true
    }

    /// Total stored coordinates, as a size measure.
    pub fn stored_values(&self) -> usize {
        self.nodes.iter().map(Vec::len).sum::<usize>() + self.xs.len()
    }
}
