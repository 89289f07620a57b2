//! Contraction sequences over divisions into consecutive blocks, error-value
//! verification, rectangle-decomposition extraction and a generator of
//! twin-ordered matrices with witnesses.

mod extract;
mod generate;

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::matrix::{BinaryMatrix, Rect};

pub use extract::extract_decomposition;
pub use generate::{generate, generate_with, GenConfig, Generated};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Row,
    Col,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Row => "R",
            Axis::Col => "C",
        })
    }
}

/// Merge block `p` with block `p + 1` (1-based, in the division current at
/// the time of the merge).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Merge {
    pub axis: Axis,
    pub p: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionSequence {
    pub n: usize,
    pub steps: Vec<Merge>,
}

impl ContractionSequence {
    pub fn new(n: usize, steps: Vec<Merge>) -> Self {
        ContractionSequence { n, steps }
    }

    /// Text form: line 1 `n`, then one `R p` / `C p` per step.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for s in &self.steps {
            writeln!(out, "{} {}", s.axis, s.p).unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        let (ln, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header `n`".into() })?;
        let n: usize = header.parse().map_err(|e| Error::Parse { line: ln, msg: format!("{header:?}: {e}") })?;
        let mut steps = Vec::new();
        for (ln, line) in lines {
            let mut it = line.split_whitespace();
            let axis = match it.next() {
                Some("R") => Axis::Row,
                Some("C") => Axis::Col,
                other => return Err(Error::Parse { line: ln, msg: format!("expected R or C, found {other:?}") }),
            };
            let p: usize = it
                .next()
                .ok_or(Error::Parse { line: ln, msg: "missing block index".into() })?
                .parse()
                .map_err(|e| Error::Parse { line: ln, msg: format!("{e}") })?;
            if it.next().is_some() {
                return Err(Error::Parse { line: ln, msg: "trailing tokens".into() });
            }
            steps.push(Merge { axis, p });
        }
        Ok(ContractionSequence { n, steps })
    }

    /// Checks the step count and that every merge index is in range.
    pub fn validate(&self) -> Result<()> {
        self.boundaries().map(|_| ())
    }

    /// For every step, the first row/column of the upper block being merged,
    /// i.e. the boundary that disappears.
    pub(crate) fn boundaries(&self) -> Result<Vec<usize>> {
        let n = self.n;
        if n == 0 {
            return Err(Error::MalformedSequence("n must be positive".into()));
        }
        if self.steps.len() != 2 * n - 2 {
            return Err(Error::MalformedSequence(format!("expected {} steps, found {}", 2 * n - 2, self.steps.len())));
        }
        let mut starts = [(1..=n).collect::<Vec<_>>(), (1..=n).collect::<Vec<_>>()];
        let mut out = Vec::with_capacity(self.steps.len());
        for (k, s) in self.steps.iter().enumerate() {
            let v = &mut starts[s.axis as usize];
            if s.p == 0 || s.p >= v.len() {
                return Err(Error::MalformedSequence(format!("step {}: {} {} out of range for {} blocks", k + 1, s.axis, s.p, v.len())));
            }
            out.push(v.remove(s.p));
        }
        Ok(out)
    }
}

/// Ordered partitions of rows and columns into consecutive blocks, stored as
/// sorted block starts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Division {
    n: usize,
    row_starts: Vec<usize>,
    col_starts: Vec<usize>,
}

impl Division {
    pub fn new(n: usize, row_starts: Vec<usize>, col_starts: Vec<usize>) -> Result<Self> {
        for v in [&row_starts, &col_starts] {
            let ok = v.first() == Some(&1) && v.windows(2).all(|w| w[0] < w[1]) && v.last().is_some_and(|&x| x <= n);
            if !ok {
                return Err(Error::InvalidParameter(format!("block starts {v:?} invalid for n={n}")));
            }
        }
        Ok(Division { n, row_starts, col_starts })
    }

    pub fn finest(n: usize) -> Self {
        Division { n, row_starts: (1..=n).collect(), col_starts: (1..=n).collect() }
    }

    pub fn coarsest(n: usize) -> Self {
        Division { n, row_starts: vec![1], col_starts: vec![1] }
    }

    fn spans(starts: &[usize], n: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        starts.iter().enumerate().map(move |(k, &s)| (s, starts.get(k + 1).map_or(n, |&x| x - 1)))
    }

    pub fn row_blocks(&self) -> Vec<(usize, usize)> {
        Self::spans(&self.row_starts, self.n).collect()
    }

    pub fn col_blocks(&self) -> Vec<(usize, usize)> {
        Self::spans(&self.col_starts, self.n).collect()
    }

    pub fn zones(&self) -> Vec<Rect> {
        let cols = self.col_blocks();
        self.row_blocks().into_iter().flat_map(|(r1, r2)| cols.iter().map(move |&(c1, c2)| Rect::new(r1, r2, c1, c2))).collect()
    }

    pub fn apply(&mut self, step: Merge) -> Result<()> {
        let v = match step.axis {
            Axis::Row => &mut self.row_starts,
            Axis::Col => &mut self.col_starts,
        };
        if step.p == 0 || step.p >= v.len() {
            return Err(Error::MalformedSequence(format!("{} {} out of range", step.axis, step.p)));
        }
        v.remove(step.p);
        Ok(())
    }
}

/// Maximum, over all row and column blocks, of the number of non-constant
/// zones in the block.
pub fn error_value(m: &BinaryMatrix, div: &Division) -> usize {
    let rows = div.row_blocks();
    let cols = div.col_blocks();
    let mut col_counts = vec![0usize; cols.len()];
    let mut best = 0;
    for &(r1, r2) in &rows {
        let mut row_count = 0;
        for (k, &(c1, c2)) in cols.iter().enumerate() {
            if m.zone_constant(&Rect::new(r1, r2, c1, c2)).is_none() {
                row_count += 1;
                col_counts[k] += 1;
            }
        }
        best = best.max(row_count);
    }
    best.max(col_counts.into_iter().max().unwrap_or(0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verification {
    pub ok: bool,
    pub max_error: usize,
}

/// Non-constant zones of the current division, indexed from both sides.
#[derive(Default)]
struct NonConstantZones {
    by_row: HashMap<usize, BTreeSet<usize>>,
    by_col: HashMap<usize, BTreeSet<usize>>,
}

impl NonConstantZones {
    fn of(&self, axis: Axis, start: usize) -> usize {
        let map = if axis == Axis::Row { &self.by_row } else { &self.by_col };
        map.get(&start).map_or(0, BTreeSet::len)
    }

    fn contains(&self, r: usize, c: usize) -> bool {
        self.by_row.get(&r).is_some_and(|s| s.contains(&c))
    }

    fn insert(&mut self, r: usize, c: usize) {
        self.by_row.entry(r).or_default().insert(c);
        self.by_col.entry(c).or_default().insert(r);
    }

    fn remove(&mut self, r: usize, c: usize) {
        if let Some(s) = self.by_row.get_mut(&r) {
            s.remove(&c);
            if s.is_empty() {
                self.by_row.remove(&r);
            }
        }
        if let Some(s) = self.by_col.get_mut(&c) {
            s.remove(&r);
            if s.is_empty() {
                self.by_col.remove(&c);
            }
        }
    }
}

/// Replays `seq` from the finest division and reports whether every division
/// has error value at most `d`, together with the largest error value seen.
///
/// Zones are tracked by their top-left cell. A merged zone is non-constant
/// iff one of its halves is, or both are constant with different values;
/// only columns in the XOR of the two leading rows (or rows in the XOR of
/// the two leading columns) can switch from constant to non-constant.
pub fn verify_sequence(m: &BinaryMatrix, seq: &ContractionSequence, d: usize) -> Result<Verification> {
    let n = m.n();
    if seq.n != n {
        return Err(Error::MalformedSequence(format!("sequence is for n={}, matrix has n={n}", seq.n)));
    }
    let boundaries = seq.boundaries()?;
    let transposed = transpose(m);
    let stride = n.div_ceil(64);
    // bit masks of current block starts, per axis
    let mut start_mask = [vec![0u64; stride], vec![0u64; stride]];
    for mask in start_mask.iter_mut() {
        for x in 1..=n {
            mask[(x - 1) / 64] |= 1 << ((x - 1) % 64);
        }
    }
    let mut starts: [BTreeSet<usize>; 2] = [(1..=n).collect(), (1..=n).collect()];
    let mut nc = NonConstantZones::default();
    let mut hist = vec![0usize; n + 1];
    hist[0] = 2 * n;
    let mut cur_max = 0usize;
    let mut max_error = 0usize;

    for (step, &b) in seq.steps.iter().zip(&boundaries) {
        let axis = step.axis;
        let (ax, other) = (axis as usize, 1 - axis as usize);
        let a = *starts[ax].range(..b).next_back().expect("boundary has a predecessor block");
        let (src, other_axis) = if axis == Axis::Row { (m, Axis::Col) } else { (&transposed, Axis::Row) };

        // candidate blocks on the other axis
        let mut cand: BTreeSet<usize> = BTreeSet::new();
        let (wa, wb) = (src.row_words(a), src.row_words(b));
        for (w, mask) in start_mask[other].iter().enumerate() {
            let mut x = (wa[w] ^ wb[w]) & mask;
            while x != 0 {
                cand.insert(w * 64 + x.trailing_zeros() as usize + 1);
                x &= x - 1;
            }
        }
        let key = |s: usize, o: usize| if axis == Axis::Row { (s, o) } else { (o, s) };
        let lists = if axis == Axis::Row { &nc.by_row } else { &nc.by_col };
        for s in [a, b] {
            if let Some(set) = lists.get(&s) {
                cand.extend(set.iter().copied());
            }
        }

        let bump = |hist: &mut Vec<usize>, old: usize, new: usize| {
            hist[old] -= 1;
            hist[new] += 1;
        };
        let (old_a, old_b) = (nc.of(axis, a), nc.of(axis, b));
        for &o in &cand {
            let before = nc.of(other_axis, o);
            let (ka, kb) = (key(a, o), key(b, o));
            let was_a = nc.contains(ka.0, ka.1);
            let was_b = nc.contains(kb.0, kb.1);
            let now = was_a || was_b || src.get(a, o) != src.get(b, o);
            nc.remove(ka.0, ka.1);
            nc.remove(kb.0, kb.1);
            if now {
                nc.insert(ka.0, ka.1);
            }
            let after = nc.of(other_axis, o);
            if after != before {
                bump(&mut hist, before, after);
                cur_max = cur_max.max(after);
            }
        }
        let new_a = nc.of(axis, a);
        bump(&mut hist, old_a, new_a);
        hist[old_b] -= 1;
        cur_max = cur_max.max(new_a);
        while cur_max > 0 && hist[cur_max] == 0 {
            cur_max -= 1;
        }
        max_error = max_error.max(cur_max);

        starts[ax].remove(&b);
        start_mask[ax][(b - 1) / 64] &= !(1 << ((b - 1) % 64));
    }
    Ok(Verification { ok: max_error <= d, max_error })
}

pub(crate) fn transpose(m: &BinaryMatrix) -> BinaryMatrix {
    let n = m.n();
    let mut t = BinaryMatrix::zeros(n);
    for i in 1..=n {
        for j in 1..=n {
            if m.get(i, j) {
                t.set(j, i, true);
            }
        }
    }
    t
}

/// Fenwick tree over positions `1..=n` with 0/1 weights.
pub(crate) struct Fenwick {
    tree: Vec<i64>,
}

impl Fenwick {
    pub(crate) fn new(n: usize) -> Self {
        Fenwick { tree: vec![0; n + 1] }
    }

    pub(crate) fn add(&mut self, mut i: usize, v: i64) {
        while i < self.tree.len() {
            self.tree[i] += v;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum over `1..=i`.
    pub(crate) fn prefix(&self, mut i: usize) -> i64 {
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}
