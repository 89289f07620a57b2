//! Layered entry oracle. Layer `i` stores the distinct zones of the
//! `m_i`-regular division: above the bottom each object is a table of child
//! ids into layer `i + 1`, at the bottom each object is an explicit bit block.
//! A query follows one child id per layer.

mod bits;
mod schedule;
mod serial;

use serde::Serialize;

use crate::error::{bounds, Error, Result};
use crate::matrix::RectangleDecomposition;
use crate::subtypes::TypesOracle;
use crate::zoneapprox::{zone_approximation, ZoneCover};

pub use bits::{id_width, radix_order, PackedBits};
pub use schedule::{make_schedule, Schedule};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Layer {
    objects: usize,
    // child id width for tables; 0 for the bottom layer
    width: usize,
    data: PackedBits,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompactOracle {
    n_original: usize,
    n_padded: usize,
    schedule: Schedule,
    layers: Vec<Layer>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Accounting {
    /// Child ids packed at `ceil(log2 |F_{i+1}|)` bits.
    Packed,
    /// Child ids at `ceil(log2 n)` bits.
    Paper,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerBits {
    pub index: usize,
    pub m: usize,
    pub objects: usize,
    /// Side of each object's table (or of the explicit block at the bottom).
    pub table_dim: usize,
    /// Bits per child id; 0 at the bottom.
    pub id_width: usize,
    pub bits: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BitsizeReport {
    pub accounting: Accounting,
    pub layers: Vec<LayerBits>,
    pub bottom_bits: u64,
    pub total_bits: u64,
    pub bits_per_n: f64,
}

/// Per-layer construction counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuildReport {
    /// Size of the zone cover (number of representatives) per layer.
    pub representatives: Vec<usize>,
    /// Number of distinct zones per layer.
    pub objects: Vec<usize>,
}

impl CompactOracle {
    pub fn build(dec: &RectangleDecomposition, beta: f64) -> Result<Self> {
        Self::build_with_report(dec, beta).map(|(o, _)| o)
    }

    /// Pads the decomposition to a power of 2, then builds layers bottom-up:
    /// the bottom layer reads each representative's block through the types
    /// oracle and dedupes the bit strings by radix sort; every upper layer
    /// describes each representative by the ids of its sub-zones'
    /// representatives and dedupes the descriptions by sorting.
    pub fn build_with_report(dec: &RectangleDecomposition, beta: f64) -> Result<(Self, BuildReport)> {
        let n_original = dec.n();
        let n_padded = n_original.max(2).next_power_of_two();
        let schedule = make_schedule(n_padded, beta)?;
        let padded = dec.padded(n_padded)?;
        let types = TypesOracle::build(&padded)?;
        let depth = schedule.depth();

        let mut layers: Vec<Option<Layer>> = vec![None; depth + 1];
        let mut representatives = vec![0; depth + 1];
        let mut objects = vec![0; depth + 1];
        // cover and representative -> object map of the layer below
        let mut below: Option<(ZoneCover, Vec<u32>)> = None;

        for i in (0..=depth).rev() {
            let s = schedule.m[i];
            let zc = zone_approximation(&types, s)?;
            representatives[i] = zc.len();
            let (layer, psi) = match below {
                None => bottom_layer(&types, &zc, s),
                Some((ref lower, ref lower_psi)) => {
                    let r = s / schedule.m[i + 1];
                    let next_objects = objects[i + 1];
                    table_layer(&zc, lower, lower_psi, r, next_objects)?
                }
            };
            objects[i] = layer.objects;
            layers[i] = Some(layer);
            below = Some((zc, psi));
        }
        let oracle = CompactOracle { n_original, n_padded, schedule, layers: layers.into_iter().map(Option::unwrap).collect() };
        if crate::debug_checks() {
            oracle.check_structure()?;
            oracle.check_against(&types, 4096)?;
        }
        Ok((oracle, BuildReport { representatives, objects }))
    }

    pub fn n(&self) -> usize {
        self.n_original
    }

    pub fn n_padded(&self) -> usize {
        self.n_padded
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    /// `l`, the number of child-id dereferences per query.
    pub fn depth(&self) -> usize {
        self.schedule.depth()
    }

    pub fn objects(&self, layer: usize) -> usize {
        self.layers[layer].objects
    }

    pub fn query(&self, i: usize, j: usize) -> Result<bool> {
        self.query_with_hops(i, j).map(|(b, _)| b)
    }

    /// Entry `(i, j)` and the number of child ids followed.
    pub fn query_with_hops(&self, i: usize, j: usize) -> Result<(bool, usize)> {
        if i == 0 || j == 0 || i > self.n_original || j > self.n_original {
            return Err(bounds(format!("entry ({i},{j}) outside 1..={}", self.n_original)));
        }
        Ok(self.descend(i - 1, j - 1))
    }

    #[inline]
    fn descend(&self, mut i: usize, mut j: usize) -> (bool, usize) {
        let m = &self.schedule.m;
        let depth = m.len() - 1;
        let mut obj = 0usize;
        let mut hops = 0;
        for k in 0..depth {
            let (sub, r) = (m[k + 1], m[k] / m[k + 1]);
            let layer = &self.layers[k];
            let slot = obj * r * r + (i / sub) * r + (j / sub);
            obj = layer.data.get(slot * layer.width, layer.width) as usize;
            i %= sub;
            j %= sub;
            hops += 1;
        }
        let b = m[depth];
        (self.layers[depth].data.bit(obj * b * b + i * b + j), hops)
    }

    pub fn bitsize(&self, accounting: Accounting) -> BitsizeReport {
        let m = &self.schedule.m;
        let depth = self.depth();
        let mut layers = Vec::with_capacity(depth + 1);
        let paper_width = id_width(self.n_padded);
        for (k, layer) in self.layers.iter().enumerate() {
            let entry = if k < depth {
                let r = m[k] / m[k + 1];
                let w = match accounting {
                    Accounting::Packed => layer.width,
                    Accounting::Paper => paper_width,
                };
                LayerBits { index: k, m: m[k], objects: layer.objects, table_dim: r, id_width: w, bits: (layer.objects * r * r * w) as u64 }
            } else {
                LayerBits {
                    index: k,
                    m: m[k],
                    objects: layer.objects,
                    table_dim: m[k],
                    id_width: 0,
                    bits: (layer.objects * m[k] * m[k]) as u64,
                }
            };
            layers.push(entry);
        }
        let bottom_bits = layers.last().map_or(0, |l| l.bits);
        let total_bits = layers.iter().map(|l| l.bits).sum();
        BitsizeReport { accounting, layers, bottom_bits, total_bits, bits_per_n: total_bits as f64 / self.n_padded as f64 }
    }

    /// Layer 0 is a single object, every child id is in range and every
    /// object below the root is referenced.
    pub fn check_structure(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::ConstructionInvariant(msg));
        if self.layers[0].objects != 1 {
            return fail(format!("layer 0 has {} objects", self.layers[0].objects));
        }
        let m = &self.schedule.m;
        for k in 0..self.depth() {
            let r = m[k] / m[k + 1];
            let layer = &self.layers[k];
            let next = self.layers[k + 1].objects;
            let mut used = vec![false; next];
            for slot in 0..layer.objects * r * r {
                let id = layer.data.get(slot * layer.width, layer.width) as usize;
                if id >= next {
                    return fail(format!("layer {k}: child id {id} >= {next}"));
                }
                used[id] = true;
            }
            if let Some(id) = used.iter().position(|&u| !u) {
                return fail(format!("layer {}: object {id} unreachable", k + 1));
            }
        }
        Ok(())
    }

    /// Compares up to `samples` entries (all when `n^2` is smaller) with the
    /// types oracle.
    fn check_against(&self, types: &TypesOracle, samples: usize) -> Result<()> {
        let n = self.n_original;
        let total = n * n;
        let step = (total / samples.max(1)).max(1);
        for k in (0..total).step_by(step) {
            let (i, j) = (k / n + 1, k % n + 1);
            if self.query(i, j)? != types.get(i, j) {
                return Err(Error::ConstructionInvariant(format!("entry ({i},{j}) disagrees with the input")));
            }
        }
        Ok(())
    }
}

/// Explicit blocks of the bottom layer, deduplicated by radix sort.
fn bottom_layer(types: &TypesOracle, zc: &ZoneCover, s: usize) -> (Layer, Vec<u32>) {
    let bits = s * s;
    let words = bits.div_ceil(64);
    let reps: Vec<(usize, usize)> = zc.representatives().collect();
    let mut keys = vec![0u64; reps.len() * words];
    for (k, &(p, q)) in reps.iter().enumerate() {
        let key = &mut keys[k * words..(k + 1) * words];
        for a in 0..s {
            for b in 0..s {
                if types.get((p - 1) * s + a + 1, (q - 1) * s + b + 1) {
                    let bit = a * s + b;
                    key[bit / 64] |= 1 << (bit % 64);
                }
            }
        }
    }
    let order = radix_order(&keys, words, bits);
    let mut psi = vec![0u32; reps.len()];
    let mut data = PackedBits::new();
    let mut objects = 0usize;
    let mut prev: Option<usize> = None;
    for &k in &order {
        let key = &keys[k * words..(k + 1) * words];
        if prev.is_none_or(|p| &keys[p * words..(p + 1) * words] != key) {
            for bit in 0..bits {
                data.push((key[bit / 64] >> (bit % 64)) & 1, 1);
            }
            objects += 1;
        }
        psi[k] = (objects - 1) as u32;
        prev = Some(k);
    }
    (Layer { objects, width: 0, data }, psi)
}

/// Tables of child ids, deduplicated by sorting the descriptions.
fn table_layer(zc: &ZoneCover, lower: &ZoneCover, lower_psi: &[u32], r: usize, next_objects: usize) -> Result<(Layer, Vec<u32>)> {
    let cells = r * r;
    let reps: Vec<(usize, usize)> = zc.representatives().collect();
    let mut desc = vec![0u32; reps.len() * cells];
    for (k, &(p, q)) in reps.iter().enumerate() {
        for a in 0..r {
            for b in 0..r {
                let e = lower.element_of((p - 1) * r + a + 1, (q - 1) * r + b + 1)?;
                desc[k * cells + a * r + b] = lower_psi[e];
            }
        }
    }
    let row = |k: usize| &desc[k * cells..(k + 1) * cells];
    let mut order: Vec<usize> = (0..reps.len()).collect();
    order.sort_by(|&x, &y| row(x).cmp(row(y)));
    let width = id_width(next_objects);
    let mut psi = vec![0u32; reps.len()];
    let mut data = PackedBits::new();
    let mut objects = 0usize;
    let mut prev: Option<usize> = None;
    for &k in &order {
        if prev.is_none_or(|p| row(p) != row(k)) {
            for &id in row(k) {
                data.push(id as u64, width);
            }
            objects += 1;
        }
        psi[k] = (objects - 1) as u32;
        prev = Some(k);
    }
    Ok((Layer { objects, width, data }, psi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{realize, zone_family_naive, Rect};
    use crate::twinorder::{extract_decomposition, generate};

    fn assert_matches(o: &CompactOracle, dec: &RectangleDecomposition) {
        let m = realize(dec).unwrap();
        for i in 1..=dec.n() {
            for j in 1..=dec.n() {
                let (b, hops) = o.query_with_hops(i, j).unwrap();
                assert_eq!(b, m.get(i, j), "({i},{j})");
                assert_eq!(hops, o.depth());
            }
        }
    }

    #[test]
    fn constant_inputs() {
        for dec in [RectangleDecomposition::empty(4), RectangleDecomposition::new(4, vec![Rect::new(1, 4, 1, 4)]).unwrap()] {
            let o = CompactOracle::build(&dec, 1.0).unwrap();
            for k in 0..=o.depth() {
                assert_eq!(o.objects(k), 1);
            }
            assert_matches(&o, &dec);
            o.check_structure().unwrap();
        }
    }

    #[test]
    fn zero_bitsize_accounting_n16() {
        let o = CompactOracle::build(&RectangleDecomposition::empty(16), 1.0).unwrap();
        assert_eq!(o.schedule().m, vec![16, 8, 4, 2, 1]);
        let rep = o.bitsize(Accounting::Packed);
        // four tables of 2x2 one-bit ids plus one 1x1 block
        assert_eq!(rep.total_bits, 4 * 4 + 1);
        assert_eq!(rep.bottom_bits, 1);
        let paper = o.bitsize(Accounting::Paper);
        assert_eq!(paper.total_bits, 4 * 4 * 4 + 1);
        let ones = CompactOracle::build(&RectangleDecomposition::new(16, vec![Rect::new(1, 16, 1, 16)]).unwrap(), 1.0).unwrap();
        assert_eq!(ones.bitsize(Accounting::Packed), rep);
    }

    #[test]
    fn checkerboard_of_rectangles() {
        let rects = (0..4)
            .flat_map(|a| (0..4).map(move |b| (a, b)))
            .filter(|(a, b)| (a + b) % 2 == 0)
            .map(|(a, b)| Rect::new(2 * a + 1, 2 * a + 2, 2 * b + 1, 2 * b + 2))
            .collect();
        let dec = RectangleDecomposition::new(8, rects).unwrap();
        let o = CompactOracle::build(&dec, 1.0).unwrap();
        assert_matches(&o, &dec);
    }

    #[test]
    fn padding_keeps_original_range() {
        let dec = RectangleDecomposition::new(5, vec![Rect::new(2, 5, 3, 5), Rect::new(1, 1, 1, 2)]).unwrap();
        let o = CompactOracle::build(&dec, 1.0).unwrap();
        assert_eq!(o.n_padded(), 8);
        assert_matches(&o, &dec);
        assert!(o.query(6, 1).is_err());
        assert!(o.query(0, 1).is_err());
        let one = RectangleDecomposition::new(1, vec![Rect::new(1, 1, 1, 1)]).unwrap();
        let o = CompactOracle::build(&one, 1.0).unwrap();
        assert!(o.query(1, 1).unwrap());
    }

    #[test]
    fn generated_matrices_and_exact_dedup() {
        for (n, d, seed) in [(32, 1, 0), (64, 2, 1), (128, 3, 2), (256, 2, 3)] {
            let g = generate(n, d, seed).unwrap();
            let dec = extract_decomposition(&g.matrix, &g.sequence).unwrap();
            let (o, report) = CompactOracle::build_with_report(&dec, 1.0).unwrap();
            assert_matches(&o, &dec);
            o.check_structure().unwrap();
            for (k, &s) in o.schedule().m.iter().enumerate() {
                assert_eq!(report.objects[k], zone_family_naive(&g.matrix, s).unwrap().len(), "n={n} s={s}");
                assert!(report.objects[k] <= report.representatives[k]);
            }
        }
    }
}
