use std::collections::BTreeSet;

use serde::Serialize;

use super::{BinaryMatrix, ClassifyTable, Rect, RegularDivision, SubmatrixType};
use crate::error::Result;

/// A zone's content detached from its position: dimensions plus row-major
/// packed bits. Equal zones compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZoneMatrix {
    pub rows: usize,
    pub cols: usize,
    pub bits: Vec<u64>,
}

impl ZoneMatrix {
    pub fn extract(m: &BinaryMatrix, z: &Rect) -> Self {
        let (rows, cols) = (z.rows(), z.cols());
        let mut bits = vec![0u64; (rows * cols).div_ceil(64)];
        for (k, (i, j)) in (z.r1..=z.r2).flat_map(|i| (z.c1..=z.c2).map(move |j| (i, j))).enumerate() {
            if m.get(i, j) {
                bits[k / 64] |= 1 << (k % 64);
            }
        }
        ZoneMatrix { rows, cols, bits }
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        let k = (i - 1) * self.cols + (j - 1);
        (self.bits[k / 64] >> (k % 64)) & 1 == 1
    }

    pub fn to_literal(&self) -> String {
        (1..=self.rows)
            .map(|i| (1..=self.cols).map(|j| if self.get(i, j) { '1' } else { '0' }).collect::<String>())
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// The set of pairwise distinct zones of the `s`-regular division.
pub fn zone_family_naive(m: &BinaryMatrix, s: usize) -> Result<BTreeSet<ZoneMatrix>> {
    let div = RegularDivision::new(m.n(), s)?;
    let t = div.blocks();
    let mut out = BTreeSet::new();
    for i in 1..=t {
        for j in 1..=t {
            out.insert(ZoneMatrix::extract(m, &div.zone_bounds(i, j)?));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Diagnostics {
    pub corners: usize,
    pub mixed_zones: usize,
    pub mixed_cuts: usize,
    pub split_corners: usize,
    pub vertical_strips: usize,
    pub horizontal_strips: usize,
}

fn window_mixed(m: &BinaryMatrix, i: usize, j: usize) -> bool {
    let (a, b, c, d) = (m.get(i, j), m.get(i, j + 1), m.get(i + 1, j), m.get(i + 1, j + 1));
    !(a == c && b == d) && !(a == b && c == d)
}

/// Brute-force structural counts of the `s`-regular division of `m`.
pub fn diagnostics(m: &BinaryMatrix, s: usize) -> Result<Diagnostics> {
    let n = m.n();
    let div = RegularDivision::new(n, s)?;
    let t = div.blocks();
    let table = ClassifyTable::new(m);
    let mut out = Diagnostics { corners: super::corners(m).len(), ..Default::default() };

    let types: Vec<Vec<SubmatrixType>> =
        (1..=t).map(|i| (1..=t).map(|j| table.classify(&div.zone_bounds(i, j).unwrap())).collect()).collect();
    out.mixed_zones = types.iter().flatten().filter(|&&ty| ty == SubmatrixType::Mixed).count();

    for bi in 1..=t {
        let (r1, r2) = div.block_span(bi);
        for bj in 1..=t {
            let (c1, c2) = div.block_span(bj);
            // cut with the right neighbour: windows straddling column c2
            if bj < t && (r1..r2).any(|r| window_mixed(m, r, c2)) {
                out.mixed_cuts += 1;
            }
            // cut with the lower neighbour: windows straddling row r2
            if bi < t && (c1..c2).any(|c| window_mixed(m, r2, c)) {
                out.mixed_cuts += 1;
            }
            if bi < t && bj < t && window_mixed(m, r2, c2) {
                out.split_corners += 1;
            }
        }
    }

    // strips: maximal runs of non-constant vertical (horizontal) zones along a
    // column (row) block whose union keeps the type
    for bj in 1..=t {
        let mut run_start: Option<usize> = None;
        for bi in 1..=t {
            if types[bi - 1][bj - 1] != SubmatrixType::Vertical {
                run_start = None;
                continue;
            }
            let extends =
                run_start.map(|st| table.classify(&div.span_bounds(st, bi, bj, bj).unwrap()) == SubmatrixType::Vertical).unwrap_or(false);
            if !extends {
                out.vertical_strips += 1;
                run_start = Some(bi);
            }
        }
    }
    for bi in 1..=t {
        let mut run_start: Option<usize> = None;
        for bj in 1..=t {
            if types[bi - 1][bj - 1] != SubmatrixType::Horizontal {
                run_start = None;
                continue;
            }
            let extends =
                run_start.map(|st| table.classify(&div.span_bounds(bi, bi, st, bj).unwrap()) == SubmatrixType::Horizontal).unwrap_or(false);
            if !extends {
                out.horizontal_strips += 1;
                run_start = Some(bj);
            }
        }
    }
    Ok(out)
}
