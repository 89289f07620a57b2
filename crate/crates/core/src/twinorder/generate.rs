use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Axis, ContractionSequence, Fenwick, Merge};
use crate::error::{Error, Result};
use crate::matrix::{BinaryMatrix, Rect};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenConfig {
    /// Probability that both children of a split non-constant zone try to
    /// stay non-constant; otherwise one random child tries. Attempts succeed
    /// while the error budget allows.
    pub divergence: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { divergence: 0.5 }
    }
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub matrix: BinaryMatrix,
    pub sequence: ContractionSequence,
}

pub fn generate(n: usize, d: usize, seed: u64) -> Result<Generated> {
    generate_with(n, d, seed, &GenConfig::default())
}

/// Builds a division sequence top-down by splitting blocks at uniformly
/// random points. Every zone carries a label, non-constant or constant with a
/// value; labels are chosen so that every block has at most `d` non-constant
/// zones, and the entries are the values of the final 1x1 zones. A split
/// non-constant zone keeps both children non-constant with probability
/// `divergence` and one random child otherwise, as far as the budgets allow;
/// when both children end up constant they get different values, so the
/// parent label stays truthful. The witness is the reversed split sequence.
pub fn generate_with(n: usize, d: usize, seed: u64, cfg: &GenConfig) -> Result<Generated> {
    if n == 0 {
        return Err(Error::InvalidN(n));
    }
    if !(0.0..=1.0).contains(&cfg.divergence) {
        return Err(Error::InvalidParameter(format!("divergence {} not in [0, 1]", cfg.divergence)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut matrix = BinaryMatrix::zeros(n);
    let mut starts: [BTreeSet<usize>; 2] = [BTreeSet::from([1]), BTreeSet::from([1])];
    let mut ranks = [Fenwick::new(n), Fenwick::new(n)];
    ranks[0].add(1, 1);
    ranks[1].add(1, 1);
    let mut by: [HashMap<usize, BTreeSet<usize>>; 2] = [HashMap::new(), HashMap::new()];

    if n == 1 || d == 0 {
        let v = rng.gen_bool(0.5);
        if v {
            matrix.fill(&Rect::new(1, n, 1, n), true);
        }
    } else {
        by[0].entry(1).or_default().insert(1);
        by[1].entry(1).or_default().insert(1);
    }

    let mut pending: [Vec<usize>; 2] = [(2..=n).collect(), (2..=n).collect()];
    pending[0].shuffle(&mut rng);
    pending[1].shuffle(&mut rng);
    let mut merges = Vec::with_capacity(2 * n.saturating_sub(1));

    while !pending[0].is_empty() || !pending[1].is_empty() {
        let (r, c) = (pending[0].len(), pending[1].len());
        let ax = if rng.gen_range(0..r + c) < r { 0 } else { 1 };
        let axis = if ax == 0 { Axis::Row } else { Axis::Col };
        let other = 1 - ax;
        let b = pending[ax].pop().unwrap();
        let a = *starts[ax].range(..b).next_back().unwrap();
        let end = starts[ax].range(b + 1..).next().map_or(n, |&x| x - 1);
        starts[ax].insert(b);
        ranks[ax].add(b, 1);
        merges.push(Merge { axis, p: ranks[ax].prefix(b - 1) as usize });

        let Some(zones) = by[ax].remove(&a) else { continue };
        let mut zones: Vec<usize> = zones.into_iter().collect();
        zones.shuffle(&mut rng);
        let (mut top_nc, mut bot_nc) = (0usize, 0usize);
        for o in zones {
            let oend = starts[other].range(o + 1..).next().map_or(n, |&x| x - 1);
            let oset = by[other].get_mut(&o).unwrap();
            oset.remove(&a);
            let mut other_count = oset.len();
            let halves = [(a, b - 1), (b, end)];
            let mut nc = [false; 2];
            let want = if rng.gen_bool(cfg.divergence) {
                [true, true]
            } else {
                let k = rng.gen_range(0..2);
                [k == 0, k == 1]
            };
            for (k, &(s, e)) in halves.iter().enumerate() {
                let budget = if k == 0 { &mut top_nc } else { &mut bot_nc };
                let area = (e - s + 1) * (oend - o + 1);
                if want[k] && area >= 2 && *budget < d && other_count < d {
                    nc[k] = true;
                    *budget += 1;
                    other_count += 1;
                }
            }
            let v: bool = rng.gen();
            let values = match nc {
                [false, false] => [v, !v],
                _ => [v, v],
            };
            for (k, &(s, e)) in halves.iter().enumerate() {
                if nc[k] {
                    by[ax].entry(s).or_default().insert(o);
                    by[other].get_mut(&o).unwrap().insert(s);
                } else if values[k] {
                    let rect = if axis == Axis::Row { Rect::new(s, e, o, oend) } else { Rect::new(o, oend, s, e) };
                    matrix.fill(&rect, true);
                }
            }
            if by[other][&o].is_empty() {
                by[other].remove(&o);
            }
        }
    }
    if !by[0].is_empty() {
        return Err(Error::ConstructionInvariant("generator left a non-constant 1x1 zone".into()));
    }
    merges.reverse();
    Ok(Generated { matrix, sequence: ContractionSequence::new(n, merges) })
}
