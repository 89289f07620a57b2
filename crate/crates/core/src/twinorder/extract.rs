use std::collections::{BTreeSet, HashMap};

use super::{Axis, ContractionSequence};
use crate::error::{Error, Result};
use crate::matrix::{BinaryMatrix, Rect, RectangleDecomposition};

/// Replays `seq` backwards from the single-zone division. Each non-constant
/// zone is split along the undone merge; constant-1 children are emitted as
/// rectangles, constant-0 children dropped, and non-constant children kept.
/// The rectangles are the maximal all-1 zones of the division family.
pub fn extract_decomposition(m: &BinaryMatrix, seq: &ContractionSequence) -> Result<RectangleDecomposition> {
    let n = m.n();
    if seq.n != n {
        return Err(Error::MalformedSequence(format!("sequence is for n={}, matrix has n={n}", seq.n)));
    }
    let boundaries = seq.boundaries()?;
    let mut starts: [BTreeSet<usize>; 2] = [BTreeSet::from([1]), BTreeSet::from([1])];
    // non-constant zones keyed by block start, per axis
    let mut by: [HashMap<usize, BTreeSet<usize>>; 2] = [HashMap::new(), HashMap::new()];
    let mut rects = Vec::new();

    let full = Rect::new(1, n, 1, n);
    match m.zone_constant(&full) {
        Some(true) => rects.push(full),
        Some(false) => {}
        None => {
            by[0].entry(1).or_default().insert(1);
            by[1].entry(1).or_default().insert(1);
        }
    }

    for (step, &b) in seq.steps.iter().zip(&boundaries).rev() {
        let ax = step.axis as usize;
        let other = 1 - ax;
        let a = *starts[ax].range(..b).next_back().expect("boundary has a predecessor block");
        let end = starts[ax].range(b + 1..).next().map_or(n, |&x| x - 1);
        starts[ax].insert(b);
        let Some(zones) = by[ax].remove(&a) else { continue };
        for o in zones {
            let oend = starts[other].range(o + 1..).next().map_or(n, |&x| x - 1);
            let set = by[other].get_mut(&o).expect("indexed from both sides");
            set.remove(&a);
            for (s, e) in [(a, b - 1), (b, end)] {
                let r = if step.axis == Axis::Row { Rect::new(s, e, o, oend) } else { Rect::new(o, oend, s, e) };
                match m.zone_constant(&r) {
                    Some(true) => rects.push(r),
                    Some(false) => {}
                    None => {
                        by[ax].entry(s).or_default().insert(o);
                        by[other].get_mut(&o).unwrap().insert(s);
                    }
                }
            }
            if by[other][&o].is_empty() {
                by[other].remove(&o);
            }
        }
    }
    if !by[0].is_empty() {
        return Err(Error::ConstructionInvariant("non-constant zone left in the finest division".into()));
    }
    RectangleDecomposition::new(n, rects)
}

#[cfg(test)]
mod tests {
    use super::super::{generate, Merge};
    use super::*;
    use crate::matrix::realize;

    #[test]
    fn single_one() {
        let m = BinaryMatrix::from_literal("10;00").unwrap();
        let s = ContractionSequence::new(2, vec![Merge { axis: Axis::Row, p: 1 }, Merge { axis: Axis::Col, p: 1 }]);
        let dec = extract_decomposition(&m, &s).unwrap();
        assert_eq!(dec.rects(), &[Rect::new(1, 1, 1, 1)]);
    }

    #[test]
    fn all_ones_is_one_rectangle() {
        let m = BinaryMatrix::ones(5);
        let g = generate(5, 1, 0).unwrap();
        let dec = extract_decomposition(&m, &g.sequence).unwrap();
        assert_eq!(dec.rects(), &[Rect::new(1, 5, 1, 5)]);
    }

    #[test]
    fn generated_round_trip_and_size_bound() {
        for (n, d, seed) in [(8, 2, 7), (16, 1, 1), (33, 3, 2), (64, 2, 9)] {
            let g = generate(n, d, seed).unwrap();
            let dec = extract_decomposition(&g.matrix, &g.sequence).unwrap();
            assert_eq!(realize(&dec).unwrap(), g.matrix);
            assert!(dec.len() <= d * (2 * n - 2) + 1, "n={n} d={d}: {}", dec.len());
        }
    }
}
