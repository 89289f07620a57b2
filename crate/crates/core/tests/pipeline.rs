use proptest::prelude::*;

use twinmat::compact::{Accounting, CompactOracle};
use twinmat::matrix::io::{format_decomposition, parse_decomposition};
use twinmat::matrix::{zone_family_naive, ClassifyTable, Rect, RegularDivision, ZoneMatrix};
use twinmat::subtypes::TypesOracle;
use twinmat::twinorder::{extract_decomposition, generate, verify_sequence};
use twinmat::zoneapprox::zone_approximation;
use twinmat::RectangleDecomposition;

/// Random disjoint rectangles: greedy placement of candidates that do not
/// hit earlier ones.
fn arb_decomposition(max_n: usize) -> impl Strategy<Value = RectangleDecomposition> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec((1..=n, 1..=n, 1..=n, 1..=n), 0..12).prop_map(move |cands| {
            let mut rects: Vec<Rect> = Vec::new();
            for (a, b, c, d) in cands {
                let r = Rect::new(a.min(b), a.max(b), c.min(d), c.max(d));
                if rects.iter().all(|o| !o.intersects(&r)) {
                    rects.push(r);
                }
            }
            RectangleDecomposition::new(n, rects).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn compact_matches_realize_on_arbitrary_decompositions(dec in arb_decomposition(40), beta in prop::sample::select(vec![0.25, 1.0, 4.0])) {
        let m = dec.realize();
        let oracle = CompactOracle::build(&dec, beta).unwrap();
        for i in 1..=dec.n() {
            for j in 1..=dec.n() {
                let (b, hops) = oracle.query_with_hops(i, j).unwrap();
                prop_assert_eq!(b, m.get(i, j), "entry ({}, {})", i, j);
                prop_assert_eq!(hops, oracle.depth());
            }
        }
        let back = CompactOracle::from_bytes(&oracle.to_bytes()).unwrap();
        prop_assert_eq!(back, oracle);
    }

    #[test]
    fn types_oracle_matches_naive(dec in arb_decomposition(12)) {
        let n = dec.n().next_power_of_two();
        let dec = dec.padded(n).unwrap();
        let types = TypesOracle::build(&dec).unwrap();
        let naive = ClassifyTable::new(&dec.realize());
        for r1 in 1..=n {
            for r2 in r1..=n {
                for c1 in 1..=n {
                    for c2 in c1..=n {
                        let z = Rect::new(r1, r2, c1, c2);
                        prop_assert_eq!(types.query_type(&z).unwrap(), naive.classify(&z), "{}", z);
                    }
                }
            }
        }
    }

    #[test]
    fn decomposition_text_round_trips(dec in arb_decomposition(30)) {
        prop_assert_eq!(parse_decomposition(&format_decomposition(&dec)).unwrap(), dec);
    }
}

#[test]
fn generated_pipeline_end_to_end() {
    for (n, d, seed) in [(64, 1, 1), (128, 2, 2), (256, 3, 3)] {
        let g = generate(n, d, seed).unwrap();
        assert!(verify_sequence(&g.matrix, &g.sequence, d).unwrap().ok);
        let dec = extract_decomposition(&g.matrix, &g.sequence).unwrap();
        assert!(dec.len() <= d * (2 * n - 2) + 1);
        assert_eq!(dec.realize(), g.matrix);

        let types = TypesOracle::build(&dec).unwrap();
        let oracle = CompactOracle::build(&dec, 1.0).unwrap();
        for s in oracle.schedule().m.clone() {
            let cover = zone_approximation(&types, s).unwrap();
            cover.check_partition().unwrap();
            let div = RegularDivision::new(n, s).unwrap();
            for i in 1..=n / s {
                for j in 1..=n / s {
                    let (xi, xj) = cover.xi(i, j).unwrap();
                    let z = ZoneMatrix::extract(&g.matrix, &div.zone_bounds(i, j).unwrap());
                    let rep = ZoneMatrix::extract(&g.matrix, &div.zone_bounds(xi, xj).unwrap());
                    assert_eq!(z, rep, "n={n} s={s} block ({i},{j})");
                }
            }
        }
        for (k, &s) in oracle.schedule().m.iter().enumerate() {
            assert_eq!(oracle.objects(k), zone_family_naive(&g.matrix, s).unwrap().len());
        }
        for i in 1..=n {
            for j in 1..=n {
                assert_eq!(oracle.query(i, j).unwrap(), g.matrix.get(i, j));
            }
        }
        let packed = oracle.bitsize(Accounting::Packed).total_bits;
        let paper = oracle.bitsize(Accounting::Paper).total_bits;
        assert!(packed <= paper);
    }
}

#[test]
fn non_power_of_two_orders_are_padded() {
    let dec = RectangleDecomposition::new(5, vec![Rect::new(1, 5, 5, 5), Rect::new(2, 3, 1, 2)]).unwrap();
    let oracle = CompactOracle::build(&dec, 1.0).unwrap();
    assert_eq!((oracle.n(), oracle.n_padded()), (5, 8));
    let m = dec.realize();
    for i in 1..=5 {
        for j in 1..=5 {
            assert_eq!(oracle.query(i, j).unwrap(), m.get(i, j));
        }
    }
    assert!(oracle.query(6, 1).is_err());
    assert!(oracle.query(0, 1).is_err());
}
