use super::*;
use crate::exact_geometry::{int, rat};
use crate::graph_catalog::{atlas_lookup, instantiate};

fn graph_at(b: Rational) -> (MapParams, PlanarGraph) {
    let g = instantiate(atlas_lookup(&b), &b).unwrap();
    (MapParams::minus_one(b), g)
}

fn poly(c: &[i64]) -> IntPolynomial {
    IntPolynomial::from_i64(c)
}

/// The twelve-interval diagram with two junction vertices A and E.
fn twelve_vertex_diagram() -> CoverMatrix {
    let names = ["A", "D", "G", "I", "K", "N", "V", "B", "E", "H", "J", "M"];
    let mut e: Vec<(usize, usize)> = (0..11).map(|i| (i, i + 1)).collect();
    e.extend([(0, 8), (5, 0), (11, 6), (11, 0)]);
    let mut m = CoverMatrix::from_edges(12, &e);
    m.names = names.iter().map(|s| s.to_string()).collect();
    m
}

#[test]
fn twelve_vertex_rome_and_polynomial() {
    let m = twelve_vertex_diagram();
    let r = rome_with_paths(&m, &[0, 8]).unwrap();
    let lens = r.path_lengths();
    assert_eq!(lens[&(0, 0)], vec![(6, 1)]);
    assert_eq!(lens[&(0, 8)], vec![(1, 1), (8, 1)]);
    assert_eq!(lens[&(8, 0)], vec![(4, 1)]);
    assert_eq!(lens[&(8, 8)], vec![(6, 1)]);
    let expected = poly(&[0, 0, 0, 0, 0, 0, -2, -1, 0, 0, 0, 0, 1]);
    assert_eq!(rome_char_poly(&m, &r).unwrap(), expected);
    let found = find_rome(&m);
    assert_eq!(found.len(), 2);
    assert_eq!(rome_char_poly(&m, &found).unwrap(), expected);
    assert_eq!(char_poly_direct(&m), expected);
    assert!(power_entropy_check(&m, 3));
    let e = matrix_entropy(&m, &default_tol());
    assert!((e.entropy - 0.19463).abs() < 5e-6);
}

#[test]
fn seven_cycle_at_minus_three() {
    let (p, g) = graph_at(int(-3));
    let c = build_cover(&p, &g, &Default::default()).unwrap();
    assert!(c.markov);
    assert_eq!(c.m.len(), 7);
    assert_eq!(c.m, c.m_bar);
    let comps = rome::cyclic_components(&c.m);
    assert_eq!(comps.len(), 1);
    assert_eq!(comps[0].len(), 7);
    let e = matrix_entropy(&c.m, &default_tol());
    assert_eq!(e.radius.lo, int(1));
    assert_eq!(e.verdict, LoopVerdict::Zero);
    let gs = growth_number(&p, &g, &c.partition, 12, 100_000);
    assert!(gs.counts.iter().all(|&n| n == 7));
}

#[test]
fn eight_intervals_at_three() {
    let (p, g) = graph_at(int(3));
    // The bare vertex partition is not Markov: the plateau image (-3, 1)
    // splits an interval.
    assert!(!build_cover(&p, &g, &Default::default()).unwrap().markov);
    let c = markov_cover(&p, &g, DEFAULT_CLOSURE_BUDGET).unwrap();
    assert!(c.markov);
    let comps = rome::cyclic_components(&c.m);
    assert_eq!(comps.iter().map(Vec::len).collect::<Vec<_>>(), vec![8]);
    let r = find_rome(&c.m);
    assert_eq!(r.len(), 1);
    let lens: Vec<usize> = r.path_lengths().values().next().unwrap().iter().map(|(l, _)| *l).collect();
    assert_eq!(lens, vec![3, 4, 7]);
    let e = matrix_entropy(&c.m, &default_tol());
    assert_eq!(e.poly, poly(&[-1, 0, 0, -1, -1, 0, 0, 1]));
    assert!((e.entropy - 0.25344).abs() < 5e-6);
    assert_eq!(e.verdict, LoopVerdict::Positive);
    assert!(power_entropy_check(&c.m, 2));
    let gs = growth_number(&p, &g, &c.partition, 24, 1_000_000);
    assert!(!gs.truncated);
    let limit = gs.ratio_estimate(24).unwrap();
    assert!((limit.exp() - e.radius.mid_f64()).abs() < 0.05);
    assert!(gs.estimates.iter().all(|&x| x >= e.entropy - 1e-9));
    assert!(gs.estimates[23] <= gs.envelope(24).unwrap() + 1e-12);
}

#[test]
fn single_point_graph_is_empty() {
    let (p, g) = graph_at(rat(1, 5));
    let (c, e) = analyze_graph(&p, &g, DEFAULT_CLOSURE_BUDGET).unwrap();
    assert!(c.partition.intervals.is_empty());
    assert_eq!(e.markov.entropy, 0.0);
}

#[test]
fn refined_partitions_are_markov_and_agree() {
    for b in [rat(-3, 20), rat(73, 100), rat(-1, 30), rat(6, 5), int(7)] {
        let (p, g) = graph_at(b.clone());
        let (c, e) = analyze_graph(&p, &g, DEFAULT_CLOSURE_BUDGET).unwrap();
        assert!(c.markov, "b={b}");
        assert!(cover::is_proper_partition(&c.partition));
        let direct = char_poly_blocks(&c.m);
        let r = find_rome(&c.m);
        assert_eq!(rome_char_poly(&c.m, &r).unwrap(), direct, "b={b}");
        assert!(e.markov.entropy > 0.0, "b={b}");
        assert_eq!(e.markov.verdict, LoopVerdict::Positive);
    }
}

#[test]
fn identity_power_check() {
    let m = CoverMatrix::from_edges(3, &[(0, 0), (1, 1), (2, 2)]);
    assert!(power_entropy_check(&m, 5));
    assert_eq!(matrix_entropy(&m, &default_tol()).entropy, 0.0);
    let z = CoverMatrix::from_edges(2, &[]);
    assert_eq!(matrix_entropy(&z, &default_tol()).radius.hi, int(0));
}


