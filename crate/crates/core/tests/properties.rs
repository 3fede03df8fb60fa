//! Property tests for the invariants of the map, the graph atlas, the
//! entropy engine, the circle dynamics and the interval reduction.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use pwldyn::circle_dynamics::{
    divisor_count, has_irreducible, period_set, period_threshold, rotation_number, rotation_number_from,
};
use pwldyn::cli_reporting::suite::{
    boundary_pieces_agree, nonnegative_cycles, scaling_conjugacy_holds, segment_law_violation,
};
use pwldyn::exact_geometry::{format_rational, int, parse_rational, rat, Direction, ParamScalar, Point, Rational, Segment};
use pwldyn::graph_catalog::{atlas, atlas_lookup, instantiate, verify_invariance};
use pwldyn::interval_reduction::{
    entropy_of_case, lap_entropy, make_trapezoid, reduce_return_map, EntropyClaim, ReturnCase, TrapezoidParams,
};
use pwldyn::map_engine::{apply, classify_orbit, cycle_slope_product, iterate, normalize_params, MapParams, SlopeProduct};
use pwldyn::markov_entropy::{analyze_graph, DEFAULT_CLOSURE_BUDGET};

fn rational(radius: i64, max_den: i64) -> impl Strategy<Value = Rational> {
    (1..=max_den).prop_flat_map(move |d| (-radius * d..=radius * d).prop_map(move |n| rat(n, d)))
}

fn point(radius: i64, max_den: i64) -> impl Strategy<Value = Point> {
    (rational(radius, max_den), rational(radius, max_den)).prop_map(|(x, y)| Point::new(x, y))
}

fn rational_in(lo: Rational, hi: Rational, max_den: i64) -> impl Strategy<Value = Rational> {
    // Uniform grid point strictly inside (lo, hi).
    (2..=max_den).prop_flat_map(move |d| {
        let (lo, hi) = (lo.clone(), hi.clone());
        (1..d).prop_map(move |k| &lo + (&hi - &lo) * rat(k, d))
    })
}

fn direction() -> impl Strategy<Value = Direction> {
    (0..4usize).prop_map(|i| Direction::ALL[i])
}

fn lcm_den(p: &Point) -> num_bigint::BigInt {
    use num_integer::Integer;
    p.x.denom().lcm(p.y.denom())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn rational_string_round_trip(r in rational(1_000_000, 1_000)) {
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn canonical_segment_is_idempotent(p in point(50, 16), d in direction(), t in rational(40, 8)) {
        let (dx, dy) = d.vector();
        let q = Point::new(&p.x + &t * int(dx), &p.y + &t * int(dy));
        let s = Segment::new(q.clone(), p.clone()).unwrap();
        prop_assert!(s.p <= s.q);
        prop_assert_eq!(s.canonical(), s.clone());
        prop_assert_eq!(Segment::new(p, q).unwrap(), s);
    }

    #[test]
    fn param_scalar_eval_is_additive(
        c in (rational(20, 9), rational(20, 9), rational(20, 9), rational(20, 9)),
        b in rational(20, 12),
        k in rational(5, 7),
    ) {
        let u = ParamScalar::new(c.0, c.1);
        let v = ParamScalar::new(c.2, c.3);
        prop_assert_eq!(u.add(&v).eval(&b), u.eval(&b) + v.eval(&b));
        prop_assert_eq!(u.sub(&v).eval(&b), u.eval(&b) - v.eval(&b));
        prop_assert_eq!(u.scale(&k).eval(&b), u.eval(&b) * &k);
    }

    #[test]
    fn scaling_conjugacy(a in rational(5, 12), b in rational(5, 12), l in rational(8, 12), p in point(50, 32)) {
        prop_assume!(l.is_positive());
        prop_assert!(scaling_conjugacy_holds(&MapParams::new(a, b), &l, &p));
    }

    #[test]
    fn boundary_pieces_agree_on_axes(a in rational(3, 8), b in rational(5, 8), t in rational(30, 16), on_x in any::<bool>()) {
        let p = if on_x { Point::new(t, Rational::zero()) } else { Point::new(Rational::zero(), t) };
        prop_assert!(boundary_pieces_agree(&MapParams::new(a, b), &p));
    }

    #[test]
    fn lattice_is_invariant(q in 1i64..=24, an in -60i64..=60, bn in -60i64..=60, xn in -500i64..=500, yn in -500i64..=500) {
        let params = MapParams::new(rat(an, q), rat(bn, q));
        let mut p = Point::new(rat(xn, q), rat(yn, q));
        for _ in 0..40 {
            p = apply(&params, &p);
            let den = lcm_den(&p);
            prop_assert!((num_bigint::BigInt::from(q) % den).is_zero(), "{} left 1/{} Z", p, q);
        }
    }

    #[test]
    fn segment_images_follow_plateau_and_length_laws(
        a in rational(3, 8), b in rational(5, 8), p in point(10, 8), d in direction(), t in rational(20, 8),
    ) {
        prop_assume!(!t.is_zero());
        let (dx, dy) = d.vector();
        let q = Point::new(&p.x + &t * int(dx), &p.y + &t * int(dy));
        let s = Segment::new(p, q).unwrap();
        let params = MapParams::new(a, b);
        for piece in pwldyn::map_engine::split_at_axes(&s) {
            if piece.is_degenerate() {
                continue;
            }
            let v = segment_law_violation(&params, &piece);
            prop_assert!(v.is_none(), "{}", v.unwrap());
        }
    }

    #[test]
    fn expanding_cycles_have_power_of_two_slopes(b in rational(12, 8), p in point(20, 8)) {
        let params = MapParams::minus_one(b);
        let rep = classify_orbit(&params, &p, 20_000);
        if rep.is_decided() {
            if let SlopeProduct::Expanding(k) = cycle_slope_product(&rep.cycle) {
                prop_assert!(k >= 2 && k.is_power_of_two(), "slope product {}", k);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 120, ..ProptestConfig::default() })]

    /// For `a ≥ 0` every orbit is eventually periodic and lands on one of
    /// the closed-form cycles.
    #[test]
    fn nonnegative_a_orbits_reach_known_cycles(a in 0i64..=1, b in rational(12, 10), p in point(30, 10), lam in 1i64..=4) {
        let l = int(lam);
        let params = MapParams::new(int(a) * &l, &b * &l);
        let rep = classify_orbit(&params, &p, 5_000);
        prop_assert!(rep.is_decided(), "a={} b={} p={}", params.a, params.b, p);
        let cycle: BTreeSet<Point> = rep.cycle.iter().map(|c| c.scale(&(Rational::one() / &l))).collect();
        let known = if a == 0 {
            // Cycles are listed for b in {-1, 0, 1}; rescale by the normalizing factor.
            let (_, scale) = normalize_params(&MapParams::new(int(0), b.clone()));
            let normalized: BTreeSet<Point> = cycle.iter().map(|c| c.scale(&scale)).collect();
            nonnegative_cycles(0, &b).contains(&normalized)
        } else {
            nonnegative_cycles(1, &b).contains(&cycle)
        };
        prop_assert!(known, "a={} b={}: cycle {:?}", a, b, cycle);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn atlas_lookup_is_total(b in rational(40, 64)) {
        let case = atlas_lookup(&b);
        prop_assert!(case.validity.contains(&b), "{} not in {}", b, case.id);
        prop_assert_eq!(atlas().iter().filter(|c| c.validity.contains(&b)).count(), 1);
    }

    #[test]
    fn atlas_graphs_are_invariant(b in rational(12, 24)) {
        let params = MapParams::minus_one(b.clone());
        let g = instantiate(atlas_lookup(&b), &b).unwrap();
        let rep = verify_invariance(&params, &g);
        prop_assert!(rep.passed(), "b={}: {:?}", b, rep.violations);
    }

    #[test]
    fn covering_radius_below_upper_radius(b in rational(10, 12)) {
        let params = MapParams::minus_one(b.clone());
        let g = instantiate(atlas_lookup(&b), &b).unwrap();
        let (_, ge) = analyze_graph(&params, &g, DEFAULT_CLOSURE_BUDGET).unwrap();
        if let Some(up) = &ge.upper {
            prop_assert!(ge.markov.radius.lo <= up.radius.hi, "b={}", b);
        }
    }

    #[test]
    fn rotation_does_not_depend_on_start(b in rational_in(rat(-15, 8), rat(-7, 4), 40), pick in 0usize..1000, t in 0i64..=8) {
        let params = MapParams::minus_one(b.clone());
        let g = instantiate(atlas_lookup(&b), &b).unwrap();
        let base = rotation_number(&params, &g, 100_000).unwrap();
        let edges = g.edges();
        let e = &edges[pick % edges.len()];
        let start = Point::new(&e.p.x + (&e.q.x - &e.p.x) * rat(t, 8), &e.p.y + (&e.q.y - &e.p.y) * rat(t, 8));
        let other = rotation_number_from(&params, &g, &start, 100_000).unwrap();
        prop_assert_eq!(base.exact(), other.exact(), "b={} start={}", b, start);
        let r = base.exact().unwrap();
        prop_assert!(*r >= rat(1, 7) && *r <= rat(1, 6));
        prop_assert_eq!(num_bigint::BigInt::from(base.witness.len()), r.denom().clone());
    }

    #[test]
    fn entropy_sign_follows_bands(b in rational(9, 8)) {
        let params = MapParams::minus_one(b.clone());
        let ce = entropy_of_case(&params, DEFAULT_CLOSURE_BUDGET).unwrap();
        prop_assert!(ce.consistent, "b={}: {:?}", b, ce);
        if ce.claim == EntropyClaim::Zero {
            prop_assert!(ce.upper == 0.0, "b={}: upper {}", b, ce.upper);
        }
        prop_assert!(ce.lower <= ce.upper + 1e-9);
    }

    #[test]
    fn lap_counts_are_submultiplicative(x in rational_in(int(0), int(1), 12), y in rational_in(int(0), int(1), 12), z in rational_in(int(0), int(1), 12)) {
        let tp = TrapezoidParams::new(x, y, z);
        prop_assume!(tp.height() <= Rational::one());
        let t = make_trapezoid(&tp).unwrap();
        let laps = lap_entropy(&t, 8, 5_000).laps;
        for m in 1..laps.len() {
            for n in 1..laps.len() {
                if m + n <= laps.len() {
                    prop_assert!(laps[m + n - 1] <= &laps[m - 1] * &laps[n - 1], "m={} n={}", m, n);
                }
            }
        }
    }

    #[test]
    fn return_map_semiconjugates_diagonal_window(b in rational_in(rat(-112, 137), rat(-13, 16), 30), k in 0i64..=16) {
        let params = MapParams::minus_one(b.clone());
        let red = reduce_return_map(&params).unwrap();
        prop_assert_eq!(red.case, ReturnCase::Diagonal);
        let f = &red.return_map;
        let x = f.lo() + (f.hi() - f.lo()) * rat(k, 16);
        let start = Point::new(x.clone(), &x + &b + int(1));
        let end = iterate(&params, &start, red.period);
        prop_assert_eq!(&end.x, &f.eval(&x));
        prop_assert_eq!(end.y, &end.x + &b + int(1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn excluded_periods_have_no_fraction_in_window(lo_n in 1i64..=20, w_n in 1i64..=6, den in 30i64..=120, n in 2u64..=400) {
        let lo = rat(lo_n, den);
        let hi = rat(lo_n + w_n, den);
        // Oracle: every ℓ with ℓ/n in [lo, hi], checked for a unit gcd.
        let oracle = (0..=n).any(|l| {
            let f = rat(l as i64, n as i64);
            f >= lo && f <= hi && num_integer::gcd(l, n) == 1
        });
        prop_assert_eq!(has_irreducible(n, &lo, &hi), oracle);
        let set = period_set(&lo, &hi);
        if n < set.threshold {
            prop_assert_eq!(set.excluded.contains(&n), !oracle);
        } else {
            prop_assert!(oracle, "n={} past threshold {} has no fraction", n, period_threshold(&lo, &hi));
        }
    }
}

#[test]
fn divisor_bound_up_to_ten_thousand() {
    for n in 1..=10_000u64 {
        let naive = (1..=n).filter(|d| n % d == 0).count() as u64;
        assert_eq!(divisor_count(n), naive, "n = {n}");
        assert!((divisor_count(n) as f64) <= 2.0 * (n as f64).sqrt(), "n = {n}");
    }
}
