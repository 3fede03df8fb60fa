use super::*;
use crate::exact_geometry::rat;
use crate::map_engine::{iterate, MapParams};

fn params(b: Rational) -> MapParams {
    MapParams::minus_one(b)
}

#[test]
fn diagonal_return_map_formula() {
    let w = ReturnCase::Diagonal.window();
    let pieces = return_map_symbolic(ReturnCase::Diagonal, &w).unwrap();
    assert!(matches_displayed(ReturnCase::Diagonal, &pieces, &w), "{pieces:#?}");
    let at = Window::point(rat(-13, 16));
    let pieces = return_map_symbolic(ReturnCase::Diagonal, &at).unwrap();
    assert!(matches_displayed(ReturnCase::Diagonal, &pieces, &at));
    let shown: Vec<String> = pieces.iter().map(|p| p.px.to_string()).collect();
    assert_eq!(shown, ["7b+16x+16", "-b", "-9b-8x-8", "-9b-8"]);
}

#[test]
fn horizontal_return_map_formula() {
    let w = ReturnCase::Horizontal.window();
    let pieces = return_map_symbolic(ReturnCase::Horizontal, &w).unwrap();
    assert!(matches_displayed(ReturnCase::Horizontal, &pieces, &w), "{pieces:#?}");
    let at = Window::point(rat(563, 816));
    let pieces = return_map_symbolic(ReturnCase::Horizontal, &at).unwrap();
    assert!(matches_displayed(ReturnCase::Horizontal, &pieces, &at));
}

#[test]
fn horizontal_formula_beyond_window() {
    // At b = 5/7 part of the segment leaves the line and the returning part
    // has extra constant pieces; the three reference formulas survive only
    // on a central subinterval.
    let b = rat(5, 7);
    let at = Window::point(b.clone());
    assert!(matches!(return_map_symbolic(ReturnCase::Horizontal, &at), Err(ReductionError::OffLine(_))));
    let (back, away) = return_map_partial(ReturnCase::Horizontal, &at).unwrap();
    assert!(!away.is_empty());
    assert!(!matches_displayed(ReturnCase::Horizontal, &back, &at));
    assert!(displayed_formulas_occur(ReturnCase::Horizontal, &back, &at));
    let z = Rational::zero();
    let fall = back.iter().find(|p| p.px == Aff::from_ints(-20, 29, -16)).unwrap();
    assert_eq!(fall.hi.eval(&b, &z), rat(1, 14));
}

#[test]
fn return_map_agrees_with_planar_iteration() {
    for b in [rat(-112, 137), rat(-163, 200), rat(-13, 16), rat(603, 874), rat(563, 816)] {
        let red = reduce_return_map(&params(b.clone())).unwrap();
        let f = &red.return_map;
        for k in 0..=20 {
            let x = f.lo() + (f.hi() - f.lo()) * rat(k, 20);
            let start = match red.case {
                ReturnCase::Diagonal => Point::new(x.clone(), &x + &b + int(1)),
                ReturnCase::Horizontal => Point::new(x.clone(), int(2) * &b - int(1)),
            };
            let end = iterate(&params(b.clone()), &start, red.period);
            assert_eq!(end.x, f.eval(&x));
        }
    }
}

use crate::exact_geometry::{int, Point};

#[test]
fn z_values() {
    assert_eq!(ReturnCase::Diagonal.z_formula(&rat(-13, 16)), rat(13, 16));
    assert_eq!(ReturnCase::Diagonal.z_formula(&rat(-112, 137)), rat(385, 473));
    assert_eq!(ReturnCase::Horizontal.z_formula(&rat(563, 816)), rat(7, 8));
    assert_eq!(ReturnCase::Horizontal.z_formula(&rat(603, 874)), rat(1575, 1799));
    assert_eq!(ReturnCase::Horizontal.z_formula(&rat(5, 7)), rat(15, 37));
    // At 5/7 the plateau would sit at height 176/37.
    assert!(ReturnCase::Horizontal.trapezoid(&rat(5, 7)).is_err());
}

#[test]
fn reduction_chain_reaches_trapezoid() {
    let samples = [
        rat(-112, 137),
        rat(-817, 1000),
        rat(-163, 200),
        rat(-13, 16),
        rat(603, 874),
        rat(68994, 100_000),
        rat(563, 816),
    ];
    for b in samples {
        let red = reduce_return_map(&params(b.clone())).unwrap_or_else(|e| panic!("b = {b}: {e}"));
        assert!(red.formula_agrees, "b = {b}: {:?} vs {}", red.trapezoid, red.case.z_formula(&b));
        assert!(red.scaled.is_self_map());
    }
}

#[test]
fn diagonal_intermediate_maps() {
    let b = rat(-163, 200);
    let one = int(1);
    let red = reduce_return_map(&params(b.clone())).unwrap();
    // Normalized return map.
    let bp = &b + &one;
    let g = &red.normalized;
    let k1 = (int(17) * &b + int(14)) / (int(16) * &bp);
    let k2 = (int(8) * &b + int(7)) / (int(8) * &bp);
    let c = (int(9) * &b + int(8)) / (int(8) * &bp);
    assert_eq!(g.breaks, vec![int(0), k1, k2, c.clone(), one.clone()]);
    assert_eq!(g.eval(&int(0)), -(int(16) * &b + int(13)) / &bp);
    assert_eq!(g.slope(0), int(16));
    assert_eq!(g.slope(2), int(-8));
    assert_eq!(g.values[1], one);
    // Extension endpoints.
    assert_eq!(red.x1, (int(16) * &b + int(13)) / (int(15) * &bp));
    assert_eq!(red.x2, (int(119) * &b + int(107)) / (int(120) * &bp));
    // Rescaled map.
    let s = &red.scaled;
    let d = int(1) - int(3) * &b;
    assert_eq!(s.breaks[1], (int(7) * &b + int(16)) / (int(48) * &d));
    assert_eq!(s.values[1], (int(7) * &b + int(16)) / (int(3) * &d));
    assert_eq!(s.breaks[2], (int(8) - int(79) * &b) / (int(24) * &d));
}

#[test]
fn outside_windows_is_unsupported() {
    assert!(matches!(reduce_return_map(&params(rat(1, 2))), Err(ReductionError::UnsupportedWindow(_))));
}

#[test]
fn trapezoid_entropy_at_window_ends() {
    let t = ReturnCase::Diagonal.trapezoid(&rat(-112, 137)).unwrap();
    let e = lap_entropy(&t, 30, 20_000);
    assert_eq!(e.positive(), Some(false), "{} images", e.images);
    let t = ReturnCase::Diagonal.trapezoid(&rat(-13, 16)).unwrap();
    let e = lap_entropy(&t, 30, 20_000);
    assert_eq!(e.positive(), Some(true));
    assert!(e.value() >= std::f64::consts::LN_2 - 1e-9);
    assert!(e.value() <= e.upper + 1e-9);
    let t = ReturnCase::Horizontal.trapezoid(&rat(603, 874)).unwrap();
    assert_eq!(lap_entropy(&t, 10, 20_000).positive(), Some(false));
    let t = ReturnCase::Horizontal.trapezoid(&rat(563, 816)).unwrap();
    assert_eq!(lap_entropy(&t, 10, 20_000).positive(), Some(true));
}

#[test]
fn collapse_preserves_lap_growth() {
    let red = reduce_return_map(&params(rat(-163, 200))).unwrap();
    let before = lap_entropy(&red.normalized, 12, 20_000);
    let after = lap_entropy(red.collapsed.as_ref().unwrap(), 12, 20_000);
    let scaled = lap_entropy(&red.scaled, 12, 20_000);
    let (a, b, c) = (before.value(), after.value(), scaled.value());
    assert!((a - b).abs() < 1e-9 && (b - c).abs() < 1e-9, "{a} {b} {c}");
}

#[test]
fn onset_brackets() {
    let tol = rat(1, 1000);
    let a = bracket_onset(Onset::Alpha, &tol).unwrap();
    assert!(!a.undecided, "{:?}", a.probes);
    assert!(a.width() <= tol);
    assert!(a.lo >= rat(-112, 137) && a.hi <= rat(-13, 16));
    let b = bracket_onset(Onset::Beta, &tol).unwrap();
    assert!(!b.undecided);
    assert!(b.lo >= rat(603, 874) && b.hi <= rat(563, 816));
    let fine = bracket_onset(Onset::Beta, &rat(1, 1_000_000)).unwrap();
    assert!(!fine.undecided, "{:?}", fine.probes);
    assert!(fine.width() <= rat(1, 1_000_000));
}

#[test]
fn case_dispatch_samples() {
    let budget = crate::markov_entropy::DEFAULT_CLOSURE_BUDGET;
    let h5 = entropy_of_case(&params(int(3)), budget).unwrap();
    assert_eq!(h5.claim, EntropyClaim::Exact(ReferenceValue::H5));
    assert!(h5.consistent);
    assert!((h5.value() - 0.25344).abs() < 5e-6);
    let z = entropy_of_case(&params(int(9)), budget).unwrap();
    assert_eq!(z.claim, EntropyClaim::Zero);
    assert!(z.consistent);
    let scaled = entropy_of_case(&MapParams::new(int(-2), int(6)), budget).unwrap();
    assert_eq!(scaled.claim, EntropyClaim::Exact(ReferenceValue::H5));
}
