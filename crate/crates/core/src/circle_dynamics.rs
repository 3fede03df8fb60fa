//! Rotation numbers of `F` on invariant graphs that are topological circles,
//! and period sets forced by a rotation interval.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exact_geometry::{format_rational, Point, Rational};
use crate::graph_catalog::planar::PlanarGraph;
use crate::map_engine::{apply, MapParams};
use crate::markov_entropy::cover::partition_intervals;

#[derive(Debug, Error)]
pub enum CircleError {
    #[error("graph is not a circle: {0}")]
    NotCircle(String),
    #[error("map has degree {0} on the circle")]
    NotDegreeOne(String),
    #[error("point {0} is not on the circle")]
    OffCircle(Point),
}

/// A lift `G: R → R` of a degree-one circle map, with `G(x + L) = G(x) + L`.
pub trait Lift {
    /// Circumference `L` in chart units.
    fn length(&self) -> Rational;
    fn lift(&self, x: &Rational) -> Rational;
}

/// Piecewise-affine lift given by its values at breakpoints of `[0, L]`.
#[derive(Debug, Clone)]
pub struct PlLift {
    pub length: Rational,
    /// Ascending breakpoints, starting at 0 and ending at `length`.
    pub breaks: Vec<Rational>,
    pub values: Vec<Rational>,
}

impl PlLift {
    /// The rigid rotation `x ↦ x + shift`.
    pub fn rotation(length: Rational, shift: Rational) -> PlLift {
        PlLift {
            breaks: vec![Rational::zero(), length.clone()],
            values: vec![shift.clone(), &length + &shift],
            length,
        }
    }
}

fn floor_div(x: &Rational, l: &Rational) -> BigInt {
    (x / l).floor().to_integer()
}

impl Lift for PlLift {
    fn length(&self) -> Rational {
        self.length.clone()
    }

    fn lift(&self, x: &Rational) -> Rational {
        let n = floor_div(x, &self.length);
        let shift = Rational::from_integer(n) * &self.length;
        let y = x - &shift;
        let k = self.breaks.windows(2).position(|w| y >= w[0] && y < w[1]).unwrap_or(self.breaks.len() - 2);
        let (x0, x1) = (&self.breaks[k], &self.breaks[k + 1]);
        let (v0, v1) = (&self.values[k], &self.values[k + 1]);
        v0 + (v1 - v0) * (&y - x0) / (x1 - x0) + shift
    }
}

/// Chart of a circle graph: one unit of length per arc, arcs listed in
/// counterclockwise order, each arc inside a single closed quadrant.
#[derive(Debug, Clone)]
pub struct CircleChart {
    /// `arcs[k]` runs from `corners[k]` to `corners[k + 1]` (cyclically).
    pub corners: Vec<Point>,
    /// Lift value at each corner, `G(k)`.
    base: Vec<Rational>,
    /// Whether the image of arc `k` runs forward along the chart.
    forward: Vec<bool>,
    params: MapParams,
}

impl CircleChart {
    pub fn arcs(&self) -> usize {
        self.corners.len()
    }

    fn corner(&self, k: usize) -> &Point {
        &self.corners[k % self.corners.len()]
    }

    /// Point of Γ at chart coordinate `y ∈ [0, L)`.
    pub fn point_at(&self, y: &Rational) -> Point {
        let k = y.floor().to_integer().to_usize().expect("chart coordinate in range");
        let f = y - Rational::from_integer(BigInt::from(k));
        let (p, q) = (self.corner(k), self.corner(k + 1));
        Point::new(&p.x + (&q.x - &p.x) * &f, &p.y + (&q.y - &p.y) * &f)
    }

    /// Chart coordinate in `[0, L)` of a point of Γ.
    pub fn position(&self, p: &Point) -> Result<Rational, CircleError> {
        for k in 0..self.arcs() {
            let (a, b) = (self.corner(k), self.corner(k + 1));
            let (dx, dy) = b.sub(a);
            let (px, py) = p.sub(a);
            if &px * &dy != &py * &dx {
                continue;
            }
            let f = if !dx.is_zero() { px / dx } else { py / dy };
            if f >= Rational::zero() && f < Rational::one() {
                return Ok(Rational::from_integer(BigInt::from(k)) + f);
            }
        }
        Err(CircleError::OffCircle(p.clone()))
    }

    fn modulo(&self, x: &Rational) -> Rational {
        let l = Rational::from_integer(BigInt::from(self.arcs()));
        x - Rational::from_integer(floor_div(x, &l)) * l
    }
}

impl Lift for CircleChart {
    fn length(&self) -> Rational {
        Rational::from_integer(BigInt::from(self.arcs()))
    }

    fn lift(&self, x: &Rational) -> Rational {
        let l = self.length();
        let n = floor_div(x, &l);
        let shift = Rational::from_integer(n) * &l;
        let y = x - &shift;
        let k = y.floor().to_integer().to_usize().expect("chart coordinate in range");
        let image = apply(&self.params, &self.point_at(&y));
        let start = self.modulo(&self.base[k]);
        let pos = self.position(&image).expect("graph is invariant");
        let step = if self.forward[k] { self.modulo(&(pos - &start)) } else { -self.modulo(&(start - pos)) };
        &self.base[k] + step + shift
    }
}

/// Orders the arcs of `g` into a cycle and builds the lift of `F`.
pub fn circle_chart(params: &MapParams, g: &PlanarGraph) -> Result<CircleChart, CircleError> {
    let arcs = partition_intervals(g, &Default::default());
    if arcs.is_empty() {
        return Err(CircleError::NotCircle("no arcs".into()));
    }
    let mut adj: BTreeMap<Point, Vec<usize>> = BTreeMap::new();
    for (i, a) in arcs.iter().enumerate() {
        adj.entry(a.start()).or_default().push(i);
        adj.entry(a.end()).or_default().push(i);
    }
    if let Some((p, v)) = adj.iter().find(|(_, v)| v.len() != 2) {
        return Err(CircleError::NotCircle(format!("vertex {p} has degree {}", v.len())));
    }
    let mut corners = vec![arcs[0].start()];
    let mut used = vec![false; arcs.len()];
    let mut cur = 0usize;
    loop {
        used[cur] = true;
        let last = corners.last().unwrap().clone();
        let next = if arcs[cur].start() == last { arcs[cur].end() } else { arcs[cur].start() };
        if next == corners[0] {
            break;
        }
        corners.push(next.clone());
        match adj[&next].iter().find(|&&j| !used[j]) {
            Some(&j) => cur = j,
            None => return Err(CircleError::NotCircle("open chain".into())),
        }
    }
    if used.iter().any(|u| !u) {
        return Err(CircleError::NotCircle("more than one component".into()));
    }
    // Counterclockwise: positive shoelace area.
    let n = corners.len();
    let area: Rational = (0..n)
        .map(|k| {
            let (p, q) = (&corners[k], &corners[(k + 1) % n]);
            &p.x * &q.y - &q.x * &p.y
        })
        .sum();
    if area.is_negative() {
        corners.reverse();
    }
    let mut chart = CircleChart { corners, base: vec![], forward: vec![], params: params.clone() };
    let l = chart.length();
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let mut increments = Vec::with_capacity(n);
    let mut forward = Vec::with_capacity(n);
    for k in 0..n {
        let fa = chart.position(&apply(params, chart.corner(k)))?;
        let fb = chart.position(&apply(params, chart.corner(k + 1)))?;
        let fm = chart.position(&apply(params, &chart.point_at(&(Rational::from_integer(BigInt::from(k)) + &half))))?;
        let fwd_len = chart.modulo(&(&fb - &fa));
        let mid_fwd = chart.modulo(&(&fm - &fa));
        // The image of an arc is a straight segment, hence shorter than Γ.
        let is_fwd = mid_fwd < fwd_len;
        let inc = if fa == fb && fm == fa {
            Rational::zero()
        } else if is_fwd {
            fwd_len
        } else {
            -chart.modulo(&(&fa - &fb))
        };
        forward.push(is_fwd);
        increments.push(inc);
    }
    let total: Rational = increments.iter().sum();
    if total != l {
        return Err(CircleError::NotDegreeOne(format_rational(&(total / &l))));
    }
    let mut base = Vec::with_capacity(n);
    let mut v = chart.position(&apply(params, chart.corner(0)))?;
    for inc in &increments {
        base.push(v.clone());
        v += inc;
    }
    chart.base = base;
    chart.forward = forward;
    Ok(chart)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum RotationMethod {
    CycleDetected,
    BoundedEstimate,
}

#[derive(Debug, Clone, Serialize)]
pub struct RotationResult {
    /// Enclosure of the rotation number, a single value when exact.
    #[serde(with = "crate::exact_geometry::serde_rational")]
    pub lo: Rational,
    #[serde(with = "crate::exact_geometry::serde_rational")]
    pub hi: Rational,
    pub method: RotationMethod,
    /// Chart coordinates of a periodic orbit whose period is the denominator.
    #[serde(skip)]
    pub witness: Vec<Rational>,
}

impl RotationResult {
    pub fn exact(&self) -> Option<&Rational> {
        (self.lo == self.hi).then_some(&self.lo)
    }

    pub fn describe(&self) -> String {
        match self.exact() {
            Some(r) => format_rational(r),
            None => format!("[{}, {}]", format_rational(&self.lo), format_rational(&self.hi)),
        }
    }
}

/// Rotation number of a lift from the orbit of `x0`, reduced to `[0, 1)`.
pub fn rotation_of_lift(g: &dyn Lift, x0: &Rational, budget: usize) -> RotationResult {
    let l = g.length();
    let reduce = |x: &Rational| x - Rational::from_integer(floor_div(x, &l)) * &l;
    let mut seen: HashMap<Rational, (usize, Rational)> = HashMap::new();
    let mut x = x0.clone();
    for n in 0..=budget {
        let y = reduce(&x);
        if let Some((m, xm)) = seen.get(&y) {
            let q = n - m;
            let p = ((&x - xm) / &l).to_integer();
            let mut r = Rational::new(p, BigInt::from(q));
            r = &r - r.floor();
            let mut witness = Vec::with_capacity(q);
            let mut z = y.clone();
            for _ in 0..q {
                witness.push(z.clone());
                z = reduce(&g.lift(&z));
            }
            return RotationResult { lo: r.clone(), hi: r, method: RotationMethod::CycleDetected, witness };
        }
        seen.insert(y, (n, x.clone()));
        x = g.lift(&x);
    }
    // |Gⁿ(x) − x − nρL| < L for a non-decreasing degree-one lift.
    let n = Rational::from_integer(BigInt::from(budget + 1));
    let d = &x - x0;
    let lo = (&d - &l) / (&n * &l);
    let hi = (&d + &l) / (&n * &l);
    RotationResult { lo, hi, method: RotationMethod::BoundedEstimate, witness: vec![] }
}

/// Rotation number of `F` on a circle graph, started at a corner.
///
/// Orientation is counterclockwise in the plane, so the rotation number of
/// the 7-cycle case is 1/7.
pub fn rotation_number(params: &MapParams, g: &PlanarGraph, budget: usize) -> Result<RotationResult, CircleError> {
    let chart = circle_chart(params, g)?;
    Ok(rotation_of_lift(&chart, &Rational::zero(), budget))
}

/// Rotation number started at a given point of Γ.
pub fn rotation_number_from(
    params: &MapParams,
    g: &PlanarGraph,
    start: &Point,
    budget: usize,
) -> Result<RotationResult, CircleError> {
    let chart = circle_chart(params, g)?;
    let x0 = chart.position(start)?;
    Ok(rotation_of_lift(&chart, &x0, budget))
}

pub fn divisor_count(n: u64) -> u64 {
    assert!(n >= 1);
    let mut count = 1;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        count *= e + 1;
        p += 1;
    }
    if m > 1 {
        count *= 2;
    }
    count
}

fn holds(n: u64, w: &Rational) -> bool {
    // 4n < (⌊n w⌋ − 1)², with ⌊n w⌋ − 1 required to be positive.
    let k = (Rational::from_integer(BigInt::from(n)) * w).floor().to_integer() - BigInt::one();
    k.is_positive() && BigInt::from(4 * n) < &k * &k
}

fn holds_unfloored(n: u64, w: &Rational) -> bool {
    let v = Rational::from_integer(BigInt::from(n)) * w - Rational::one();
    v.is_positive() && Rational::from_integer(BigInt::from(4 * n)) < &v * &v
}

/// Scans down from a point past which `(n w − 2)² > 4n` holds and keeps
/// holding, returning one more than the last `n` failing `test`.
fn threshold_by(w: &Rational, test: impl Fn(u64) -> bool) -> u64 {
    let two = Rational::from_integer(BigInt::from(2));
    let four = Rational::from_integer(BigInt::from(4));
    let mut safe = 1u64;
    loop {
        let n = Rational::from_integer(BigInt::from(safe));
        let v = &n * w - &two;
        if v.is_positive() && &v * &v > &n * &four && &two * w * &v > four {
            break;
        }
        safe *= 2;
    }
    (1..=safe).rev().find(|&n| !test(n)).map_or(1, |n| n + 1)
}

/// Least `n₀` with `2√n < ⌊n(hi − lo)⌋ − 1` for every `n ≥ n₀`, decided by
/// the integer test `4n < (⌊n(hi − lo)⌋ − 1)²`.
pub fn period_threshold(lo: &Rational, hi: &Rational) -> u64 {
    assert!(lo < hi);
    let w = hi - lo;
    threshold_by(&w, |n| holds(n, &w))
}

/// Same threshold for the real inequality `2√n < n(hi − lo) − 1`, without
/// the floor. It can be smaller than [`period_threshold`], so it is reported
/// but never used to bound the scan.
pub fn period_threshold_unfloored(lo: &Rational, hi: &Rational) -> u64 {
    assert!(lo < hi);
    let w = hi - lo;
    threshold_by(&w, |n| holds_unfloored(n, &w))
}

/// Whether some `ℓ/n` in lowest terms lies in `[lo, hi]`.
pub fn has_irreducible(n: u64, lo: &Rational, hi: &Rational) -> bool {
    let nn = Rational::from_integer(BigInt::from(n));
    let first = (lo * &nn).ceil().to_integer();
    let last = (hi * &nn).floor().to_integer();
    let nb = BigInt::from(n);
    let mut l = first;
    while l <= last {
        if l.gcd(&nb).is_one() {
            return true;
        }
        l += 1;
    }
    false
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodSet {
    pub threshold: u64,
    /// Periods `n ≥ 2` with no irreducible `ℓ/n` in the interval.
    pub excluded: Vec<u64>,
    /// Whether an integer lies in the interval; otherwise period 1 can only
    /// come from a fixed point off the circle.
    pub one_by_rotation: bool,
}

impl PeriodSet {
    /// Excluded periods compressed into ranges, e.g. `2-5, 8-12, 18`.
    pub fn ranges(&self) -> String {
        let mut out: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.excluded.len() {
            let mut j = i;
            while j + 1 < self.excluded.len() && self.excluded[j + 1] == self.excluded[j] + 1 {
                j += 1;
            }
            out.push(if j > i {
                format!("{}-{}", self.excluded[i], self.excluded[j])
            } else {
                self.excluded[i].to_string()
            });
            i = j + 1;
        }
        out.join(", ")
    }
}

/// Periods forced by the rotation interval `[lo, hi]`: every `n ≥ threshold`
/// occurs, and below it the excluded periods are found by direct scan.
pub fn period_set(lo: &Rational, hi: &Rational) -> PeriodSet {
    let threshold = period_threshold(lo, hi);
    let excluded: Vec<u64> = (2..threshold).into_par_iter().filter(|&n| !has_irreducible(n, lo, hi)).collect();
    PeriodSet { threshold, excluded, one_by_rotation: has_irreducible(1, lo, hi) }
}

/// Nonnegative `(m, n)` with `6m + 7n = q`, smallest `n` first.
pub fn period_form_check(q: u64) -> Option<(u64, u64)> {
    (0..=q / 7).find(|n| (q - 7 * n) % 6 == 0).map(|n| ((q - 7 * n) / 6, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_geometry::{int, rat};
    use crate::graph_catalog::{atlas_lookup, instantiate};

    fn circle(b: Rational) -> (MapParams, PlanarGraph) {
        let g = instantiate(atlas_lookup(&b), &b).unwrap();
        (MapParams::minus_one(b), g)
    }

    #[test]
    fn seven_and_six_cycles() {
        for (b, r) in [(int(-3), rat(1, 7)), (int(-1), rat(1, 6)), (rat(-3, 2), rat(1, 6)), (int(-2), rat(1, 7))] {
            let (p, g) = circle(b.clone());
            let res = rotation_number(&p, &g, 10_000).unwrap();
            assert_eq!(res.exact(), Some(&r), "b={b}");
            assert_eq!(res.witness.len() as u64, r.denom().to_u64().unwrap());
        }
    }

    #[test]
    fn rigid_rotation() {
        let g = PlLift::rotation(int(5), rat(10, 7));
        let r = rotation_of_lift(&g, &rat(1, 3), 100);
        assert_eq!(r.exact(), Some(&rat(2, 7)));
    }

    #[test]
    fn non_circle_rejected() {
        let (p, g) = circle(int(3));
        assert!(matches!(rotation_number(&p, &g, 100), Err(CircleError::NotCircle(_))));
    }

    #[test]
    fn divisors_and_thresholds() {
        assert_eq!(divisor_count(1), 1);
        assert_eq!(divisor_count(12), 6);
        assert_eq!(divisor_count(7140), 48);
        // The floor makes 7140 pass and 7141..=7181 fail.
        assert_eq!(period_threshold(&rat(1, 7), &rat(1, 6)), 7182);
        assert!(holds(7140, &rat(1, 42)) && !holds(7141, &rat(1, 42)));
        assert_eq!(period_threshold_unfloored(&rat(1, 7), &rat(1, 6)), 7140);
        assert_eq!(period_threshold(&int(0), &int(1)), 6);
        let n0 = period_threshold(&rat(1, 3), &rat(1, 2));
        assert!((n0..n0 + 500).all(|n| holds(n, &rat(1, 6))));
        assert!(!holds(n0 - 1, &rat(1, 6)));
    }

    #[test]
    fn forms() {
        assert_eq!(period_form_check(13), Some((1, 1)));
        assert_eq!(period_form_check(6), Some((1, 0)));
        assert_eq!(period_form_check(5), None);
        assert!(has_irreducible(13, &rat(1, 7), &rat(1, 6)));
    }
}
