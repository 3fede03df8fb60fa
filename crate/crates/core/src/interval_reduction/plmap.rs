//! Continuous piecewise-affine interval maps with exact breakpoints.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::ReductionError;
use crate::exact_geometry::{rat, Rational};
use crate::markov_entropy::cover::{CoverMatrix, CoverMode};
use crate::markov_entropy::{char_poly_blocks, perron_root, RootInterval};

/// A continuous map of `[breaks[0], breaks[last]]`, affine between
/// consecutive breakpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLIntervalMap {
    pub breaks: Vec<Rational>,
    pub values: Vec<Rational>,
}

impl Serialize for PLIntervalMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let strs = |v: &[Rational]| v.iter().map(|r| r.to_string()).collect::<Vec<_>>();
        let mut st = s.serialize_struct("PLIntervalMap", 3)?;
        st.serialize_field("domain", &strs(&[self.lo().clone(), self.hi().clone()]))?;
        st.serialize_field("breaks", &strs(&self.breaks))?;
        st.serialize_field("values", &strs(&self.values))?;
        st.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dir {
    Up,
    Flat,
    Down,
}

impl PLIntervalMap {
    /// Builds a map from breakpoint values, merging collinear pieces.
    pub fn new(breaks: Vec<Rational>, values: Vec<Rational>) -> Result<Self, ReductionError> {
        if breaks.len() < 2 || breaks.len() != values.len() {
            return Err(ReductionError::Domain("need matching breakpoints and values".into()));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ReductionError::Domain("breakpoints must increase".into()));
        }
        let mut m = PLIntervalMap { breaks, values };
        m.merge_collinear();
        Ok(m)
    }

    /// Builds a map from affine pieces `(lo, hi, slope, intercept)`,
    /// checking continuity at every interior breakpoint.
    pub fn from_pieces(pieces: &[(Rational, Rational, Rational, Rational)]) -> Result<Self, ReductionError> {
        let mut breaks = Vec::new();
        let mut values = Vec::new();
        for (k, (lo, hi, s, c)) in pieces.iter().enumerate() {
            let at_lo = s * lo + c;
            if k == 0 {
                breaks.push(lo.clone());
                values.push(at_lo);
            } else if breaks.last() != Some(lo) || values.last() != Some(&at_lo) {
                return Err(ReductionError::Domain(format!("discontinuity at {lo}")));
            }
            breaks.push(hi.clone());
            values.push(s * hi + c);
        }
        Self::new(breaks, values)
    }

    fn merge_collinear(&mut self) {
        let mut b = vec![self.breaks[0].clone()];
        let mut v = vec![self.values[0].clone()];
        for i in 1..self.breaks.len() {
            let n = b.len();
            if n >= 2 {
                let s_prev = (&v[n - 1] - &v[n - 2]) / (&b[n - 1] - &b[n - 2]);
                let s_new = (&self.values[i] - &v[n - 1]) / (&self.breaks[i] - &b[n - 1]);
                if s_prev == s_new {
                    b[n - 1] = self.breaks[i].clone();
                    v[n - 1] = self.values[i].clone();
                    continue;
                }
            }
            b.push(self.breaks[i].clone());
            v.push(self.values[i].clone());
        }
        self.breaks = b;
        self.values = v;
    }

    pub fn lo(&self) -> &Rational {
        &self.breaks[0]
    }

    pub fn hi(&self) -> &Rational {
        self.breaks.last().unwrap()
    }

    pub fn piece_count(&self) -> usize {
        self.breaks.len() - 1
    }

    /// `(lo, hi, slope, intercept)` of every piece.
    pub fn pieces(&self) -> Vec<(Rational, Rational, Rational, Rational)> {
        (0..self.piece_count())
            .map(|i| {
                let s = self.slope(i);
                let c = &self.values[i] - &s * &self.breaks[i];
                (self.breaks[i].clone(), self.breaks[i + 1].clone(), s, c)
            })
            .collect()
    }

    pub fn slope(&self, i: usize) -> Rational {
        (&self.values[i + 1] - &self.values[i]) / (&self.breaks[i + 1] - &self.breaks[i])
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let i = match self.breaks.binary_search(x) {
            Ok(i) => return self.values[i].clone(),
            Err(0) => 0,
            Err(i) if i >= self.breaks.len() => self.breaks.len() - 2,
            Err(i) => i - 1,
        };
        &self.values[i] + self.slope(i) * (x - &self.breaks[i])
    }

    pub fn is_self_map(&self) -> bool {
        self.values.iter().all(|v| v >= self.lo() && v <= self.hi())
    }

    fn dir(&self, i: usize) -> Dir {
        match self.slope(i) {
            s if s.is_positive() => Dir::Up,
            s if s.is_negative() => Dir::Down,
            _ => Dir::Flat,
        }
    }

    /// Points splitting the domain into maximal monotone laps. A flat run
    /// between opposite directions is represented by its left end.
    pub fn turning_points(&self) -> Vec<Rational> {
        let mut out = Vec::new();
        let mut last: Option<Dir> = None;
        let mut flat_start: Option<usize> = None;
        for i in 0..self.piece_count() {
            match self.dir(i) {
                Dir::Flat => {
                    if flat_start.is_none() {
                        flat_start = Some(i);
                    }
                }
                d => {
                    if let Some(prev) = last {
                        if prev != d {
                            out.push(self.breaks[flat_start.unwrap_or(i)].clone());
                        }
                    }
                    last = Some(d);
                    flat_start = None;
                }
            }
        }
        out
    }

    pub fn lap_count(&self) -> usize {
        self.turning_points().len() + 1
    }

    /// `self ∘ other`, exact.
    pub fn compose(&self, other: &PLIntervalMap) -> PLIntervalMap {
        let mut xs: Vec<Rational> = other.breaks.clone();
        for i in 0..other.piece_count() {
            let (v0, v1) = (&other.values[i], &other.values[i + 1]);
            if v0 == v1 {
                continue;
            }
            for t in &self.breaks {
                let inside = (t > v0 && t < v1) || (t < v0 && t > v1);
                if inside {
                    let x = &other.breaks[i] + (t - v0) * (&other.breaks[i + 1] - &other.breaks[i]) / (v1 - v0);
                    xs.push(x);
                }
            }
        }
        xs.sort();
        xs.dedup();
        let vals = xs.iter().map(|x| self.eval(&other.eval(x))).collect();
        PLIntervalMap::new(xs, vals).expect("composition keeps increasing breakpoints")
    }

    /// `ψ ∘ self ∘ ψ⁻¹` for the increasing affine `ψ(x) = (x − lo)/(hi − lo)`
    /// onto `[0, 1]`.
    pub fn normalized(&self) -> PLIntervalMap {
        let (lo, w) = (self.lo().clone(), self.hi() - self.lo());
        let f = |x: &Rational| (x - &lo) / &w;
        PLIntervalMap { breaks: self.breaks.iter().map(f).collect(), values: self.values.iter().map(f).collect() }
    }

    /// Affine conjugate by `ψ(x) = (x + shift) / scale`, `scale > 0`.
    pub fn conjugate(&self, shift: &Rational, scale: &Rational) -> PLIntervalMap {
        let f = |x: &Rational| (x + shift) / scale;
        PLIntervalMap { breaks: self.breaks.iter().map(f).collect(), values: self.values.iter().map(f).collect() }
    }

    /// Restriction to `[lo, c]` with values clipped to `c`. Collapses the
    /// constant tail `[c, hi]` to the single point `c`.
    pub fn collapse_tail(&self, c: &Rational) -> Result<PLIntervalMap, ReductionError> {
        let tail_const = self.breaks.iter().zip(&self.values).filter(|(x, _)| *x >= c).map(|(_, v)| v).collect::<Vec<_>>();
        if tail_const.windows(2).any(|w| w[0] != w[1]) || self.eval(c) > *c {
            return Err(ReductionError::Domain("tail is not a collapsible constant piece".into()));
        }
        let mut xs: Vec<Rational> = self.breaks.iter().filter(|x| *x < c).cloned().collect();
        for i in 0..self.piece_count() {
            let (v0, v1) = (&self.values[i], &self.values[i + 1]);
            if (v0 < c && v1 > c) || (v0 > c && v1 < c) {
                xs.push(&self.breaks[i] + (c - v0) * (&self.breaks[i + 1] - &self.breaks[i]) / (v1 - v0));
            }
        }
        xs.push(c.clone());
        xs.sort();
        xs.dedup();
        let vals = xs.iter().map(|x| self.eval(x).min(c.clone())).collect();
        PLIntervalMap::new(xs, vals)
    }

    /// Extends the outer affine pieces of a unimodal map: the left branch to
    /// its fixed point `x1`, the right branch to the preimage `x2` of `x1`.
    pub fn extend_to_trapezoid(&self) -> Result<(PLIntervalMap, Rational, Rational), ReductionError> {
        let p = self.pieces();
        let (_, _, sl, cl) = p.first().unwrap().clone();
        let (_, _, sr, cr) = p.last().unwrap().clone();
        self.extend_with((sl, cl), (sr, cr))
    }

    /// As [`extend_to_trapezoid`](Self::extend_to_trapezoid) with the outer
    /// branch formulas `x ↦ s·x + c` given explicitly; a branch missing from
    /// the domain (degenerate at this parameter) is added as a new piece.
    pub fn extend_with(
        &self,
        (sl, cl): (Rational, Rational),
        (sr, cr): (Rational, Rational),
    ) -> Result<(PLIntervalMap, Rational, Rational), ReductionError> {
        if !(sl > Rational::one() && sr < -Rational::one()) {
            return Err(ReductionError::Domain("outer branches are not expanding".into()));
        }
        let x1 = &cl / (Rational::one() - &sl);
        let x2 = (&x1 - &cr) / &sr;
        if &x1 > self.lo() || &x2 < self.hi() {
            return Err(ReductionError::Domain("extension points fall inside the domain".into()));
        }
        let mut breaks = self.breaks.clone();
        let mut values = self.values.clone();
        if &x1 < self.lo() {
            if &sl * self.lo() + &cl != values[0] {
                return Err(ReductionError::Domain("left branch is not continuous with the map".into()));
            }
            breaks.insert(0, x1.clone());
            values.insert(0, x1.clone());
        }
        if &x2 > self.hi() {
            if &sr * self.hi() + &cr != *values.last().unwrap() {
                return Err(ReductionError::Domain("right branch is not continuous with the map".into()));
            }
            breaks.push(x2.clone());
            values.push(x1.clone());
        }
        Ok((PLIntervalMap::new(breaks, values)?, x1, x2))
    }
}

/// Parameters of the trapezoidal map `T_{X,Y,Z}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrapezoidParams {
    #[serde(with = "crate::exact_geometry::serde_rational")]
    pub x: Rational,
    #[serde(with = "crate::exact_geometry::serde_rational")]
    pub y: Rational,
    #[serde(with = "crate::exact_geometry::serde_rational")]
    pub z: Rational,
}

impl TrapezoidParams {
    pub fn new(x: Rational, y: Rational, z: Rational) -> Self {
        TrapezoidParams { x, y, z }
    }

    /// Plateau height `(1 − Z)/(X + Y)`.
    pub fn height(&self) -> Rational {
        (Rational::one() - &self.z) / (&self.x + &self.y)
    }
}

/// The self-map of `[0, 1]` rising with slope `1/X`, flat on a plateau of
/// length `Z`, falling with slope `−1/Y`, with both endpoints sent to 0.
pub fn make_trapezoid(p: &TrapezoidParams) -> Result<PLIntervalMap, ReductionError> {
    let unit = |v: &Rational| v.is_positive() && v < &Rational::one();
    if !(unit(&p.x) && unit(&p.y) && unit(&p.z)) {
        return Err(ReductionError::Domain("X, Y, Z must lie in (0, 1)".into()));
    }
    let h = p.height();
    if h > Rational::one() {
        return Err(ReductionError::Domain(format!("plateau height {h} exceeds 1")));
    }
    let u = &p.x * &h;
    let v = &u + &p.z;
    PLIntervalMap::new(
        vec![Rational::zero(), u, v, Rational::one()],
        vec![Rational::zero(), h.clone(), h, Rational::zero()],
    )
}

/// Lap growth of an interval map.
#[derive(Debug, Clone, Serialize)]
pub struct LapEntropy {
    /// Number of monotone laps of `f^m`, `m = 1..=depth`.
    #[serde(serialize_with = "ser_counts")]
    pub laps: Vec<BigUint>,
    /// `min_m ln lap(f^m) / m`, a certified upper bound.
    pub upper: f64,
    /// Exact entropy from the finite lap-image transition graph when it closes.
    pub exact: Option<RootInterval>,
    /// Number of distinct lap images found (the transition graph size).
    pub images: usize,
    pub truncated: bool,
}

fn ser_counts<S: serde::Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|c| c.to_string()))
}

impl LapEntropy {
    /// Best estimate: the exact value when known, else the upper bound.
    pub fn value(&self) -> f64 {
        match (&self.exact, self.positive()) {
            (Some(r), Some(true)) => r.ln_mid(),
            (Some(_), _) => 0.0,
            (None, _) => self.upper,
        }
    }

    /// Enclosure `[lower, upper]` of the entropy.
    pub fn bounds(&self) -> (f64, f64) {
        match (&self.exact, self.positive()) {
            (Some(r), Some(true)) => {
                let (a, b) = r.ln_bounds();
                (a.max(0.0), b.max(a.max(0.0)))
            }
            (Some(_), _) => (0.0, 0.0),
            (None, _) => (0.0, self.upper),
        }
    }

    /// `Some(true)` when the entropy is certainly positive, `Some(false)`
    /// when certainly zero, `None` when undecided.
    pub fn positive(&self) -> Option<bool> {
        self.exact.as_ref().map(|r| r.cmp_exact(&RootInterval::exact(Rational::one())).is_gt())
    }
}

/// Splits `[p, q]` at the turning points of `f` and returns the images of
/// the monotone parts that are not single points.
fn lap_images(f: &PLIntervalMap, turns: &[Rational], p: &Rational, q: &Rational) -> Vec<(Rational, Rational)> {
    let mut cuts = vec![p.clone()];
    cuts.extend(turns.iter().filter(|t| *t > p && *t < q).cloned());
    cuts.push(q.clone());
    cuts.windows(2)
        .filter_map(|w| {
            // The extremes of f on a monotone part are at its ends.
            let (a, b) = (f.eval(&w[0]), f.eval(&w[1]));
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            (lo < hi).then_some((lo, hi))
        })
        .collect()
}

/// Lap numbers of `f^m` for `m ≤ depth` by pushing lap images forward, and
/// the exact growth rate from the image transition graph when it is finite
/// within `budget` images.
pub fn lap_entropy(f: &PLIntervalMap, depth: usize, budget: usize) -> LapEntropy {
    assert!(depth >= 1);
    let turns = f.turning_points();
    let mut index: BTreeMap<(Rational, Rational), usize> = BTreeMap::new();
    let mut nodes: Vec<(Rational, Rational)> = Vec::new();
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut truncated = false;
    let root = (f.lo().clone(), f.hi().clone());
    index.insert(root.clone(), 0);
    nodes.push(root);
    let mut k = 0;
    while k < nodes.len() {
        if nodes.len() > budget {
            truncated = true;
            break;
        }
        let (p, q) = nodes[k].clone();
        let mut out = Vec::new();
        for img in lap_images(f, &turns, &p, &q) {
            let id = *index.entry(img.clone()).or_insert_with(|| {
                nodes.push(img);
                nodes.len() - 1
            });
            out.push(id);
        }
        edges.push(out);
        k += 1;
    }
    // Lap counts by propagating multiplicities; images beyond the explored
    // set are expanded on the fly.
    let mut laps = Vec::with_capacity(depth);
    let mut counts: BTreeMap<usize, BigUint> = BTreeMap::from([(0, BigUint::one())]);
    let mut upper = f64::INFINITY;
    for m in 1..=depth {
        let mut next: BTreeMap<usize, BigUint> = BTreeMap::new();
        for (&i, c) in &counts {
            let succ: Vec<usize> = if i < edges.len() {
                edges[i].clone()
            } else {
                let (p, q) = nodes[i].clone();
                lap_images(f, &turns, &p, &q)
                    .into_iter()
                    .map(|img| {
                        *index.entry(img.clone()).or_insert_with(|| {
                            nodes.push(img);
                            nodes.len() - 1
                        })
                    })
                    .collect()
            };
            for j in succ {
                *next.entry(j).or_insert_with(BigUint::zero) += c;
            }
        }
        let total: BigUint = next.values().sum();
        let total = if total.is_zero() { BigUint::one() } else { total };
        let ln = ln_big(&total);
        upper = upper.min(ln / m as f64);
        laps.push(total);
        counts = next;
    }
    let exact = (!truncated).then(|| {
        let n = edges.len();
        let mut rows = vec![vec![0u32; n]; n];
        for (i, out) in edges.iter().enumerate() {
            for &j in out {
                rows[i][j] += 1;
            }
        }
        let names = (0..n).map(|i| format!("[{}, {}]", nodes[i].0, nodes[i].1)).collect();
        let m = CoverMatrix::new(names, rows, CoverMode::Markov);
        let (p, _) = char_poly_blocks(&m).strip_x();
        perron_root(&p, &rat(1, 1_000_000_000_000))
    });
    LapEntropy { laps, upper, exact, images: edges.len(), truncated }
}

fn ln_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        let f: f64 = n.to_string().parse().unwrap_or(f64::INFINITY);
        if f.is_finite() {
            return f.ln();
        }
    }
    let shift = bits.saturating_sub(64);
    let top: f64 = (n >> shift).to_string().parse().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_geometry::int;

    fn tent() -> PLIntervalMap {
        PLIntervalMap::new(vec![int(0), rat(1, 2), int(1)], vec![int(0), int(1), int(0)]).unwrap()
    }

    #[test]
    fn tent_map_has_entropy_ln_two() {
        let e = lap_entropy(&tent(), 20, 1000);
        assert_eq!(e.laps[19], BigUint::from(1u32 << 20));
        assert!((e.upper - std::f64::consts::LN_2).abs() < 1e-3);
        assert!((e.value() - std::f64::consts::LN_2).abs() < 1e-9);
        assert_eq!(e.positive(), Some(true));
    }

    #[test]
    fn symmetric_trapezoid() {
        for z in [rat(1, 4), rat(1, 2), rat(9, 10)] {
            let t = make_trapezoid(&TrapezoidParams::new(rat(1, 2), rat(1, 2), z.clone())).unwrap();
            assert_eq!(t.slope(0), int(2));
            assert_eq!(t.slope(2), int(-2));
            assert_eq!(t.values[1], int(1) - z);
            assert!(t.is_self_map());
        }
        let err = make_trapezoid(&TrapezoidParams::new(rat(1, 16), rat(1, 16), rat(1, 2))).unwrap_err();
        assert!(matches!(err, ReductionError::Domain(_)));
    }

    #[test]
    fn composition_and_laps() {
        let t = tent();
        let t2 = t.compose(&t);
        assert_eq!(t2.lap_count(), 4);
        assert_eq!(t2.eval(&rat(1, 4)), int(1));
        let e = lap_entropy(&t, 3, 100);
        assert_eq!(e.laps, vec![BigUint::from(2u32), BigUint::from(4u32), BigUint::from(8u32)]);
    }

    #[test]
    fn submultiplicative_laps() {
        let t = make_trapezoid(&TrapezoidParams::new(rat(1, 16), rat(1, 8), rat(13, 16))).unwrap();
        let e = lap_entropy(&t, 12, 10_000);
        for m in 1..6 {
            for n in 1..6 {
                assert!(e.laps[m + n - 1] <= &e.laps[m - 1] * &e.laps[n - 1]);
            }
        }
    }

    #[test]
    fn tail_collapse_and_extension() {
        let f = PLIntervalMap::new(
            vec![int(0), rat(1, 4), rat(1, 2), int(1)],
            vec![int(0), rat(1, 2), int(0), int(0)],
        )
        .unwrap();
        let g = f.collapse_tail(&rat(1, 2)).unwrap();
        assert_eq!(g.hi(), &rat(1, 2));
        assert_eq!(g.lap_count(), 2);
    }
}
