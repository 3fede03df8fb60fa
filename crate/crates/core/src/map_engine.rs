//! The map F(x,y) = (|x| - y + a, x - |y| + b), its four affine pieces,
//! exact orbit classification and images of segments.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact_geometry::{int, Direction, Point, Rational, Segment};

pub const DEFAULT_MAX_ITERS: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("segment {0} crosses an axis; split it first")]
    SplitRequired(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MapParams {
    #[serde(with = "crate::exact_geometry::serde_rational")]
    pub a: Rational,
    #[serde(with = "crate::exact_geometry::serde_rational")]
    pub b: Rational,
}

impl MapParams {
    pub fn new(a: Rational, b: Rational) -> Self {
        MapParams { a, b }
    }

    /// The normalized family a = -1 used throughout the graph atlas.
    pub fn minus_one(b: Rational) -> Self {
        MapParams { a: -Rational::one(), b }
    }
}

/// The four affine branches of F, one per closed quadrant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Piece {
    F1,
    F2,
    F3,
    F4,
}

impl Piece {
    pub const ALL: [Piece; 4] = [Piece::F1, Piece::F2, Piece::F3, Piece::F4];

    /// Linear part as rows `[[m00, m01], [m10, m11]]`.
    pub fn linear(self) -> [[i64; 2]; 2] {
        match self {
            Piece::F1 => [[1, -1], [1, -1]],
            Piece::F2 => [[-1, -1], [1, -1]],
            Piece::F3 => [[-1, -1], [1, 1]],
            Piece::F4 => [[1, -1], [1, 1]],
        }
    }

    pub fn apply(self, params: &MapParams, p: &Point) -> Point {
        let m = self.linear();
        let x = int(m[0][0]) * &p.x + int(m[0][1]) * &p.y + &params.a;
        let y = int(m[1][0]) * &p.x + int(m[1][1]) * &p.y + &params.b;
        Point::new(x, y)
    }

    /// Whether `p` lies in the closed quadrant of this piece.
    pub fn contains(self, p: &Point) -> bool {
        let (xs, ys) = (p.x.is_negative(), p.y.is_negative());
        let (xp, yp) = (p.x.is_positive(), p.y.is_positive());
        match self {
            Piece::F1 => !xs && !ys,
            Piece::F2 => !xp && !ys,
            Piece::F3 => !xp && !yp,
            Piece::F4 => !xs && !yp,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Piece::F1 => 1,
            Piece::F2 => 2,
            Piece::F3 => 3,
            Piece::F4 => 4,
        }
    }
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q{}", self.index())
    }
}

pub fn apply(params: &MapParams, p: &Point) -> Point {
    let x = p.x.abs() - &p.y + &params.a;
    let y = &p.x - p.y.abs() + &params.b;
    Point::new(x, y)
}

pub fn iterate(params: &MapParams, p: &Point, n: usize) -> Point {
    let mut q = p.clone();
    for _ in 0..n {
        q = apply(params, &q);
    }
    q
}

/// Every piece whose closed quadrant contains `p`, lowest index first.
pub fn piece_at(p: &Point) -> Vec<Piece> {
    Piece::ALL.iter().copied().filter(|q| q.contains(p)).collect()
}

/// Lowest-index piece at `p`, plus whether `p` sits on an axis.
pub fn primary_piece(p: &Point) -> (Piece, bool) {
    let all = piece_at(p);
    (all[0], all.len() > 1)
}

/// Rescales to a in {-1, 0, 1}. Returns the new parameters and the factor
/// `lambda > 0` with `lambda * F_{a,b}(x/lambda, y/lambda) = F_{lambda a, lambda b}(x, y)`.
pub fn normalize_params(params: &MapParams) -> (MapParams, Rational) {
    let lambda = if !params.a.is_zero() {
        Rational::one() / params.a.abs()
    } else if !params.b.is_zero() {
        Rational::one() / params.b.abs()
    } else {
        Rational::one()
    };
    let scaled = MapParams::new(&params.a * &lambda, &params.b * &lambda);
    (scaled, lambda)
}

/// `A_piece(d) = k * d'`.
pub fn direction_image(piece: Piece, d: Direction) -> (i64, Direction) {
    let m = piece.linear();
    let (vx, vy) = d.vector();
    let ix = m[0][0] * vx + m[0][1] * vy;
    let iy = m[1][0] * vx + m[1][1] * vy;
    let (k, dir) = Direction::from_vector(ix, iy).expect("direction algebra is closed on V");
    (k, dir)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SegmentImage {
    Segment(Segment),
    Point(Point),
}

impl SegmentImage {
    pub fn squared_length(&self) -> Rational {
        match self {
            SegmentImage::Segment(s) => s.squared_length(),
            SegmentImage::Point(_) => Rational::zero(),
        }
    }
}

/// The piece that applies to the whole closed segment, if one does.
pub fn segment_piece(s: &Segment) -> Option<Piece> {
    Piece::ALL
        .iter()
        .copied()
        .find(|q| q.contains(&s.p) && q.contains(&s.q))
}

pub fn segment_image(params: &MapParams, s: &Segment) -> Result<SegmentImage, MapError> {
    let piece = segment_piece(s).ok_or_else(|| MapError::SplitRequired(s.to_string()))?;
    let a = piece.apply(params, &s.p);
    let b = piece.apply(params, &s.q);
    if a == b {
        return Ok(SegmentImage::Point(a));
    }
    Ok(SegmentImage::Segment(
        Segment::new(a, b).expect("direction algebra keeps images in V"),
    ))
}

/// Splits a segment at its crossings with the coordinate axes so that each
/// part lies in one closed quadrant.
pub fn split_at_axes(s: &Segment) -> Vec<Segment> {
    if s.is_degenerate() {
        return vec![s.clone()];
    }
    let d = s.direction;
    let off = d.offset_of(&s.p);
    let (t0, t1) = (d.param_of(&s.p), d.param_of(&s.q));
    let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
    let mut cuts = vec![lo.clone()];
    for t in axis_params(d, &off) {
        if t > lo && t < hi {
            cuts.push(t);
        }
    }
    cuts.push(hi);
    cuts.sort();
    cuts.dedup();
    cuts.windows(2)
        .map(|w| Segment::new(d.point_at(&off, &w[0]), d.point_at(&off, &w[1])).unwrap())
        .collect()
}

/// Parameters at which the line with direction `d` and offset `off` meets
/// the axes.
pub fn axis_params(d: Direction, off: &Rational) -> Vec<Rational> {
    match d {
        Direction::V1 => vec![Rational::zero()],
        Direction::V2 => vec![Rational::zero()],
        Direction::V3 => vec![Rational::zero(), -off.clone()],
        Direction::V4 => vec![Rational::zero(), off.clone()],
        Direction::Zero => vec![],
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Period {
    Decided(usize),
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlopeProduct {
    /// Absolute return slope along the cycle, always a power of two.
    Expanding(u64),
    PlateauAbsorbed,
    Unknown,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrbitReport {
    pub start: Point,
    pub preperiod: usize,
    pub period: Period,
    pub cycle: Vec<Point>,
    /// One entry per iterate of the transient and one cycle pass.
    pub itinerary: Vec<Piece>,
    /// True where the corresponding itinerary point lies on an axis.
    pub boundary: Vec<bool>,
    pub slope_product: SlopeProduct,
    /// Last computed state when the budget ran out.
    pub last: Point,
}

impl OrbitReport {
    pub fn is_decided(&self) -> bool {
        matches!(self.period, Period::Decided(_))
    }

    pub fn period_len(&self) -> Option<usize> {
        match self.period {
            Period::Decided(p) => Some(p),
            Period::Undecided => None,
        }
    }

    /// Cycle rotated so that its lexicographically least point comes first.
    pub fn canonical_cycle(&self) -> Vec<Point> {
        if self.cycle.is_empty() {
            return vec![];
        }
        let k = (0..self.cycle.len()).min_by(|&i, &j| self.cycle[i].cmp(&self.cycle[j])).unwrap();
        let mut c = self.cycle[k..].to_vec();
        c.extend_from_slice(&self.cycle[..k]);
        c
    }
}

/// Brent's cycle detection on exact points. Never guesses: if no cycle is
/// found within `max_iters` evaluations of F, the period is undecided.
pub fn classify_orbit(params: &MapParams, p: &Point, max_iters: usize) -> OrbitReport {
    let undecided = |last: Point| OrbitReport {
        start: p.clone(),
        preperiod: 0,
        period: Period::Undecided,
        cycle: vec![],
        itinerary: vec![],
        boundary: vec![],
        slope_product: SlopeProduct::Unknown,
        last,
    };
    let mut evals = 0usize;
    let mut power = 1usize;
    let mut lam = 1usize;
    let mut tortoise = p.clone();
    let mut hare = apply(params, p);
    evals += 1;
    while tortoise != hare {
        if evals >= max_iters {
            return undecided(hare);
        }
        if power == lam {
            tortoise = hare.clone();
            power *= 2;
            lam = 0;
        }
        hare = apply(params, &hare);
        evals += 1;
        lam += 1;
    }
    // Preperiod: advance one pointer by lam, then walk both together.
    let mut a = p.clone();
    let mut b = iterate(params, p, lam);
    let mut mu = 0usize;
    while a != b {
        if evals >= max_iters.saturating_mul(2) {
            return undecided(b);
        }
        a = apply(params, &a);
        b = apply(params, &b);
        mu += 1;
        evals += 2;
    }
    let mut itinerary = Vec::with_capacity(mu + lam);
    let mut boundary = Vec::with_capacity(mu + lam);
    let mut q = p.clone();
    let mut cycle = Vec::with_capacity(lam);
    for i in 0..mu + lam {
        let (piece, on_axis) = primary_piece(&q);
        itinerary.push(piece);
        boundary.push(on_axis);
        if i >= mu {
            cycle.push(q.clone());
        }
        q = apply(params, &q);
    }
    let slope_product = cycle_slope_product(&cycle);
    OrbitReport {
        start: p.clone(),
        preperiod: mu,
        period: Period::Decided(lam),
        cycle,
        itinerary,
        boundary,
        slope_product,
        last: q,
    }
}

/// Propagates each direction of V once around the cycle. A direction that
/// returns to itself with a nonzero scalar gives the return slope of the
/// cycle along that line; the largest such slope is reported.
pub fn cycle_slope_product(cycle: &[Point]) -> SlopeProduct {
    if cycle.is_empty() {
        return SlopeProduct::Unknown;
    }
    let mut best: Option<u64> = None;
    for start in Direction::ALL {
        let mut d = start;
        let mut prod: i64 = 1;
        for pt in cycle {
            let (piece, _) = primary_piece(pt);
            let (k, nd) = direction_image(piece, d);
            if k == 0 {
                prod = 0;
                break;
            }
            prod = prod.saturating_mul(k);
            d = nd;
        }
        if prod != 0 && d == start {
            let v = prod.unsigned_abs();
            best = Some(best.map_or(v, |b: u64| b.max(v)));
        }
    }
    match best {
        Some(v) => SlopeProduct::Expanding(v),
        None => SlopeProduct::PlateauAbsorbed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_geometry::rat;

    fn mp(a: i64, b: i64) -> MapParams {
        MapParams::new(int(a), int(b))
    }

    #[test]
    fn apply_examples() {
        assert_eq!(apply(&mp(1, 0), &Point::from_ints(2, 1)), Point::from_ints(2, 1));
        assert_eq!(apply(&mp(0, 0), &Point::from_ints(0, 0)), Point::from_ints(0, 0));
        let p = mp(1, 3);
        let a = apply(&p, &Point::from_ints(1, 1));
        assert_eq!(a, Point::from_ints(1, 3));
        let b = apply(&p, &a);
        assert_eq!(b, Point::from_ints(-1, 1));
        assert_eq!(apply(&p, &b), Point::from_ints(1, 1));
    }

    #[test]
    fn pieces_agree_on_axes() {
        assert_eq!(piece_at(&Point::from_ints(1, 2)), vec![Piece::F1]);
        let on_axis = Point::from_ints(0, 3);
        let ps = piece_at(&on_axis);
        assert_eq!(ps, vec![Piece::F1, Piece::F2]);
        let params = mp(-1, 2);
        assert_eq!(ps[0].apply(&params, &on_axis), ps[1].apply(&params, &on_axis));
        let origin = Point::from_ints(0, 0);
        assert_eq!(piece_at(&origin).len(), 4);
        for q in Piece::ALL {
            assert_eq!(q.apply(&params, &origin), apply(&params, &origin));
        }
    }

    #[test]
    fn normalization_examples() {
        assert_eq!(normalize_params(&mp(-2, 3)), (MapParams::new(int(-1), rat(3, 2)), rat(1, 2)));
        assert_eq!(normalize_params(&mp(0, -5)), (mp(0, -1), rat(1, 5)));
        assert_eq!(normalize_params(&mp(1, 0)), (mp(1, 0), int(1)));
    }

    #[test]
    fn direction_algebra_table() {
        use Direction::*;
        let expect = [
            (Piece::F1, [(1, V3), (-1, V3), (0, Zero), (2, V3)]),
            (Piece::F2, [(-1, V4), (-1, V3), (-2, V1), (2, V2)]),
            (Piece::F3, [(-1, V4), (-1, V4), (-2, V4), (0, Zero)]),
            (Piece::F4, [(1, V3), (-1, V4), (2, V2), (2, V1)]),
        ];
        for (piece, row) in expect {
            for (d, want) in Direction::ALL.iter().zip(row) {
                assert_eq!(direction_image(piece, *d), want, "{:?} {:?}", piece, d);
            }
        }
    }

    #[test]
    fn classify_examples() {
        let r = classify_orbit(&mp(0, -1), &Point::from_ints(5, 7), 1000);
        assert_eq!(r.period, Period::Decided(1));
        assert_eq!(r.cycle, vec![Point::from_ints(1, 0)]);
        assert!(r.preperiod <= 6);

        let r = classify_orbit(&mp(0, 0), &Point::from_ints(3, 0), 1000);
        assert_eq!((r.preperiod, r.period.clone()), (2, Period::Decided(1)));
        assert_eq!(r.cycle, vec![Point::from_ints(0, 0)]);

        let r = classify_orbit(&mp(-1, -3), &Point::from_ints(1, -1), 1000);
        assert_eq!(r.period, Period::Decided(7));
        let want: Vec<Point> = [(1, -1), (1, -3), (3, -5), (7, -5), (11, -1), (11, 7), (3, 1)]
            .iter()
            .map(|&(x, y)| Point::from_ints(x, y))
            .collect();
        assert_eq!(r.cycle, want);

        let r = classify_orbit(&mp(-1, -3), &Point::from_ints(0, 0), 3);
        assert_eq!(r.period, Period::Undecided);
    }

    #[test]
    fn segment_images() {
        let p = mp(-1, 1);
        let s = Segment::new(Point::from_ints(1, 1), Point::from_ints(2, 2)).unwrap();
        assert_eq!(segment_image(&p, &s).unwrap(), SegmentImage::Point(Point::from_ints(-1, 1)));

        let p = mp(-1, 0);
        let s = Segment::new(Point::from_ints(0, 0), Point::from_ints(1, 0)).unwrap();
        let img = segment_image(&p, &s).unwrap();
        assert_eq!(img, SegmentImage::Segment(Segment::new(Point::from_ints(-1, 0), Point::from_ints(0, 1)).unwrap()));
        assert_eq!(img.squared_length(), int(2) * s.squared_length());

        let s = Segment::new(Point::from_ints(3, 1), Point::from_ints(4, 0)).unwrap();
        let img = segment_image(&p, &s).unwrap();
        assert_eq!(img, SegmentImage::Segment(Segment::new(Point::from_ints(1, 2), Point::from_ints(3, 4)).unwrap()));
        assert_eq!(img.squared_length(), int(4) * s.squared_length());

        let s = Segment::new(Point::from_ints(-1, -1), Point::from_ints(1, 1)).unwrap();
        assert!(segment_image(&p, &s).is_err());
        assert_eq!(split_at_axes(&s).len(), 2);
    }
}
