//! Exact rational scalars, points, axis-aligned and diagonal segments, and
//! coordinates that are affine in the parameter `b`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Arbitrary-precision fraction, always stored in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
    #[error("displacement ({dx}, {dy}) is not parallel to any of v1..v4")]
    NonAtlasDirection { dx: String, dy: String },
    #[error("degenerate segment has no direction")]
    Degenerate,
}

/// Builds a canonical fraction from a raw numerator/denominator pair.
pub fn normalize(num: BigInt, den: BigInt) -> Result<Rational, GeometryError> {
    if den.is_zero() {
        return Err(GeometryError::ZeroDenominator);
    }
    Ok(Rational::new(num, den))
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or an integer. Decimals are rejected here; see
/// [`parse_decimal`].
pub fn parse_rational(s: &str) -> Result<Rational, GeometryError> {
    let t = s.trim();
    let bad = || GeometryError::Parse(s.to_string());
    match t.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            normalize(n, d)
        }
        None => Ok(Rational::from_integer(BigInt::from_str(t).map_err(|_| bad())?)),
    }
}

/// Parses a rational or a finite decimal literal such as `-0.15`.
/// The flag is true when the input was a decimal (callers may warn).
pub fn parse_decimal(s: &str) -> Result<(Rational, bool), GeometryError> {
    let t = s.trim();
    if !t.contains('.') && !t.contains('e') && !t.contains('E') {
        return parse_rational(t).map(|r| (r, false));
    }
    let bad = || GeometryError::Parse(s.to_string());
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = body.split_once('.').ok_or_else(bad)?;
    if frac_part.is_empty() && int_part.is_empty() {
        return Err(bad());
    }
    let digits = format!("{}{}", int_part, frac_part);
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let num = BigInt::from_str(&digits).map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = normalize(if neg { -num } else { num }, den)?;
    Ok((r, true))
}

/// `"p/q"`, with `q` omitted when it is 1.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Serde adapter that stores a rational as its string form.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// The value `c0 + c1*b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParamScalar {
    #[serde(with = "serde_rational")]
    pub c0: Rational,
    #[serde(with = "serde_rational")]
    pub c1: Rational,
}

impl ParamScalar {
    pub fn new(c0: Rational, c1: Rational) -> Self {
        ParamScalar { c0, c1 }
    }

    pub fn constant(c0: Rational) -> Self {
        ParamScalar { c0, c1: Rational::zero() }
    }

    /// The scalar `b` itself.
    pub fn b() -> Self {
        ParamScalar { c0: Rational::zero(), c1: Rational::one() }
    }

    pub fn from_ints(c0: i64, c1: i64) -> Self {
        ParamScalar { c0: int(c0), c1: int(c1) }
    }

    pub fn eval(&self, b: &Rational) -> Rational {
        &self.c0 + &self.c1 * b
    }

    pub fn add(&self, o: &ParamScalar) -> ParamScalar {
        ParamScalar { c0: &self.c0 + &o.c0, c1: &self.c1 + &o.c1 }
    }

    pub fn sub(&self, o: &ParamScalar) -> ParamScalar {
        ParamScalar { c0: &self.c0 - &o.c0, c1: &self.c1 - &o.c1 }
    }

    pub fn scale(&self, k: &Rational) -> ParamScalar {
        ParamScalar { c0: &self.c0 * k, c1: &self.c1 * k }
    }
}

impl fmt::Display for ParamScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.c0.is_zero(), self.c1.is_zero()) {
            (_, true) => write!(f, "{}", self.c0),
            (true, false) => write!(f, "{}b", self.c1),
            (false, false) => {
                if self.c1.is_negative() {
                    write!(f, "{} - {}b", self.c0, -&self.c1)
                } else {
                    write!(f, "{} + {}b", self.c0, self.c1)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParamPoint {
    pub x: ParamScalar,
    pub y: ParamScalar,
}

impl ParamPoint {
    pub fn eval(&self, b: &Rational) -> Point {
        Point::new(self.x.eval(b), self.y.eval(b))
    }
}

/// A point of the plane. Ordering is lexicographic in (x, y).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    #[serde(with = "serde_rational")]
    pub x: Rational,
    #[serde(with = "serde_rational")]
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point { x: int(x), y: int(y) }
    }

    pub fn scale(&self, k: &Rational) -> Point {
        Point::new(&self.x * k, &self.y * k)
    }

    pub fn sub(&self, o: &Point) -> (Rational, Rational) {
        (&self.x - &o.x, &self.y - &o.y)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (to_f64(&self.x), to_f64(&self.y))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Edge directions v1=(1,0), v2=(0,1), v3=(1,1), v4=(1,-1), plus the zero
/// vector produced when a plateau collapses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    V1,
    V2,
    V3,
    V4,
    Zero,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::V1, Direction::V2, Direction::V3, Direction::V4];

    pub fn vector(self) -> (i64, i64) {
        match self {
            Direction::V1 => (1, 0),
            Direction::V2 => (0, 1),
            Direction::V3 => (1, 1),
            Direction::V4 => (1, -1),
            Direction::Zero => (0, 0),
        }
    }

    /// Recognizes an integer vector as `k * v` for some `v` in V.
    pub fn from_vector(dx: i64, dy: i64) -> Option<(i64, Direction)> {
        match (dx, dy) {
            (0, 0) => Some((0, Direction::Zero)),
            (k, 0) => Some((k, Direction::V1)),
            (0, k) => Some((k, Direction::V2)),
            (a, b) if a == b => Some((a, Direction::V3)),
            (a, b) if a == -b => Some((a, Direction::V4)),
            _ => None,
        }
    }

    /// Line offset of `p` for the family of lines with this direction:
    /// y for v1, x for v2, y-x for v3, x+y for v4.
    pub fn offset_of(self, p: &Point) -> Rational {
        match self {
            Direction::V1 => p.y.clone(),
            Direction::V2 => p.x.clone(),
            Direction::V3 => &p.y - &p.x,
            Direction::V4 => &p.x + &p.y,
            Direction::Zero => Rational::zero(),
        }
    }

    /// Position of `p` along its line: y for v2, x otherwise. One unit of
    /// parameter is one copy of the direction vector.
    pub fn param_of(self, p: &Point) -> Rational {
        match self {
            Direction::V2 => p.y.clone(),
            _ => p.x.clone(),
        }
    }

    pub fn point_at(self, offset: &Rational, t: &Rational) -> Point {
        match self {
            Direction::V1 => Point::new(t.clone(), offset.clone()),
            Direction::V2 => Point::new(offset.clone(), t.clone()),
            Direction::V3 => Point::new(t.clone(), t + offset),
            Direction::V4 => Point::new(t.clone(), offset - t),
            Direction::Zero => Point::new(t.clone(), offset.clone()),
        }
    }

    /// Squared Euclidean length of the direction vector.
    pub fn norm2(self) -> i64 {
        let (a, b) = self.vector();
        a * a + b * b
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::V1 => "v1",
            Direction::V2 => "v2",
            Direction::V3 => "v3",
            Direction::V4 => "v4",
            Direction::Zero => "zero",
        }
    }
}

/// Classifies a displacement as a multiple of one of v1..v4.
pub fn direction_of(dx: &Rational, dy: &Rational) -> Result<Direction, GeometryError> {
    if dx.is_zero() && dy.is_zero() {
        return Err(GeometryError::Degenerate);
    }
    if dy.is_zero() {
        Ok(Direction::V1)
    } else if dx.is_zero() {
        Ok(Direction::V2)
    } else if dx == dy {
        Ok(Direction::V3)
    } else if dx == &-dy {
        Ok(Direction::V4)
    } else {
        Err(GeometryError::NonAtlasDirection { dx: dx.to_string(), dy: dy.to_string() })
    }
}

/// A closed segment with endpoints in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Segment {
    pub p: Point,
    pub q: Point,
    pub direction: Direction,
}

impl Segment {
    /// Canonical segment through two points. Equal points give a
    /// degenerate segment with direction `Zero`.
    pub fn new(a: Point, b: Point) -> Result<Segment, GeometryError> {
        if a == b {
            return Ok(Segment { p: a.clone(), q: b, direction: Direction::Zero });
        }
        let (dx, dy) = b.sub(&a);
        let direction = direction_of(&dx, &dy)?;
        let (p, q) = if a <= b { (a, b) } else { (b, a) };
        Ok(Segment { p, q, direction })
    }

    pub fn is_degenerate(&self) -> bool {
        self.p == self.q
    }

    pub fn canonical(&self) -> Segment {
        Segment::new(self.p.clone(), self.q.clone()).expect("segment already valid")
    }

    pub fn squared_length(&self) -> Rational {
        let (dx, dy) = self.q.sub(&self.p);
        &dx * &dx + &dy * &dy
    }

    pub fn midpoint(&self) -> Point {
        let h = rat(1, 2);
        Point::new((&self.p.x + &self.q.x) * &h, (&self.p.y + &self.q.y) * &h)
    }

    pub fn contains(&self, r: &Point) -> bool {
        if self.is_degenerate() {
            return r == &self.p;
        }
        let d = self.direction;
        if d.offset_of(r) != d.offset_of(&self.p) {
            return false;
        }
        let t = d.param_of(r);
        let (a, b) = (d.param_of(&self.p), d.param_of(&self.q));
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        lo <= t && t <= hi
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} -- {}]", self.p, self.q)
    }
}

pub fn segment_direction(s: &Segment) -> Result<Direction, GeometryError> {
    let (dx, dy) = s.q.sub(&s.p);
    direction_of(&dx, &dy)
}

/// A rational extended by the two infinities, used for unbounded rays and
/// lines.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ext {
    NegInf,
    Fin(Rational),
    PosInf,
}

impl Ext {
    pub fn fin(&self) -> Option<&Rational> {
        match self {
            Ext::Fin(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Ext::Fin(_))
    }

    /// `k * self + s` for an integer `k != 0`.
    pub fn affine(&self, k: i64, s: &Rational) -> Ext {
        match self {
            Ext::Fin(r) => Ext::Fin(r * int(k) + s),
            Ext::NegInf if k > 0 => Ext::NegInf,
            Ext::NegInf => Ext::PosInf,
            Ext::PosInf if k > 0 => Ext::PosInf,
            Ext::PosInf => Ext::NegInf,
        }
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ext {
    fn cmp(&self, other: &Self) -> Ordering {
        use Ext::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Fin(a), Fin(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::NegInf => write!(f, "-inf"),
            Ext::Fin(r) => write!(f, "{}", r),
            Ext::PosInf => write!(f, "+inf"),
        }
    }
}

/// Simplest rational (smallest denominator) in the closed interval
/// `[lo, hi]`, found by walking the Stern-Brocot tree.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    assert!(lo <= hi);
    if lo.is_negative() && hi.is_positive() || lo.is_zero() || hi.is_zero() {
        return Rational::zero();
    }
    if hi.is_negative() {
        return -simplest_between(&-hi, &-lo);
    }
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    if fl.clone() + Rational::one() <= *hi {
        return fl + Rational::one();
    }
    // lo and hi share the integer part; recurse on reciprocals of the
    // fractional parts.
    let a = lo - &fl;
    let b = hi - &fl;
    let inner = simplest_between(&(Rational::one() / b), &(Rational::one() / a));
    fl + Rational::one() / inner
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_reduces_and_fixes_sign() {
        let r = normalize(BigInt::from(6), BigInt::from(-4)).unwrap();
        assert_eq!(format_rational(&r), "-3/2");
        let z = normalize(BigInt::from(0), BigInt::from(7)).unwrap();
        assert_eq!(z.denom(), &BigInt::from(1));
        assert_eq!(normalize(BigInt::from(1), BigInt::from(0)), Err(GeometryError::ZeroDenominator));
    }

    #[test]
    fn trapezoid_height_parameter_at_left_window_end() {
        // Z = 55b / (16(3b - 1)) at b = -13/16, built from raw integer parts.
        let b = rat(-13, 16);
        let num = int(55) * &b;
        let den = int(16) * (int(3) * &b - int(1));
        let z = num / den;
        assert_eq!(z, rat(13, 16));
    }

    #[test]
    fn eval_param_examples() {
        assert_eq!(ParamScalar::from_ints(-2, -1).eval(&int(-3)), int(1));
        assert_eq!(ParamScalar::from_ints(-1, 2).eval(&rat(1, 2)), int(0));
        assert_eq!(ParamScalar::from_ints(0, -5).eval(&rat(-1, 5)), int(1));
    }

    #[test]
    fn segment_directions() {
        let s = Segment::new(Point::from_ints(0, 0), Point::from_ints(2, 2)).unwrap();
        assert_eq!(segment_direction(&s).unwrap(), Direction::V3);
        let s = Segment::new(Point::from_ints(1, -1), Point::from_ints(1, -3)).unwrap();
        assert_eq!(s.direction, Direction::V2);
        assert_eq!(s.p, Point::from_ints(1, -3));
        assert!(matches!(
            Segment::new(Point::from_ints(0, 0), Point::from_ints(1, 2)),
            Err(GeometryError::NonAtlasDirection { .. })
        ));
    }

    #[test]
    fn parse_round_trip() {
        for s in ["-3/2", "7", "0", "1201/1740"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(parse_decimal("-0.15").unwrap(), (rat(-3, 20), true));
        assert_eq!(parse_decimal("-1.95").unwrap().0, rat(-39, 20));
        assert_eq!(parse_decimal("3").unwrap(), (int(3), false));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_decimal("1.2.3").is_err());
    }

    #[test]
    fn simplest_rational() {
        assert_eq!(simplest_between(&rat(1, 3), &rat(1, 2)), rat(1, 2));
        assert_eq!(simplest_between(&rat(-112, 137), &rat(-13, 16)), rat(-13, 16));
        assert_eq!(simplest_between(&rat(3, 10), &rat(2, 5)), rat(1, 3));
        assert_eq!(simplest_between(&rat(-5, 2), &rat(7, 3)), int(0));
        assert_eq!(simplest_between(&rat(27, 10), &rat(29, 10)), rat(11, 4));
    }

    #[test]
    fn ext_order_and_affine() {
        assert!(Ext::NegInf < Ext::Fin(int(-100)));
        assert!(Ext::Fin(int(100)) < Ext::PosInf);
        assert_eq!(Ext::PosInf.affine(-2, &int(1)), Ext::NegInf);
        assert_eq!(Ext::Fin(int(3)).affine(-2, &int(1)), Ext::Fin(int(-5)));
    }
}
