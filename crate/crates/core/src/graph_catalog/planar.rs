//! Finite unions of closed segments, rays and lines with directions in V,
//! plus isolated points. Spans on a common line are kept merged, so two
//! stored spans meet at most in a crossing point.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::exact_geometry::{format_rational, int, rat, Direction, Ext, Point, Rational, Segment};
use crate::map_engine::{apply, axis_params, direction_image, primary_piece, MapParams, Piece};

/// A line `{p : offset_of(p) = offset}` for one direction of V.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LineKey {
    pub dir: Direction,
    pub offset: Rational,
}

impl LineKey {
    pub fn through(dir: Direction, p: &Point) -> LineKey {
        LineKey { dir, offset: dir.offset_of(p) }
    }

    pub fn point_at(&self, t: &Rational) -> Point {
        self.dir.point_at(&self.offset, t)
    }

    /// `(alpha, beta)` with the line equal to `alpha*x + beta*y = offset`.
    fn normal(&self) -> (i64, i64) {
        match self.dir {
            Direction::V1 => (0, 1),
            Direction::V2 => (1, 0),
            Direction::V3 => (-1, 1),
            Direction::V4 => (1, 1),
            Direction::Zero => (0, 0),
        }
    }

    pub fn intersect(&self, other: &LineKey) -> Option<Point> {
        if self.dir == other.dir {
            return None;
        }
        let (a1, b1) = self.normal();
        let (a2, b2) = other.normal();
        let det = a1 * b2 - a2 * b1;
        if det == 0 {
            return None;
        }
        let det = int(det);
        let x = (&self.offset * int(b2) - &other.offset * int(b1)) / &det;
        let y = (&other.offset * int(a1) - &self.offset * int(a2)) / &det;
        Some(Point::new(x, y))
    }
}

/// Closed parameter interval, possibly unbounded, with `lo <= hi`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Span {
    pub lo: Ext,
    pub hi: Ext,
}

impl Span {
    pub fn new(lo: Ext, hi: Ext) -> Span {
        if lo <= hi {
            Span { lo, hi }
        } else {
            Span { lo: hi, hi: lo }
        }
    }

    pub fn finite(lo: Rational, hi: Rational) -> Span {
        Span::new(Ext::Fin(lo), Ext::Fin(hi))
    }

    pub fn contains(&self, t: &Rational) -> bool {
        let e = Ext::Fin(t.clone());
        self.lo <= e && e <= self.hi
    }

    pub fn contains_span(&self, o: &Span) -> bool {
        self.lo <= o.lo && o.hi <= self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// A parameter strictly inside the span (or its single point).
    pub fn interior_param(&self) -> Rational {
        match (&self.lo, &self.hi) {
            (Ext::Fin(a), Ext::Fin(b)) => (a + b) * rat(1, 2),
            (Ext::Fin(a), Ext::PosInf) => a + Rational::one(),
            (Ext::NegInf, Ext::Fin(b)) => b - Rational::one(),
            _ => Rational::zero(),
        }
    }
}

/// The invariant-set data type: merged spans per line plus isolated points.
/// Labels attach names to points for reporting.
#[derive(Debug, Clone, Default)]
pub struct PlanarGraph {
    lines: BTreeMap<LineKey, Vec<Span>>,
    isolated: BTreeSet<Point>,
    labels: BTreeMap<Point, String>,
}

impl PartialEq for PlanarGraph {
    fn eq(&self, other: &Self) -> bool {
        self.lines == other.lines && self.isolated == other.isolated
    }
}

impl PlanarGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_segments<'a>(segs: impl IntoIterator<Item = &'a Segment>) -> Self {
        let mut g = PlanarGraph::new();
        for s in segs {
            g.add_segment(s);
        }
        g.normalize();
        g
    }

    pub fn add_segment(&mut self, s: &Segment) {
        if s.is_degenerate() {
            self.isolated.insert(s.p.clone());
            return;
        }
        let key = LineKey::through(s.direction, &s.p);
        let span = Span::finite(s.direction.param_of(&s.p), s.direction.param_of(&s.q));
        self.add_span(key, span);
    }

    /// Adds a span; call [`normalize`](Self::normalize) once after a batch.
    pub fn add_span(&mut self, key: LineKey, span: Span) {
        if span.is_point() {
            if let Ext::Fin(t) = &span.lo {
                self.isolated.insert(key.point_at(t));
            }
            return;
        }
        self.lines.entry(key).or_default().push(span);
    }

    pub fn add_point(&mut self, p: Point) {
        self.isolated.insert(p);
    }

    pub fn set_label(&mut self, p: Point, name: &str) {
        self.labels.insert(p, name.to_string());
    }

    pub fn label(&self, p: &Point) -> Option<&str> {
        self.labels.get(p).map(|s| s.as_str())
    }

    pub fn labels(&self) -> &BTreeMap<Point, String> {
        &self.labels
    }

    /// Merges overlapping or touching spans and drops isolated points that
    /// lie on a span.
    pub fn normalize(&mut self) {
        for spans in self.lines.values_mut() {
            spans.sort_by(|a, b| a.lo.cmp(&b.lo).then(a.hi.cmp(&b.hi)));
            let mut merged: Vec<Span> = Vec::with_capacity(spans.len());
            for s in spans.drain(..) {
                match merged.last_mut() {
                    Some(last) if s.lo <= last.hi => {
                        if s.hi > last.hi {
                            last.hi = s.hi;
                        }
                    }
                    _ => merged.push(s),
                }
            }
            *spans = merged;
        }
        self.lines.retain(|_, v| !v.is_empty());
        let pts: Vec<Point> = self.isolated.iter().cloned().collect();
        for p in pts {
            if self.on_spans(&p) {
                self.isolated.remove(&p);
            }
        }
    }

    pub fn lines(&self) -> impl Iterator<Item = (&LineKey, &Vec<Span>)> {
        self.lines.iter()
    }

    pub fn isolated(&self) -> &BTreeSet<Point> {
        &self.isolated
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty() && self.isolated.is_empty()
    }

    pub fn span_count(&self) -> usize {
        self.lines.values().map(|v| v.len()).sum()
    }

    pub fn is_bounded(&self) -> bool {
        self.lines.values().flatten().all(|s| s.is_bounded())
    }

    fn on_spans(&self, p: &Point) -> bool {
        Direction::ALL.iter().any(|&d| {
            let key = LineKey::through(d, p);
            let t = d.param_of(p);
            self.lines.get(&key).is_some_and(|v| v.iter().any(|s| s.contains(&t)))
        })
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        self.isolated.contains(p) || self.on_spans(p)
    }

    pub fn contains_span(&self, key: &LineKey, span: &Span) -> bool {
        if span.is_point() {
            return match &span.lo {
                Ext::Fin(t) => self.contains_point(&key.point_at(t)),
                _ => false,
            };
        }
        self.lines.get(key).is_some_and(|v| v.iter().any(|s| s.contains_span(span)))
    }

    pub fn contains_segment(&self, s: &Segment) -> bool {
        if s.is_degenerate() {
            return self.contains_point(&s.p);
        }
        let key = LineKey::through(s.direction, &s.p);
        let span = Span::finite(s.direction.param_of(&s.p), s.direction.param_of(&s.q));
        self.contains_span(&key, &span)
    }

    pub fn is_subset_of(&self, other: &PlanarGraph) -> bool {
        self.isolated.iter().all(|p| other.contains_point(p))
            && self.lines.iter().all(|(k, v)| v.iter().all(|s| other.contains_span(k, s)))
    }

    pub fn union(&self, other: &PlanarGraph) -> PlanarGraph {
        let mut g = self.clone();
        for (k, v) in &other.lines {
            for s in v {
                g.add_span(k.clone(), s.clone());
            }
        }
        for p in &other.isolated {
            g.add_point(p.clone());
        }
        for (p, n) in &other.labels {
            g.labels.entry(p.clone()).or_insert_with(|| n.clone());
        }
        g.normalize();
        g
    }

    /// All stored spans split at the coordinate axes.
    pub fn axis_split_spans(&self) -> Vec<(LineKey, Span)> {
        let mut out = Vec::new();
        for (k, v) in &self.lines {
            let cuts = axis_params(k.dir, &k.offset);
            for s in v {
                let mut pts: Vec<Ext> = vec![s.lo.clone()];
                for c in &cuts {
                    let e = Ext::Fin(c.clone());
                    if e > s.lo && e < s.hi {
                        pts.push(e);
                    }
                }
                pts.push(s.hi.clone());
                pts.sort();
                pts.dedup();
                for w in pts.windows(2) {
                    out.push((k.clone(), Span::new(w[0].clone(), w[1].clone())));
                }
            }
        }
        out
    }

    /// Finite segments after splitting at the axes.
    pub fn split_segments(&self) -> Vec<Segment> {
        self.axis_split_spans()
            .into_iter()
            .filter_map(|(k, s)| span_segment(&k, &s))
            .collect()
    }

    /// Maximal stored segments (bounded spans only).
    pub fn segments(&self) -> Vec<Segment> {
        self.lines
            .iter()
            .flat_map(|(k, v)| v.iter().filter_map(move |s| span_segment(k, s)))
            .collect()
    }

    /// Exact image under F, computed piece by piece on the axis-split spans.
    pub fn image(&self, params: &MapParams) -> PlanarGraph {
        let mut g = PlanarGraph::new();
        for (k, s) in self.axis_split_spans() {
            match span_image(params, &k, &s) {
                SpanImage::Point(p) => g.add_point(p),
                SpanImage::Span(k2, s2) => g.add_span(k2, s2),
            }
        }
        for p in &self.isolated {
            g.add_point(apply(params, p));
        }
        g.normalize();
        g
    }

    /// Segment endpoints, crossings between different lines, and isolated
    /// points.
    pub fn vertices(&self) -> BTreeSet<Point> {
        let mut out: BTreeSet<Point> = self.isolated.clone();
        for (k, v) in &self.lines {
            for s in v {
                for e in [&s.lo, &s.hi] {
                    if let Ext::Fin(t) = e {
                        out.insert(k.point_at(t));
                    }
                }
            }
        }
        let keys: Vec<&LineKey> = self.lines.keys().collect();
        for i in 0..keys.len() {
            for j in i + 1..keys.len() {
                if let Some(p) = keys[i].intersect(keys[j]) {
                    if self.span_on(keys[i], &p) && self.span_on(keys[j], &p) {
                        out.insert(p);
                    }
                }
            }
        }
        out
    }

    fn span_on(&self, key: &LineKey, p: &Point) -> bool {
        let t = key.dir.param_of(p);
        self.lines.get(key).is_some_and(|v| v.iter().any(|s| s.contains(&t)))
    }

    /// Points where a span crosses a coordinate axis in its interior.
    pub fn axis_points(&self) -> BTreeSet<Point> {
        let mut out = BTreeSet::new();
        for (k, v) in &self.lines {
            for c in axis_params(k.dir, &k.offset) {
                if v.iter().any(|s| s.contains(&c)) {
                    out.insert(k.point_at(&c));
                }
            }
        }
        out
    }

    /// Elementary edges: consecutive points of `cuts` along each span.
    /// Every span endpoint is treated as a cut.
    pub fn edges_with_cuts(&self, cuts: &BTreeSet<Point>) -> Vec<Segment> {
        let mut out = Vec::new();
        for (k, v) in &self.lines {
            let mut ts: Vec<Rational> = cuts
                .iter()
                .filter(|p| k.dir.offset_of(p) == k.offset)
                .map(|p| k.dir.param_of(p))
                .collect();
            ts.sort();
            ts.dedup();
            for s in v {
                let (Ext::Fin(lo), Ext::Fin(hi)) = (&s.lo, &s.hi) else { continue };
                let mut pts = vec![lo.clone()];
                pts.extend(ts.iter().filter(|t| *t > lo && *t < hi).cloned());
                pts.push(hi.clone());
                for w in pts.windows(2) {
                    out.push(Segment::new(k.point_at(&w[0]), k.point_at(&w[1])).unwrap());
                }
            }
        }
        out
    }

    /// Edges between consecutive vertices.
    pub fn edges(&self) -> Vec<Segment> {
        let cuts = self.vertices();
        self.edges_with_cuts(&cuts)
    }

    /// Plateaus: maximal v3 pieces inside Q1 and v4 pieces inside Q3.
    pub fn plateaus(&self) -> Vec<Segment> {
        self.axis_split_spans()
            .into_iter()
            .filter_map(|(k, s)| {
                let seg = span_segment(&k, &s)?;
                let mid = seg.midpoint();
                let (piece, _) = primary_piece(&mid);
                let is_plateau = (k.dir == Direction::V3 && piece == Piece::F1)
                    || (k.dir == Direction::V4 && piece == Piece::F3);
                is_plateau.then_some(seg)
            })
            .collect()
    }

    pub fn scaled(&self, k: &Rational) -> PlanarGraph {
        let mut g = PlanarGraph::new();
        for s in self.segments() {
            g.add_segment(&Segment::new(s.p.scale(k), s.q.scale(k)).unwrap());
        }
        for p in &self.isolated {
            g.add_point(p.scale(k));
        }
        for (p, n) in &self.labels {
            g.labels.insert(p.scale(k), n.clone());
        }
        g.normalize();
        g
    }

    /// Degree of each vertex in the elementary edge graph.
    pub fn degrees(&self) -> BTreeMap<Point, usize> {
        let mut deg: BTreeMap<Point, usize> = BTreeMap::new();
        for v in self.vertices() {
            if !self.isolated.contains(&v) {
                deg.insert(v, 0);
            }
        }
        for e in self.edges() {
            *deg.entry(e.p.clone()).or_default() += 1;
            *deg.entry(e.q.clone()).or_default() += 1;
        }
        deg
    }

    /// Bounding box `(xmin, ymin, xmax, ymax)` of a bounded graph.
    pub fn bounding_box(&self) -> Option<(Rational, Rational, Rational, Rational)> {
        let pts = self.vertices();
        let mut it = pts.iter();
        let first = it.next()?;
        let (mut x0, mut y0, mut x1, mut y1) =
            (first.x.clone(), first.y.clone(), first.x.clone(), first.y.clone());
        for p in it {
            if p.x < x0 { x0 = p.x.clone(); }
            if p.x > x1 { x1 = p.x.clone(); }
            if p.y < y0 { y0 = p.y.clone(); }
            if p.y > y1 { y1 = p.y.clone(); }
        }
        Some((x0, y0, x1, y1))
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Seg {
            p: [String; 2],
            q: [String; 2],
            direction: &'static str,
        }
        let segs: Vec<Seg> = self
            .segments()
            .iter()
            .map(|s| Seg {
                p: [format_rational(&s.p.x), format_rational(&s.p.y)],
                q: [format_rational(&s.q.x), format_rational(&s.q.y)],
                direction: s.direction.name(),
            })
            .collect();
        let iso: Vec<[String; 2]> = self
            .isolated
            .iter()
            .map(|p| [format_rational(&p.x), format_rational(&p.y)])
            .collect();
        let labels: BTreeMap<String, [String; 2]> = self
            .labels
            .iter()
            .map(|(p, n)| (n.clone(), [format_rational(&p.x), format_rational(&p.y)]))
            .collect();
        serde_json::json!({ "segments": segs, "isolated": iso, "vertices": labels })
    }
}

pub fn span_segment(k: &LineKey, s: &Span) -> Option<Segment> {
    match (&s.lo, &s.hi) {
        (Ext::Fin(a), Ext::Fin(b)) => Some(Segment::new(k.point_at(a), k.point_at(b)).unwrap()),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpanImage {
    Point(Point),
    Span(LineKey, Span),
}

/// Image of a span lying in one closed quadrant.
pub fn span_image(params: &MapParams, k: &LineKey, s: &Span) -> SpanImage {
    let t = s.interior_param();
    let (piece, _) = primary_piece(&k.point_at(&t));
    let base = piece.apply(params, &k.point_at(&Rational::zero()));
    let (scale, dir) = direction_image(piece, k.dir);
    if scale == 0 {
        return SpanImage::Point(base);
    }
    let key = LineKey::through(dir, &base);
    let shift = dir.param_of(&base);
    SpanImage::Span(key, Span::new(s.lo.affine(scale, &shift), s.hi.affine(scale, &shift)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(a: (i64, i64), b: (i64, i64)) -> Segment {
        Segment::new(Point::from_ints(a.0, a.1), Point::from_ints(b.0, b.1)).unwrap()
    }

    #[test]
    fn merging_and_containment() {
        let g = PlanarGraph::from_segments(&[seg((0, 0), (2, 0)), seg((1, 0), (3, 0)), seg((1, -1), (1, 1))]);
        assert_eq!(g.span_count(), 2);
        assert!(g.contains_segment(&seg((0, 0), (3, 0))));
        assert!(!g.contains_segment(&seg((0, 0), (4, 0))));
        assert!(g.contains_point(&Point::from_ints(1, 1)));
        let v = g.vertices();
        assert!(v.contains(&Point::from_ints(1, 0)));
        assert_eq!(v.len(), 5);
        assert_eq!(g.edges().len(), 4);
    }

    #[test]
    fn line_intersections() {
        let a = LineKey::through(Direction::V3, &Point::from_ints(0, 1));
        let b = LineKey::through(Direction::V4, &Point::from_ints(0, 3));
        assert_eq!(a.intersect(&b), Some(Point::from_ints(1, 2)));
        let c = LineKey::through(Direction::V1, &Point::from_ints(0, 5));
        assert_eq!(a.intersect(&c), Some(Point::from_ints(4, 5)));
    }

    #[test]
    fn image_of_quadrant_boundary_is_a_line() {
        // The two boundary rays of Q1 map onto the whole line y - x = b - a.
        let params = MapParams::new(int(-1), int(2));
        let mut g = PlanarGraph::new();
        g.add_span(LineKey::through(Direction::V1, &Point::from_ints(0, 0)), Span::new(Ext::Fin(int(0)), Ext::PosInf));
        g.add_span(LineKey::through(Direction::V2, &Point::from_ints(0, 0)), Span::new(Ext::Fin(int(0)), Ext::PosInf));
        g.normalize();
        let img = g.image(&params);
        let key = LineKey { dir: Direction::V3, offset: int(3) };
        assert!(img.contains_span(&key, &Span::new(Ext::NegInf, Ext::PosInf)));
        assert_eq!(img.span_count(), 1);
    }
}
