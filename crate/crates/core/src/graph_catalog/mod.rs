//! The atlas of invariant graphs for a = -1, one JSON document per
//! parameter window, together with invariance, arrival-time and plateau
//! checks.

pub mod planar;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact_geometry::{int, parse_rational, rat, Direction, Ext, ParamPoint, Point, Rational, Segment};
use crate::map_engine::{apply, classify_orbit, normalize_params, MapParams, OrbitReport, Piece};
pub use planar::{LineKey, PlanarGraph, Span, SpanImage};

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("atlas document {id}: {msg}")]
    Atlas { id: String, msg: String },
    #[error("b = {b} is outside the validity window of case {id}")]
    OutsideValidity { id: String, b: String },
    #[error("the atlas covers a < 0 only (got a = {0})")]
    UnsupportedSign(String),
    #[error("arrival budget of {0} iterates exceeded")]
    ArrivalBudget(usize),
    #[error(transparent)]
    Geometry(#[from] crate::exact_geometry::GeometryError),
}

macro_rules! atlas_files {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../../atlas/", $name, ".json")))),*]
    };
}

const ATLAS_SOURCES: &[(&str, &str)] = atlas_files!(
    "ff_1", "ff_2", "f_3", "f_4", "f_5", "f_6", "f_7", "f_8", "f_9", "f_10", "f_11", "f_12",
    "f_13", "f_14", "f_17", "f_18", "f_19", "f_20", "f_A", "f_B", "f_C", "f_D", "f_E", "f_F",
    "f_G", "f_H", "f_I", "f_J", "f_K", "f_L", "f_M", "f_21a", "f_21b", "f_21c", "f_21d",
    "ff_22", "f_23",
);

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawValidity {
    lo: Option<String>,
    lo_open: bool,
    hi: Option<String>,
    hi_open: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawCase {
    id: String,
    validity: RawValidity,
    vertices: BTreeMap<String, ParamPoint>,
    edges: Vec<[String; 2]>,
    isolated: Vec<ParamPoint>,
}

/// Parameter window; `None` ends are infinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Validity {
    pub lo: Option<Rational>,
    pub lo_open: bool,
    pub hi: Option<Rational>,
    pub hi_open: bool,
}

impl Validity {
    pub fn contains(&self, b: &Rational) -> bool {
        let lo_ok = match &self.lo {
            None => true,
            Some(l) if self.lo_open => b > l,
            Some(l) => b >= l,
        };
        let hi_ok = match &self.hi {
            None => true,
            Some(h) if self.hi_open => b < h,
            Some(h) => b <= h,
        };
        lo_ok && hi_ok
    }

    /// `k` rationals strictly inside the window, evenly spaced for bounded
    /// windows and at unit steps for unbounded ones.
    pub fn interior_samples(&self, k: usize) -> Vec<Rational> {
        match (&self.lo, &self.hi) {
            (Some(l), Some(h)) => (1..=k)
                .map(|i| l + (h - l) * rat(i as i64, k as i64 + 1))
                .collect(),
            (None, Some(h)) => (1..=k).map(|i| h - int(i as i64) - rat(1, 3)).collect(),
            (Some(l), None) => (1..=k).map(|i| l + int(i as i64) + rat(1, 3)).collect(),
            (None, None) => (0..k).map(|i| int(i as i64)).collect(),
        }
    }

    pub fn describe(&self) -> String {
        let lo = match &self.lo {
            None => "(-inf".to_string(),
            Some(l) => format!("{}{}", if self.lo_open { "(" } else { "[" }, l),
        };
        let hi = match &self.hi {
            None => "+inf)".to_string(),
            Some(h) => format!("{}{}", h, if self.hi_open { ")" } else { "]" }),
        };
        format!("{}, {}", lo, hi)
    }
}

#[derive(Debug, Clone)]
pub struct AtlasCase {
    pub id: String,
    pub validity: Validity,
    /// Named vertices, sorted by name.
    pub vertices: Vec<(String, ParamPoint)>,
    pub edges: Vec<(String, String)>,
    pub isolated: Vec<ParamPoint>,
}

impl AtlasCase {
    pub fn vertex(&self, name: &str) -> Option<&ParamPoint> {
        self.vertices.iter().find(|(n, _)| n == name).map(|(_, p)| p)
    }

    pub fn file_stem(&self) -> String {
        self.id.replace(':', "_")
    }
}

fn parse_case(src: &str) -> Result<AtlasCase, CatalogError> {
    let raw: RawCase = serde_json::from_str(src).map_err(|e| CatalogError::Atlas {
        id: "?".into(),
        msg: e.to_string(),
    })?;
    let bound = |s: &Option<String>| -> Result<Option<Rational>, CatalogError> {
        s.as_deref().map(parse_rational).transpose().map_err(CatalogError::from)
    };
    let validity = Validity {
        lo: bound(&raw.validity.lo)?,
        lo_open: raw.validity.lo_open,
        hi: bound(&raw.validity.hi)?,
        hi_open: raw.validity.hi_open,
    };
    for [a, b] in &raw.edges {
        for n in [a, b] {
            if !raw.vertices.contains_key(n) {
                return Err(CatalogError::Atlas { id: raw.id.clone(), msg: format!("unknown vertex {n}") });
            }
        }
    }
    Ok(AtlasCase {
        id: raw.id,
        validity,
        vertices: raw.vertices.into_iter().collect(),
        edges: raw.edges.into_iter().map(|[a, b]| (a, b)).collect(),
        isolated: raw.isolated,
    })
}

/// All 37 cases, ordered by their validity windows.
pub fn atlas() -> &'static [AtlasCase] {
    static ATLAS: OnceLock<Vec<AtlasCase>> = OnceLock::new();
    ATLAS.get_or_init(|| {
        let mut cases: Vec<AtlasCase> = ATLAS_SOURCES
            .iter()
            .map(|(name, src)| parse_case(src).unwrap_or_else(|e| panic!("atlas file {name}: {e}")))
            .collect();
        cases.sort_by(|a, b| match (&a.validity.lo, &b.validity.lo) {
            (None, _) => std::cmp::Ordering::Less,
            (_, None) => std::cmp::Ordering::Greater,
            (Some(x), Some(y)) => x.cmp(y),
        });
        cases
    })
}

pub fn case_by_id(id: &str) -> Option<&'static AtlasCase> {
    atlas().iter().find(|c| c.id == id)
}

/// The unique case whose window contains `b` (for a = -1).
pub fn atlas_lookup(b: &Rational) -> &'static AtlasCase {
    atlas()
        .iter()
        .find(|c| c.validity.contains(b))
        .expect("atlas windows tile the real line")
}

/// Evaluates every vertex at `b` and assembles the graph. Coincident
/// vertices merge and zero-length edges become points.
pub fn instantiate(case: &AtlasCase, b: &Rational) -> Result<PlanarGraph, CatalogError> {
    if !case.validity.contains(b) {
        return Err(CatalogError::OutsideValidity { id: case.id.clone(), b: b.to_string() });
    }
    let pts: BTreeMap<&str, Point> = case.vertices.iter().map(|(n, p)| (n.as_str(), p.eval(b))).collect();
    let mut g = PlanarGraph::new();
    let mut used: std::collections::BTreeSet<&str> = Default::default();
    for (a, c) in &case.edges {
        let s = Segment::new(pts[a.as_str()].clone(), pts[c.as_str()].clone()).map_err(|e| CatalogError::Atlas {
            id: case.id.clone(),
            msg: format!("edge {a}-{c}: {e}"),
        })?;
        g.add_segment(&s);
        used.insert(a);
        used.insert(c);
    }
    for (n, p) in &pts {
        if !used.contains(n) {
            g.add_point(p.clone());
        }
    }
    for (i, ip) in case.isolated.iter().enumerate() {
        let p = ip.eval(b);
        g.add_point(p.clone());
        g.set_label(p, &format!("E_{}", i + 1));
    }
    for (n, p) in &pts {
        if g.label(p).is_none() {
            g.set_label(p.clone(), n);
        }
    }
    g.normalize();
    Ok(g)
}

/// Invariant graph for any a < 0, obtained from the a = -1 atlas by the
/// scaling conjugacy.
pub fn instantiate_scaled(params: &MapParams) -> Result<(&'static AtlasCase, PlanarGraph), CatalogError> {
    if !params.a.is_negative() {
        return Err(CatalogError::UnsupportedSign(params.a.to_string()));
    }
    let (norm, lambda) = normalize_params(params);
    let case = atlas_lookup(&norm.b);
    let g = instantiate(case, &norm.b)?;
    if lambda.is_one() {
        return Ok((case, g));
    }
    Ok((case, g.scaled(&(Rational::one() / lambda))))
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    pub checked: usize,
    pub violations: Vec<String>,
}

impl InvarianceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that the image of every axis-split edge and every isolated point
/// lies in the graph.
pub fn verify_invariance(params: &MapParams, g: &PlanarGraph) -> InvarianceReport {
    let mut violations = Vec::new();
    let mut checked = 0;
    for (k, s) in g.axis_split_spans() {
        checked += 1;
        let ok = match planar::span_image(params, &k, &s) {
            SpanImage::Point(p) => g.contains_point(&p),
            SpanImage::Span(k2, s2) => g.contains_span(&k2, &s2),
        };
        if !ok {
            let desc = planar::span_segment(&k, &s).map_or_else(|| format!("{:?}", s), |seg| seg.to_string());
            violations.push(format!("edge {desc} leaves the graph"));
        }
    }
    for p in g.isolated() {
        checked += 1;
        let q = apply(params, p);
        if !g.contains_point(&q) {
            violations.push(format!("point {p} maps to {q} outside the graph"));
        }
    }
    InvarianceReport { checked, violations }
}

/// Points of Q2 ∪ Q4 whose orbits never reach Q1 ∪ Q3 (a = -1).
pub fn exceptional_points(params: &MapParams) -> Vec<Point> {
    let b = &params.b;
    let five = int(5);
    let mut out = Vec::new();
    if b > &rat(1, 2) {
        out.push(Point::new(-(int(2) + b) / &five, (int(2) * b - int(1)) / &five));
    }
    if b.is_negative() {
        out.push(Point::new(-b.clone(), int(-1)));
    }
    if b > &rat(3, 4) && b < &int(2) {
        out.push(Point::new((int(2) - b) / &five, -(int(2) * b + int(1)) / &five));
        out.push(Point::new((b - int(2)) / &five, (int(2) * b + int(1)) / &five));
        out.push(Point::new((int(-3) * b - int(4)) / &five, (int(4) * b - int(3)) / &five));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    Q1,
    Q3,
}

impl Region {
    fn sign(self) -> i64 {
        match self {
            Region::Q1 => 1,
            Region::Q3 => -1,
        }
    }
}

/// Upper bounds on arrival times `(N1, N3)` per parameter range, as
/// tabulated for a = -1.
pub fn arrival_table(b: &Rational) -> (usize, usize) {
    if b <= &int(-2) {
        (8, 5)
    } else if b <= &rat(-1, 4) {
        (6, 5)
    } else if b < &int(0) {
        (5, 4)
    } else if b <= &rat(3, 16) {
        (6, 4)
    } else if b < &rat(4, 15) {
        (11, 9)
    } else if b <= &rat(2, 3) {
        (6, 4)
    } else if b <= &rat(7, 4) {
        (5, 4)
    } else {
        (5, 5)
    }
}

#[derive(Debug, Clone)]
pub struct ArrivalConfig {
    /// Grid points per side of the bounded window.
    pub grid: usize,
    /// Far sample points per region.
    pub far_points: usize,
    pub far_radius: i64,
    pub budget: usize,
}

impl Default for ArrivalConfig {
    fn default() -> Self {
        ArrivalConfig { grid: 9, far_points: 8, far_radius: 1000, budget: 64 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ArrivalReport {
    /// Arrival of the images of the region's two boundary rays. Since F on
    /// Q1 depends only on x - y and on Q3 only on x + y, these images equal
    /// the images of the whole region, so this value is exact.
    pub from_rays: usize,
    /// Largest arrival time over the finite witness grid and far points.
    pub from_grid: usize,
    pub n: usize,
}

fn point_arrival(params: &MapParams, g: &PlanarGraph, p: &Point, budget: usize) -> Option<usize> {
    let mut q = p.clone();
    for n in 0..=budget {
        if g.contains_point(&q) {
            return Some(n);
        }
        q = apply(params, &q);
    }
    None
}

/// Sample points of a closed quadrant: a square grid over a window that
/// covers the graph, plus points on a circle of radius `far_radius`.
pub fn region_samples(region: Region, g: &PlanarGraph, cfg: &ArrivalConfig) -> Vec<Point> {
    let s = int(region.sign());
    let w = match g.bounding_box() {
        Some((x0, y0, x1, y1)) => {
            let m = [x0, y0, x1, y1].iter().map(|v| v.abs()).max().unwrap();
            m.ceil() + int(2)
        }
        None => int(2),
    };
    let mut pts = Vec::new();
    let steps = cfg.grid.max(2) as i64 - 1;
    for i in 0..=steps {
        for j in 0..=steps {
            let x = &w * rat(i, steps) * &s;
            let y = &w * rat(j, steps) * &s;
            pts.push(Point::new(x, y));
        }
    }
    // Rational points on the circle: ((1-t^2)/(1+t^2), 2t/(1+t^2)).
    let r = int(cfg.far_radius);
    for k in 0..=cfg.far_points as i64 {
        let t = rat(k, cfg.far_points as i64);
        let den = int(1) + &t * &t;
        let x = &r * (int(1) - &t * &t) / &den;
        let y = &r * int(2) * &t / &den;
        pts.push(Point::new(x * &s, y * &s));
    }
    pts
}

/// Boundary rays of the closed quadrant as a (unbounded) planar set.
pub fn region_rays(region: Region) -> PlanarGraph {
    let origin = Point::from_ints(0, 0);
    let span = match region {
        Region::Q1 => Span::new(Ext::Fin(Rational::zero()), Ext::PosInf),
        Region::Q3 => Span::new(Ext::NegInf, Ext::Fin(Rational::zero())),
    };
    let mut g = PlanarGraph::new();
    g.add_span(LineKey::through(Direction::V1, &origin), span.clone());
    g.add_span(LineKey::through(Direction::V2, &origin), span);
    g.normalize();
    g
}

/// Smallest N with F^N(region samples) inside `g`. The sample set contains
/// the boundary rays, whose images cover the images of the full region.
pub fn arrival_time(
    params: &MapParams,
    region: Region,
    g: &PlanarGraph,
    cfg: &ArrivalConfig,
) -> Result<ArrivalReport, CatalogError> {
    let mut set = region_rays(region);
    let mut from_rays = None;
    for n in 0..=cfg.budget {
        if set.is_subset_of(g) {
            from_rays = Some(n);
            break;
        }
        set = set.image(params);
    }
    let from_rays = from_rays.ok_or(CatalogError::ArrivalBudget(cfg.budget))?;
    let mut from_grid = 0;
    for p in region_samples(region, g, cfg) {
        let n = point_arrival(params, g, &p, cfg.budget).ok_or(CatalogError::ArrivalBudget(cfg.budget))?;
        from_grid = from_grid.max(n);
    }
    Ok(ArrivalReport { from_rays, from_grid, n: from_rays.max(from_grid) })
}

/// Forward images F^i(region) for i = 1..=n, for diagnostics.
pub fn forward_images(params: &MapParams, region: Region, n: usize) -> Vec<PlanarGraph> {
    let mut set = region_rays(region);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        set = set.image(params);
        out.push(set.clone());
    }
    out
}

/// The ω-limit cycles of the plateaus: each plateau collapses to a point
/// whose orbit is followed to its cycle. Distinct cycles are returned once.
pub fn plateau_omega_limits(params: &MapParams, g: &PlanarGraph, max_iters: usize) -> Vec<OrbitReport> {
    let mut seen: Vec<Vec<Point>> = Vec::new();
    let mut out = Vec::new();
    for pl in g.plateaus() {
        let img = apply(params, &pl.p);
        let rep = classify_orbit(params, &img, max_iters);
        let key = rep.canonical_cycle();
        if rep.is_decided() && !seen.contains(&key) {
            seen.push(key);
            out.push(rep);
        }
    }
    out
}

/// Which piece of F acts on a plateau (F1 for v3 plateaus, F3 for v4).
pub fn plateau_piece(s: &Segment) -> Option<Piece> {
    match s.direction {
        Direction::V3 => Some(Piece::F1),
        Direction::V4 => Some(Piece::F3),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mb(b: Rational) -> MapParams {
        MapParams::minus_one(b)
    }

    #[test]
    fn atlas_loads_and_tiles() {
        let cases = atlas();
        assert_eq!(cases.len(), 37);
        for w in cases.windows(2) {
            let (a, b) = (&w[0].validity, &w[1].validity);
            assert_eq!(a.hi, b.lo, "{} then {}", w[0].id, w[1].id);
            assert_ne!(a.hi_open, b.lo_open, "{} / {}", w[0].id, w[1].id);
        }
        assert!(cases[0].validity.lo.is_none());
        assert!(cases[36].validity.hi.is_none());
    }

    #[test]
    fn lookup_examples() {
        assert_eq!(atlas_lookup(&int(-3)).id, "ff:1");
        assert_eq!(atlas_lookup(&int(-2)).id, "ff:1");
        assert_eq!(atlas_lookup(&rat(1, 5)).id, "f:14");
        assert_eq!(atlas_lookup(&rat(7, 10)).id, "f:A");
        assert_eq!(atlas_lookup(&rat(5, 7)).id, "f:A");
        assert_eq!(atlas_lookup(&rat(4, 15)).id, "f:17");
    }

    #[test]
    fn instantiate_first_case() {
        let c = case_by_id("ff:1").unwrap();
        let g = instantiate(c, &int(-3)).unwrap();
        let named: BTreeMap<String, Point> = g.labels().iter().map(|(p, n)| (n.clone(), p.clone())).collect();
        assert_eq!(named["P_1"], Point::from_ints(1, -1));
        assert_eq!(named["P_5"], Point::from_ints(11, -1));
        assert_eq!(named["R_2"], Point::from_ints(10, 8));
        assert_eq!(named["S"], Point::from_ints(2, 0));
        let g2 = instantiate(c, &int(-2)).unwrap();
        assert!(g2.contains_point(&Point::from_ints(0, -1)));
        assert!(verify_invariance(&mb(int(-3)), &g).passed());
    }

    #[test]
    fn single_point_case() {
        let g = instantiate(atlas_lookup(&rat(1, 5)), &rat(1, 5)).unwrap();
        assert_eq!(g.span_count(), 0);
        assert_eq!(g.isolated().iter().cloned().collect::<Vec<_>>(), vec![Point::new(rat(-1, 5), rat(-3, 5))]);
        assert!(verify_invariance(&mb(rat(1, 5)), &g).passed());
    }

    #[test]
    fn exceptional_examples() {
        let e = exceptional_points(&mb(int(1)));
        assert_eq!(e.len(), 4);
        assert!(e.contains(&Point::new(rat(-3, 5), rat(1, 5))));
        assert!(e.contains(&Point::new(rat(1, 5), rat(-3, 5))));
        assert!(e.contains(&Point::new(rat(-1, 5), rat(3, 5))));
        assert!(e.contains(&Point::new(rat(-7, 5), rat(1, 5))));
        assert_eq!(exceptional_points(&mb(int(-3))), vec![Point::from_ints(3, -1)]);
        assert!(exceptional_points(&mb(rat(1, 4))).is_empty());
    }

    #[test]
    fn arrival_examples() {
        let cfg = ArrivalConfig::default();
        for (b, region, bound) in [(int(-3), Region::Q1, 8), (int(2), Region::Q3, 5)] {
            let params = mb(b.clone());
            let g = instantiate(atlas_lookup(&b), &b).unwrap();
            let r = arrival_time(&params, region, &g, &cfg).unwrap();
            assert!(r.n <= bound, "b={b} {:?}: {:?}", region, r);
            assert!(r.from_grid <= r.from_rays);
        }
        // The single-point window needs one iterate more than the tabulated 9
        // for Q3.
        let b = rat(1, 5);
        let g = instantiate(atlas_lookup(&b), &b).unwrap();
        let r = arrival_time(&mb(b), Region::Q3, &g, &cfg).unwrap();
        assert_eq!(r.n, 10);
    }

    #[test]
    fn omega_limit_examples() {
        let check = |b: Rational, periods: &[usize]| {
            let params = mb(b.clone());
            let g = instantiate(atlas_lookup(&b), &b).unwrap();
            let mut got: Vec<usize> = plateau_omega_limits(&params, &g, 10_000)
                .iter()
                .map(|r| r.period_len().unwrap())
                .collect();
            got.sort();
            assert_eq!(got, periods, "b={b}");
        };
        check(int(-3), &[7]);
        check(int(1), &[4, 4]);
        check(int(9), &[3]);
    }

    #[test]
    fn scaled_instantiation_is_invariant() {
        let params = MapParams::new(int(-2), int(6));
        let (case, g) = instantiate_scaled(&params).unwrap();
        assert_eq!(case.id, "f:23");
        assert!(verify_invariance(&params, &g).passed());
    }

    #[test]
    fn plateau_count_in_first_window_above_two_thirds() {
        let b = rat(7, 10);
        let g = instantiate(atlas_lookup(&b), &b).unwrap();
        assert_eq!(g.plateaus().len(), 5);
    }
}
