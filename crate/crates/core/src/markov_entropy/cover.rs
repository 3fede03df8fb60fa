//! Interval partitions of an invariant graph and their covering relations.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::Zero;
use serde::Serialize;

use super::MarkovError;
use crate::exact_geometry::{Ext, Point, Rational};
use crate::graph_catalog::planar::{span_image, LineKey, PlanarGraph, Span, SpanImage};
use crate::map_engine::{apply, primary_piece, MapParams, Piece};

/// Default cap on the size of a forward-orbit closure.
pub const DEFAULT_CLOSURE_BUDGET: usize = 50_000;
/// Passes of the collapse elimination.
pub const COLLAPSE_PASSES: usize = 64;

/// A closed arc `[lo, hi]` (in line parameter) of one span of the graph,
/// contained in a single closed quadrant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub key: LineKey,
    pub lo: Rational,
    pub hi: Rational,
    pub piece: Piece,
    pub name: String,
}

impl Interval {
    pub fn start(&self) -> Point {
        self.key.point_at(&self.lo)
    }

    pub fn end(&self) -> Point {
        self.key.point_at(&self.hi)
    }

    pub fn span(&self) -> Span {
        Span::finite(self.lo.clone(), self.hi.clone())
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }
}

#[derive(Debug, Clone)]
pub struct IntervalPartition {
    /// Intervals that survive collapse elimination, indexing the matrices.
    pub intervals: Vec<Interval>,
    /// Intervals some iterate of which is a single point.
    pub collapse_set: Vec<Interval>,
    /// All cut points used.
    pub points: BTreeSet<Point>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CoverMode {
    /// `m_ij = 1` iff `I_j ⊆ F(I_i)`, and the partition is Markov.
    Markov,
    /// `m_ij = 1` iff `F(I_i)` meets the interior of `I_j`.
    UpperBound,
    /// `m_ij = 1` iff `I_j ⊆ F(I_i)` on a partition that is not Markov.
    Forced,
}

/// A square transition matrix with vertex names. Entries are 0/1 for
/// covering relations and may exceed 1 for multigraphs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverMatrix {
    pub names: Vec<String>,
    pub rows: Vec<Vec<u32>>,
    pub mode: CoverMode,
}

impl CoverMatrix {
    pub fn new(names: Vec<String>, rows: Vec<Vec<u32>>, mode: CoverMode) -> Self {
        CoverMatrix { names, rows, mode }
    }

    /// Builds a matrix from an edge list over `n` vertices named by index.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut rows = vec![vec![0u32; n]; n];
        for &(i, j) in edges {
            rows[i][j] = 1;
        }
        let names = (0..n).map(|i| i.to_string()).collect();
        CoverMatrix { names, rows, mode: CoverMode::Markov }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.rows[i].iter().enumerate().filter(|(_, &v)| v != 0).map(|(j, _)| j)
    }

    /// Sub-matrix on the given vertices, in the given order.
    pub fn restrict(&self, keep: &[usize]) -> CoverMatrix {
        CoverMatrix {
            names: keep.iter().map(|&i| self.names[i].clone()).collect(),
            rows: keep.iter().map(|&i| keep.iter().map(|&j| self.rows[i][j]).collect()).collect(),
            mode: self.mode,
        }
    }

    pub fn power(&self, n: usize) -> Vec<Vec<u64>> {
        let k = self.len();
        let mut acc: Vec<Vec<u64>> = (0..k).map(|i| (0..k).map(|j| u64::from(i == j)).collect()).collect();
        for _ in 0..n {
            let mut next = vec![vec![0u64; k]; k];
            for i in 0..k {
                for l in 0..k {
                    if acc[i][l] == 0 {
                        continue;
                    }
                    for j in 0..k {
                        if self.rows[l][j] != 0 {
                            next[i][j] += acc[i][l] * u64::from(self.rows[l][j]);
                        }
                    }
                }
            }
            acc = next;
        }
        acc
    }

    /// Graphviz rendering: one node per interval, one edge per covering.
    pub fn to_dot(&self, title: &str) -> String {
        let mut s = format!("digraph \"{}\" {{\n", title.replace('"', "'"));
        for (i, n) in self.names.iter().enumerate() {
            s.push_str(&format!("  n{} [label=\"{}\"];\n", i, n.replace('"', "'")));
        }
        for i in 0..self.len() {
            for j in self.successors(i) {
                let style = if self.mode == CoverMode::UpperBound { " [style=dashed]" } else { "" };
                s.push_str(&format!("  n{} -> n{}{};\n", i, j, style));
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Covering data of one partition: the covering relation, the upper-bound
/// relation, and whether the partition is Markov (the two agree).
#[derive(Debug, Clone)]
pub struct Cover {
    pub partition: IntervalPartition,
    pub m: CoverMatrix,
    pub m_bar: CoverMatrix,
    pub markov: bool,
}

impl Cover {
    /// `M` when the partition is Markov, otherwise the upper bound `M̄`.
    pub fn matrix(&self) -> &CoverMatrix {
        if self.markov {
            &self.m
        } else {
            &self.m_bar
        }
    }
}

fn point_name(g: &PlanarGraph, p: &Point) -> String {
    match g.label(p) {
        Some(n) => n.to_string(),
        None => format!("({},{})", p.x, p.y),
    }
}

/// Splits every span of `g` at the given points and at the axes.
pub fn partition_intervals(g: &PlanarGraph, cuts: &BTreeSet<Point>) -> Vec<Interval> {
    let mut all = cuts.clone();
    all.extend(g.vertices());
    all.extend(g.axis_points());
    g.edges_with_cuts(&all)
        .into_iter()
        .map(|seg| {
            let key = LineKey::through(seg.direction, &seg.p);
            let (a, b) = (seg.direction.param_of(&seg.p), seg.direction.param_of(&seg.q));
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let (piece, _) = primary_piece(&seg.midpoint());
            let name = format!("{}~{}", point_name(g, &key.point_at(&lo)), point_name(g, &key.point_at(&hi)));
            Interval { key, lo, hi, piece, name }
        })
        .collect()
}

/// Forward-orbit closure of the vertex set, axis crossings and isolated
/// points. For rational parameters the closure is finite.
pub fn orbit_closure(params: &MapParams, g: &PlanarGraph, budget: usize) -> Result<BTreeSet<Point>, MarkovError> {
    let mut seen: BTreeSet<Point> = BTreeSet::new();
    let mut queue: VecDeque<Point> = VecDeque::new();
    for p in g.vertices().into_iter().chain(g.axis_points()) {
        if seen.insert(p.clone()) {
            queue.push_back(p);
        }
    }
    while let Some(p) = queue.pop_front() {
        let q = apply(params, &p);
        if !g.contains_point(&q) {
            return Err(MarkovError::LeavesGraph(format!("{p} maps to {q}")));
        }
        if seen.insert(q.clone()) {
            if seen.len() > budget {
                return Err(MarkovError::Budget(budget));
            }
            queue.push_back(q);
        }
    }
    Ok(seen)
}

fn image_of(params: &MapParams, iv: &Interval, lo: &Rational, hi: &Rational) -> SpanImage {
    span_image(params, &iv.key, &Span::finite(lo.clone(), hi.clone()))
}

fn overlap(a_lo: &Rational, a_hi: &Rational, b: &Span) -> Option<(Rational, Rational)> {
    let (Ext::Fin(b_lo), Ext::Fin(b_hi)) = (&b.lo, &b.hi) else { return None };
    let lo = if a_lo > b_lo { a_lo.clone() } else { b_lo.clone() };
    let hi = if a_hi < b_hi { a_hi.clone() } else { b_hi.clone() };
    (lo < hi).then_some((lo, hi))
}

/// Partition of `g` by its vertices and `cuts`, covering relations, and
/// collapse elimination.
pub fn build_cover(params: &MapParams, g: &PlanarGraph, cuts: &BTreeSet<Point>) -> Result<Cover, MarkovError> {
    let all = partition_intervals(g, cuts);
    let mut by_key: BTreeMap<LineKey, Vec<usize>> = BTreeMap::new();
    for (i, iv) in all.iter().enumerate() {
        by_key.entry(iv.key.clone()).or_default().push(i);
    }
    let n = all.len();
    let mut cover = vec![vec![0u32; n]; n];
    let mut meets = vec![vec![0u32; n]; n];
    let mut point_image = vec![false; n];
    for (i, iv) in all.iter().enumerate() {
        match image_of(params, iv, &iv.lo, &iv.hi) {
            SpanImage::Point(p) => {
                if !g.contains_point(&p) {
                    return Err(MarkovError::LeavesGraph(format!("{} collapses to {p}", iv.name)));
                }
                point_image[i] = true;
            }
            SpanImage::Span(k2, s2) => {
                if !g.contains_span(&k2, &s2) {
                    return Err(MarkovError::LeavesGraph(format!("image of {}", iv.name)));
                }
                for &j in by_key.get(&k2).map(|v| v.as_slice()).unwrap_or(&[]) {
                    let jv = &all[j];
                    if let Some((lo, hi)) = overlap(&jv.lo, &jv.hi, &s2) {
                        meets[i][j] = 1;
                        if lo == jv.lo && hi == jv.hi {
                            cover[i][j] = 1;
                        }
                    }
                }
            }
        }
    }
    // Collapse elimination: drop intervals whose image is a point or lies
    // in already dropped intervals.
    let mut dropped: Vec<bool> = point_image.clone();
    for _ in 0..COLLAPSE_PASSES {
        let mut changed = false;
        for i in 0..n {
            if !dropped[i] && (0..n).all(|j| meets[i][j] == 0 || dropped[j]) {
                dropped[i] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let keep: Vec<usize> = (0..n).filter(|&i| !dropped[i]).collect();
    let names: Vec<String> = keep.iter().map(|&i| all[i].name.clone()).collect();
    let pick = |m: &Vec<Vec<u32>>| -> Vec<Vec<u32>> {
        keep.iter().map(|&i| keep.iter().map(|&j| m[i][j]).collect()).collect()
    };
    // Partial overlaps with collapsing intervals do not affect the count of
    // itineraries, so Markov-ness is judged on the survivors.
    let markov = keep.iter().all(|&i| keep.iter().all(|&j| cover[i][j] == meets[i][j]));
    let m_mode = if markov { CoverMode::Markov } else { CoverMode::Forced };
    let m = CoverMatrix::new(names.clone(), pick(&cover), m_mode);
    let m_bar = CoverMatrix::new(names, pick(&meets), if markov { CoverMode::Markov } else { CoverMode::UpperBound });
    let mut points = cuts.clone();
    points.extend(g.vertices());
    let partition = IntervalPartition {
        intervals: keep.iter().map(|&i| all[i].clone()).collect(),
        collapse_set: (0..n).filter(|&i| dropped[i]).map(|i| all[i].clone()).collect(),
        points,
    };
    Ok(Cover { partition, m, m_bar, markov })
}

/// Partition refined by the forward orbits of all vertices; Markov by
/// construction whenever the closure is finite.
pub fn markov_cover(params: &MapParams, g: &PlanarGraph, budget: usize) -> Result<Cover, MarkovError> {
    let cuts = orbit_closure(params, g, budget)?;
    build_cover(params, g, &cuts)
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthSequence {
    /// `N(m)`: number of distinct itineraries of length `m`, for `m = 1..`.
    pub counts: Vec<u64>,
    /// `ln N(m) / m`.
    pub estimates: Vec<f64>,
    pub truncated: bool,
}

impl GrowthSequence {
    fn ln_count(&self, m: usize) -> f64 {
        (self.counts[m - 1] as f64).ln()
    }

    /// `ln(N(m) / N(m-1))`, which converges to the entropy much faster than
    /// `ln N(m) / m` when `N(m)` carries a constant factor.
    pub fn ratio_estimate(&self, m: usize) -> Option<f64> {
        (m >= 2 && m <= self.counts.len() && self.counts[m - 2] > 0)
            .then(|| self.ln_count(m) - self.ln_count(m - 1))
    }

    /// Submultiplicative envelope `min_{j+k=m} (ln N(j) + ln N(k)) / m`,
    /// an upper bound for `ln N(m) / m`.
    pub fn envelope(&self, m: usize) -> Option<f64> {
        if m < 2 || m > self.counts.len() || self.counts.iter().take(m).any(|&c| c == 0) {
            return None;
        }
        (1..m).map(|j| (self.ln_count(j) + self.ln_count(m - j)) / m as f64).reduce(f64::min)
    }
}

/// Counts itineraries through the partition by pushing interval images
/// forward exactly: a state is a word together with the set of points of
/// its last interval reached along that word.
pub fn growth_number(
    params: &MapParams,
    g: &PlanarGraph,
    partition: &IntervalPartition,
    m_max: usize,
    state_budget: usize,
) -> GrowthSequence {
    let ivs = &partition.intervals;
    let mut by_key: BTreeMap<&LineKey, Vec<usize>> = BTreeMap::new();
    for (i, iv) in ivs.iter().enumerate() {
        by_key.entry(&iv.key).or_default().push(i);
    }
    let mut states: Vec<(usize, Rational, Rational)> =
        ivs.iter().enumerate().map(|(i, iv)| (i, iv.lo.clone(), iv.hi.clone())).collect();
    let mut counts = Vec::with_capacity(m_max);
    let mut truncated = false;
    for m in 1..=m_max {
        counts.push(states.len() as u64);
        if m == m_max {
            break;
        }
        let mut next = Vec::new();
        for (i, lo, hi) in &states {
            let SpanImage::Span(k2, s2) = image_of(params, &ivs[*i], lo, hi) else { continue };
            debug_assert!(g.contains_span(&k2, &s2));
            for &j in by_key.get(&k2).map(|v| v.as_slice()).unwrap_or(&[]) {
                if let Some((a, b)) = overlap(&ivs[j].lo, &ivs[j].hi, &s2) {
                    next.push((j, a, b));
                }
            }
        }
        if next.len() > state_budget {
            truncated = true;
            break;
        }
        states = next;
    }
    let estimates = counts
        .iter()
        .enumerate()
        .map(|(k, &c)| if c == 0 { 0.0 } else { (c as f64).ln() / (k + 1) as f64 })
        .collect();
    GrowthSequence { counts, estimates, truncated }
}

/// Whether all interval lengths are positive and the intervals overlap only
/// at endpoints (a sanity check on partitions).
pub fn is_proper_partition(p: &IntervalPartition) -> bool {
    let mut by_key: BTreeMap<&LineKey, Vec<(&Rational, &Rational)>> = BTreeMap::new();
    for iv in p.intervals.iter().chain(p.collapse_set.iter()) {
        if iv.length() <= Rational::zero() {
            return false;
        }
        by_key.entry(&iv.key).or_default().push((&iv.lo, &iv.hi));
    }
    by_key.values_mut().all(|v| {
        v.sort();
        v.windows(2).all(|w| w[0].1 <= w[1].0)
    })
}
