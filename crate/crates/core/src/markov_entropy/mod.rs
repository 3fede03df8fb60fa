//! Interval partitions, covering matrices, romes and entropy.
//!
//! Entropy is computed as the log of the spectral radius of the covering
//! matrix. The characteristic polynomial comes from a rome determinant and
//! is cross-checked against fraction-free elimination; the spectral radius
//! is then isolated by exact Sturm bisection.

pub mod cover;
pub mod poly;
pub mod rome;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exact_geometry::{rat, Rational};
use crate::graph_catalog::planar::PlanarGraph;
use crate::map_engine::MapParams;

pub use cover::{
    build_cover, growth_number, markov_cover, orbit_closure, Cover, CoverMatrix, CoverMode, GrowthSequence, Interval,
    IntervalPartition, DEFAULT_CLOSURE_BUDGET,
};
pub use poly::{perron_root, IntPolynomial, RootInterval};
pub use rome::{
    char_poly_blocks, char_poly_direct, find_rome, loop_structure, rome_char_poly, rome_with_paths, LoopVerdict, Rome,
};

#[derive(Debug, Error)]
pub enum MarkovError {
    #[error("invariance violation: {0}")]
    LeavesGraph(String),
    #[error("orbit closure exceeded {0} points")]
    Budget(usize),
    #[error("vertex set {0:?} misses a loop")]
    NotARome(Vec<usize>),
}

/// Default enclosure width for spectral radii.
pub fn default_tol() -> Rational {
    rat(1, 1_000_000_000_000)
}

/// Entropy data of one covering matrix.
#[derive(Debug, Clone, Serialize)]
pub struct MatrixEntropy {
    pub size: usize,
    pub mode: CoverMode,
    /// `det(λI − M)` with the powers of `λ` removed.
    pub poly: IntPolynomial,
    pub radius: RootInterval,
    pub entropy: f64,
    pub rome: Vec<String>,
    pub verdict: LoopVerdict,
    /// Sizes of the strongly connected components that carry loops.
    pub components: Vec<usize>,
}

/// Characteristic polynomial through a rome, spectral radius and loop verdict.
pub fn matrix_entropy(m: &CoverMatrix, tol: &Rational) -> MatrixEntropy {
    let r = find_rome(m);
    let full = rome_char_poly(m, &r).expect("find_rome returns a rome");
    let (poly, _) = full.strip_x();
    let radius = perron_root(&poly, tol);
    let entropy = if radius.lo > Rational::one() { radius.ln_mid() } else { 0.0 };
    MatrixEntropy {
        size: m.len(),
        mode: m.mode,
        poly,
        entropy,
        rome: r.vertices.iter().map(|&v| m.names[v].clone()).collect(),
        verdict: loop_structure(m, &r),
        components: rome::cyclic_components(m).iter().map(Vec::len).collect(),
        radius,
    }
}

/// Entropy of `F` restricted to an invariant graph.
#[derive(Debug, Clone, Serialize)]
pub struct GraphEntropy {
    /// True when the partition is Markov, so the value is exact.
    pub exact: bool,
    pub intervals: usize,
    pub collapsed: usize,
    pub markov: MatrixEntropy,
    /// Entropy of the upper-bound matrix when the partition is not Markov.
    pub upper: Option<MatrixEntropy>,
}

impl GraphEntropy {
    /// Best available value: exact when Markov, otherwise the upper bound.
    pub fn value(&self) -> &MatrixEntropy {
        self.upper.as_ref().filter(|_| !self.exact).unwrap_or(&self.markov)
    }
}

/// Markov partition by the orbit closure of the vertices; when the closure
/// exceeds `budget` the vertex partition's upper-bound matrix is reported.
pub fn analyze_graph(params: &MapParams, g: &PlanarGraph, budget: usize) -> Result<(Cover, GraphEntropy), MarkovError> {
    let tol = default_tol();
    let cover = match markov_cover(params, g, budget) {
        Ok(c) => c,
        Err(MarkovError::Budget(_)) => build_cover(params, g, &Default::default())?,
        Err(e) => return Err(e),
    };
    let markov = matrix_entropy(&cover.m, &tol);
    let upper = (!cover.markov).then(|| matrix_entropy(&cover.m_bar, &tol));
    let ge = GraphEntropy {
        exact: cover.markov,
        intervals: cover.partition.intervals.len(),
        collapsed: cover.partition.collapse_set.len(),
        markov,
        upper,
    };
    Ok((cover, ge))
}

/// Checks `ρ(Mⁿ) = ρ(M)ⁿ` with both radii enclosed exactly.
pub fn power_entropy_check(m: &CoverMatrix, n: usize) -> bool {
    assert!(n >= 1);
    let tol = rat(1, 1_000_000_000);
    let base = perron_root(&char_poly_blocks(m), &tol);
    let pw = m.power(n);
    let rows: Vec<Vec<u32>> =
        pw.iter().map(|r| r.iter().map(|&v| u32::try_from(v).expect("matrix power entries fit")).collect()).collect();
    let mn = CoverMatrix::new(m.names.clone(), rows, m.mode);
    let powered = perron_root(&char_poly_blocks(&mn), &tol);
    let e = n as i32;
    let lo = num_traits::pow::pow(base.lo.clone(), e as usize);
    let hi = num_traits::pow::pow(base.hi.clone(), e as usize);
    // The n-th power enclosure must meet the enclosure of the powered radius.
    if base.hi.is_zero() {
        return powered.hi.is_zero();
    }
    let slack = &hi - &lo + tol;
    powered.hi >= &lo - &slack && powered.lo <= &hi + &slack
}

#[cfg(test)]
mod tests;
