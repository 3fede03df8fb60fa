//! Romes of directed graphs and the characteristic polynomial they produce.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;
use petgraph::algo::{is_cyclic_directed, tarjan_scc};
use petgraph::graph::DiGraph;
use serde::Serialize;

use super::cover::CoverMatrix;
use super::poly::{det_bareiss, IntPolynomial};
use super::MarkovError;

/// Largest vertex count for which `find_rome` searches for a minimum rome
/// exhaustively before falling back to greedy removal.
const EXHAUSTIVE_LIMIT: usize = 40;
const EXHAUSTIVE_SIZE: usize = 4;

/// A vertex set meeting every loop, with the generating polynomials (in
/// `μ = 1/λ`) of simple paths between its members.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rome {
    pub vertices: Vec<usize>,
    /// `paths[i][j]`: coefficient `k` is the number of paths of length `k`
    /// from `vertices[i]` to `vertices[j]` whose interior avoids the rome.
    pub paths: Vec<Vec<IntPolynomial>>,
}

impl Rome {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Path lengths with multiplicity, per ordered pair of rome vertices.
    pub fn path_lengths(&self) -> BTreeMap<(usize, usize), Vec<(usize, u64)>> {
        let mut out = BTreeMap::new();
        for (i, row) in self.paths.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                let lens: Vec<(usize, u64)> = p
                    .to_i64_vec()
                    .unwrap_or_default()
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(|(k, &c)| (k, c as u64))
                    .collect();
                if !lens.is_empty() {
                    out.insert((self.vertices[i], self.vertices[j]), lens);
                }
            }
        }
        out
    }
}

fn digraph(m: &CoverMatrix, keep: &[bool]) -> DiGraph<usize, ()> {
    let mut g = DiGraph::new();
    let idx: Vec<_> = (0..m.len()).map(|i| g.add_node(i)).collect();
    for i in 0..m.len() {
        if !keep[i] {
            continue;
        }
        for j in m.successors(i) {
            if keep[j] {
                g.add_edge(idx[i], idx[j], ());
            }
        }
    }
    g
}

/// True iff every loop of `m` meets `r`.
pub fn is_rome(m: &CoverMatrix, r: &[usize]) -> bool {
    let mut keep = vec![true; m.len()];
    for &v in r {
        keep[v] = false;
    }
    !is_cyclic_directed(&digraph(m, &keep))
}

/// Strongly connected components that carry at least one loop.
pub fn cyclic_components(m: &CoverMatrix) -> Vec<Vec<usize>> {
    let g = digraph(m, &vec![true; m.len()]);
    let mut out: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|n| g[n]).collect();
            v.sort_unstable();
            v
        })
        .filter(|c| c.len() > 1 || m.rows[c[0]][c[0]] != 0)
        .collect();
    out.sort();
    out
}

fn combinations(pool: &[usize], k: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    fn rec(pool: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == k {
            return f(cur);
        }
        for i in start..pool.len() {
            cur.push(pool[i]);
            if rec(pool, k, i + 1, cur, f) {
                return true;
            }
            cur.pop();
        }
        false
    }
    rec(pool, k, 0, &mut Vec::with_capacity(k), &mut f)
}

/// A small rome: vertices outside loops are never needed, small graphs get a
/// minimum-size rome (lexicographically first), larger ones a greedy one.
pub fn find_rome(m: &CoverMatrix) -> Rome {
    let mut cyclic: Vec<usize> = cyclic_components(m).into_iter().flatten().collect();
    cyclic.sort_unstable();
    let mut chosen: Option<Vec<usize>> = None;
    if cyclic.len() <= EXHAUSTIVE_LIMIT {
        for k in 0..=EXHAUSTIVE_SIZE.min(cyclic.len()) {
            let mut found = None;
            combinations(&cyclic, k, |c| {
                if is_rome(m, c) {
                    found = Some(c.to_vec());
                    true
                } else {
                    false
                }
            });
            if found.is_some() {
                chosen = found;
                break;
            }
        }
    }
    let r = chosen.unwrap_or_else(|| greedy_rome(m, &cyclic));
    rome_with_paths(m, &r).expect("constructed set is a rome")
}

/// Greedy rome: drop candidates in the given order while the complement
/// stays loop-free.
pub fn greedy_rome(m: &CoverMatrix, order: &[usize]) -> Vec<usize> {
    let mut r: Vec<usize> = order.to_vec();
    for &v in order {
        let trial: Vec<usize> = r.iter().copied().filter(|&w| w != v).collect();
        if is_rome(m, &trial) {
            r = trial;
        }
    }
    r.sort_unstable();
    r
}

/// Computes simple-path generating polynomials for a given rome.
pub fn rome_with_paths(m: &CoverMatrix, r: &[usize]) -> Result<Rome, MarkovError> {
    if !is_rome(m, r) {
        return Err(MarkovError::NotARome(r.to_vec()));
    }
    let n = m.len();
    let mut in_rome = vec![false; n];
    for &v in r {
        in_rome[v] = true;
    }
    let g = digraph(m, &in_rome.iter().map(|&x| !x).collect::<Vec<_>>());
    let order: Vec<usize> = petgraph::algo::toposort(&g, None)
        .expect("complement of a rome is acyclic")
        .into_iter()
        .map(|ix| g[ix])
        .filter(|&v| !in_rome[v])
        .collect();
    let mu = IntPolynomial::monomial(BigInt::one(), 1);
    let mut paths = vec![vec![IntPolynomial::zero(); r.len()]; r.len()];
    for (ri, &start) in r.iter().enumerate() {
        // f[v]: paths start -> v with interior outside the rome.
        let mut f = vec![IntPolynomial::zero(); n];
        for v in m.successors(start) {
            if !in_rome[v] {
                f[v] = f[v].add(&mu.scale(&BigInt::from(m.rows[start][v])));
            }
        }
        for &u in &order {
            if f[u].is_zero() {
                continue;
            }
            let step = f[u].mul(&mu);
            for v in m.successors(u) {
                if !in_rome[v] {
                    f[v] = f[v].add(&step.scale(&BigInt::from(m.rows[u][v])));
                }
            }
        }
        for (rj, &end) in r.iter().enumerate() {
            let mut p = mu.scale(&BigInt::from(m.rows[start][end]));
            for &u in &order {
                if m.rows[u][end] != 0 && !f[u].is_zero() {
                    p = p.add(&f[u].mul(&mu).scale(&BigInt::from(m.rows[u][end])));
                }
            }
            paths[ri][rj] = p;
        }
    }
    Ok(Rome { vertices: r.to_vec(), paths })
}

/// `det(λI − M)` from a rome: with `μ = 1/λ` and `D(μ) = det(A_R(μ) − I)`,
/// the characteristic polynomial is `(−1)^k λ^n D(1/λ)`.
pub fn rome_char_poly(m: &CoverMatrix, r: &Rome) -> Result<IntPolynomial, MarkovError> {
    if !is_rome(m, &r.vertices) {
        return Err(MarkovError::NotARome(r.vertices.clone()));
    }
    let k = r.len();
    let a: Vec<Vec<IntPolynomial>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| if i == j { r.paths[i][j].sub(&IntPolynomial::one()) } else { r.paths[i][j].clone() })
                .collect()
        })
        .collect();
    let d = det_bareiss(a);
    let p = d.reversed(m.len());
    Ok(if k % 2 == 1 { p.neg() } else { p })
}

/// `det(λI − M)` by fraction-free elimination on the whole matrix.
pub fn char_poly_direct(m: &CoverMatrix) -> IntPolynomial {
    super::poly::charpoly_bareiss(&m.rows)
}

/// `det(λI − M)` as the product over strongly connected components, each by
/// fraction-free elimination (vertices outside loops contribute `λ`).
pub fn char_poly_blocks(m: &CoverMatrix) -> IntPolynomial {
    let comps = cyclic_components(m);
    let covered: usize = comps.iter().map(Vec::len).sum();
    let mut p = IntPolynomial::monomial(BigInt::one(), m.len() - covered);
    for c in &comps {
        p = p.mul(&char_poly_direct(&m.restrict(c)));
    }
    p
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LoopVerdict {
    Positive,
    Zero,
    Inconclusive,
}

/// Entropy sign from loop combinatorics: positive iff some strongly
/// connected part of the rome multigraph is more than a single cycle.
/// Positivity read off an upper-bound matrix is not a certificate.
pub fn loop_structure(m: &CoverMatrix, r: &Rome) -> LoopVerdict {
    let k = r.len();
    let weight = |i: usize, j: usize| -> u64 {
        r.paths[i][j].to_i64_vec().unwrap_or_default().iter().map(|&c| c as u64).sum()
    };
    let names: Vec<String> = (0..k).map(|i| i.to_string()).collect();
    let rows: Vec<Vec<u32>> = (0..k).map(|i| (0..k).map(|j| u32::from(weight(i, j) > 0)).collect()).collect();
    let reduced = CoverMatrix::new(names, rows, m.mode);
    let positive = cyclic_components(&reduced).iter().any(|c| {
        let edges: u64 = c.iter().flat_map(|&i| c.iter().map(move |&j| (i, j))).map(|(i, j)| weight(i, j)).sum();
        edges > c.len() as u64
    });
    match (positive, m.mode) {
        (true, super::cover::CoverMode::Markov) => LoopVerdict::Positive,
        (true, _) => LoopVerdict::Inconclusive,
        (false, _) => LoopVerdict::Zero,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn letters(n: usize) -> Vec<String> {
        (0..n).map(|i| ((b'A' + i as u8) as char).to_string()).collect()
    }

    /// Two loops through one vertex: A→B→C→D→E→A and A→F→G→H→I→J→A.
    fn two_loops() -> CoverMatrix {
        let e = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5), (5, 6), (6, 7), (7, 8), (8, 9), (9, 0)];
        CoverMatrix::from_edges(10, &e)
    }

    #[test]
    fn loops_of_length_five_and_six() {
        let m = two_loops();
        let r = find_rome(&m);
        assert_eq!(r.vertices, vec![0]);
        let p = rome_char_poly(&m, &r).unwrap();
        let (core, _) = p.strip_x();
        assert_eq!(core, IntPolynomial::from_i64(&[-1, -1, 0, 0, 0, 0, 1]));
        assert_eq!(p, char_poly_direct(&m));
        assert_eq!(loop_structure(&m, &r), LoopVerdict::Positive);
    }

    #[test]
    fn trivial_graphs() {
        let m = CoverMatrix::from_edges(1, &[(0, 0)]);
        let r = find_rome(&m);
        assert_eq!(r.vertices, vec![0]);
        assert_eq!(rome_char_poly(&m, &r).unwrap(), IntPolynomial::from_i64(&[-1, 1]));
        let chain = CoverMatrix::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        let r = find_rome(&chain);
        assert!(r.is_empty());
        assert_eq!(rome_char_poly(&chain, &r).unwrap(), IntPolynomial::from_i64(&[0, 0, 0, 0, 1]));
        assert_eq!(loop_structure(&chain, &r), LoopVerdict::Zero);
        assert!(rome_with_paths(&m, &[]).is_err());
    }

    #[test]
    fn edge_multiplicities_count() {
        let mut m = CoverMatrix::from_edges(2, &[(0, 1), (1, 0)]);
        m.rows[0][0] = 2;
        let direct = char_poly_direct(&m);
        assert_eq!(direct, IntPolynomial::from_i64(&[-1, -2, 1]));
        for r in [find_rome(&m), rome_with_paths(&m, &[0, 1]).unwrap()] {
            assert_eq!(rome_char_poly(&m, &r).unwrap(), direct);
        }
    }

    #[test]
    fn disjoint_cycles_have_zero_verdict() {
        let m = CoverMatrix::from_edges(7, &[(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 4)]);
        let r = find_rome(&m);
        assert_eq!(r.len(), 2);
        assert_eq!(loop_structure(&m, &r), LoopVerdict::Zero);
        assert_eq!(rome_char_poly(&m, &r).unwrap(), char_poly_blocks(&m));
    }

    #[test]
    fn romes_agree_with_direct_determinant() {
        let mut m = two_loops();
        m.rows[3][7] = 1;
        m.rows[8][2] = 1;
        m.names = letters(10);
        let direct = char_poly_direct(&m);
        assert_eq!(char_poly_blocks(&m), direct);
        let small = find_rome(&m);
        let all: Vec<usize> = (0..10).collect();
        let big = rome_with_paths(&m, &all).unwrap();
        assert_eq!(rome_char_poly(&m, &small).unwrap(), direct);
        assert_eq!(rome_char_poly(&m, &big).unwrap(), direct);
    }
}
