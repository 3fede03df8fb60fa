//! Iteration of `F_{-1,b}` on segments whose coordinates are affine in
//! `(b, x)`, valid uniformly for `b` in a closed window.

use std::fmt;

use num_traits::{One, Signed, Zero};

use super::ReductionError;
use crate::exact_geometry::{format_rational, int, Rational};

/// `c0 + cb·b + cx·x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Aff {
    pub c0: Rational,
    pub cb: Rational,
    pub cx: Rational,
}

impl Aff {
    pub fn new(c0: Rational, cb: Rational, cx: Rational) -> Self {
        Aff { c0, cb, cx }
    }

    pub fn from_ints(c0: i64, cb: i64, cx: i64) -> Self {
        Aff::new(int(c0), int(cb), int(cx))
    }

    pub fn x() -> Self {
        Aff::from_ints(0, 0, 1)
    }

    pub fn eval(&self, b: &Rational, x: &Rational) -> Rational {
        &self.c0 + &self.cb * b + &self.cx * x
    }

    /// Value with `x` left free: `(c0 + cb·b, cx)`.
    pub fn at_b(&self, b: &Rational) -> (Rational, Rational) {
        (&self.c0 + &self.cb * b, self.cx.clone())
    }

    pub fn add(&self, o: &Aff) -> Aff {
        Aff::new(&self.c0 + &o.c0, &self.cb + &o.cb, &self.cx + &o.cx)
    }

    pub fn sub(&self, o: &Aff) -> Aff {
        Aff::new(&self.c0 - &o.c0, &self.cb - &o.cb, &self.cx - &o.cx)
    }

    pub fn neg(&self) -> Aff {
        Aff::new(-&self.c0, -&self.cb, -&self.cx)
    }

    pub fn plus_const(&self, c: &Rational, cb: &Rational) -> Aff {
        Aff::new(&self.c0 + c, &self.cb + cb, self.cx.clone())
    }

    /// Substitutes `x := e` where `e` does not depend on `x`.
    pub fn subst_x(&self, e: &Aff) -> Aff {
        debug_assert!(e.cx.is_zero());
        Aff::new(&self.c0 + &self.cx * &e.c0, &self.cb + &self.cx * &e.cb, Rational::zero())
    }

    /// The root in `x`, as an affine form in `b` (requires `cx ≠ 0`).
    pub fn root_x(&self) -> Aff {
        Aff::new(-&self.c0 / &self.cx, -&self.cb / &self.cx, Rational::zero())
    }
}

impl fmt::Display for Aff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (c, v) in [(&self.cb, "b"), (&self.cx, "x")] {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let coef = if mag.is_one() { String::new() } else { format_rational(&mag) };
            let sign = if c.is_negative() { "-" } else if parts.is_empty() { "" } else { "+" };
            parts.push(format!("{sign}{coef}{v}"));
        }
        if !self.c0.is_zero() || parts.is_empty() {
            let sign = if self.c0.is_negative() { "-" } else if parts.is_empty() { "" } else { "+" };
            parts.push(format!("{sign}{}", format_rational(&self.c0.abs())));
        }
        f.write_str(&parts.concat())
    }
}

/// Closed parameter window `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    pub lo: Rational,
    pub hi: Rational,
}

impl Window {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi);
        Window { lo, hi }
    }

    pub fn point(b: Rational) -> Self {
        Window { lo: b.clone(), hi: b }
    }

    fn ends(&self) -> [&Rational; 2] {
        [&self.lo, &self.hi]
    }
}

/// A segment `x ∈ [lo(b), hi(b)] ↦ (px, py)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymPiece {
    pub lo: Aff,
    pub hi: Aff,
    pub px: Aff,
    pub py: Aff,
}

impl fmt::Display for SymPiece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x in [{}, {}] -> ({}, {})", self.lo, self.hi, self.px, self.py)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sign {
    NonNeg,
    NonPos,
    Mixed,
}

/// Sign of `f` on `{(b, x) : b ∈ w, lo(b) ≤ x ≤ hi(b)}`, read off the
/// four corners since `f` is affine on a convex region.
fn sign_on(f: &Aff, lo: &Aff, hi: &Aff, w: &Window) -> Sign {
    let mut pos = false;
    let mut neg = false;
    for b in w.ends() {
        for e in [lo, hi] {
            let x = e.eval(b, &Rational::zero());
            let v = f.eval(b, &x);
            pos |= v.is_positive();
            neg |= v.is_negative();
        }
    }
    match (pos, neg) {
        (true, true) => Sign::Mixed,
        (_, false) => Sign::NonNeg,
        (false, true) => Sign::NonPos,
    }
}

/// True when `p ≤ q` at both window ends.
fn le_on(p: &Aff, q: &Aff, w: &Window) -> bool {
    w.ends().iter().all(|b| p.eval(b, &Rational::zero()) <= q.eval(b, &Rational::zero()))
}

fn empty_on(p: &SymPiece, w: &Window) -> bool {
    w.ends().iter().all(|b| p.lo.eval(b, &Rational::zero()) == p.hi.eval(b, &Rational::zero()))
}

/// Splits a piece where `f` changes sign.
fn split_on(p: &SymPiece, f: &Aff, w: &Window) -> Result<Vec<SymPiece>, ReductionError> {
    match sign_on(f, &p.lo, &p.hi, w) {
        Sign::NonNeg | Sign::NonPos => Ok(vec![p.clone()]),
        Sign::Mixed => {
            if f.cx.is_zero() {
                return Err(ReductionError::NonUniform(format!("sign of {f} varies with b")));
            }
            let r = f.root_x();
            if !(le_on(&p.lo, &r, w) && le_on(&r, &p.hi, w)) {
                return Err(ReductionError::NonUniform(format!("axis crossing {r} leaves [{}, {}]", p.lo, p.hi)));
            }
            let left = SymPiece { hi: r.clone(), ..p.clone() };
            let right = SymPiece { lo: r, ..p.clone() };
            Ok([left, right].into_iter().filter(|q| !empty_on(q, w)).collect())
        }
    }
}

/// One application of `F(x, y) = (|x| − y − 1, x − |y| + b)`.
fn step(pieces: &[SymPiece], w: &Window) -> Result<Vec<SymPiece>, ReductionError> {
    let mut out = Vec::new();
    for p in pieces {
        for q in split_on(p, &p.px, w)? {
            for r in split_on(&q, &q.py, w)? {
                let ax = match sign_on(&r.px, &r.lo, &r.hi, w) {
                    Sign::NonPos => r.px.neg(),
                    _ => r.px.clone(),
                };
                let ay = match sign_on(&r.py, &r.lo, &r.hi, w) {
                    Sign::NonPos => r.py.neg(),
                    _ => r.py.clone(),
                };
                let nx = ax.sub(&r.py).plus_const(&-Rational::one(), &Rational::zero());
                let ny = r.px.sub(&ay).plus_const(&Rational::zero(), &Rational::one());
                out.push(SymPiece { px: nx, py: ny, ..r });
            }
        }
    }
    Ok(out)
}

/// Merges neighbours carrying the same formulas.
pub fn merge_pieces(pieces: Vec<SymPiece>) -> Vec<SymPiece> {
    let mut out: Vec<SymPiece> = Vec::new();
    for p in pieces {
        if let Some(last) = out.last_mut() {
            if last.px == p.px && last.py == p.py && last.hi == p.lo {
                last.hi = p.hi;
                continue;
            }
        }
        out.push(p);
    }
    out
}

/// `F^n` on the segment `x ∈ [lo, hi] ↦ (px, py)`, uniform over `w`.
pub fn iterate_segment(start: SymPiece, n: usize, w: &Window) -> Result<Vec<SymPiece>, ReductionError> {
    let mut cur = vec![start];
    for _ in 0..n {
        cur = step(&cur, w)?;
    }
    Ok(merge_pieces(cur))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_geometry::rat;
    use crate::map_engine::{iterate, MapParams};
    use crate::exact_geometry::Point;

    #[test]
    fn display_forms() {
        assert_eq!(Aff::from_ints(16, 7, 16).to_string(), "7b+16x+16");
        assert_eq!(Aff::from_ints(-8, -9, -8).to_string(), "-9b-8x-8");
        assert_eq!(Aff::new(rat(-3, 2), rat(2, 1), Rational::zero()).to_string(), "2b-3/2");
        assert_eq!(Aff::from_ints(0, 0, 0).to_string(), "0");
    }

    #[test]
    fn symbolic_iterates_match_planar() {
        let w = Window::new(rat(-112, 137), rat(-13, 16));
        let start = SymPiece {
            lo: Aff::from_ints(-8, -9, 0),
            hi: Aff::from_ints(0, -1, 0),
            px: Aff::x(),
            py: Aff::from_ints(1, 1, 1),
        };
        let pieces = iterate_segment(start, 6, &w).unwrap();
        for b in [rat(-112, 137), rat(-163, 200), rat(-13, 16)] {
            let params = MapParams::minus_one(b.clone());
            for p in &pieces {
                let (lo, hi) = (p.lo.eval(&b, &Rational::zero()), p.hi.eval(&b, &Rational::zero()));
                for t in [rat(0, 1), rat(1, 3), rat(1, 1)] {
                    let x = &lo + (&hi - &lo) * &t;
                    let img = iterate(&params, &Point::new(x.clone(), &x + &b + Rational::one()), 6);
                    assert_eq!(img, Point::new(p.px.eval(&b, &x), p.py.eval(&b, &x)));
                }
            }
        }
    }
}
