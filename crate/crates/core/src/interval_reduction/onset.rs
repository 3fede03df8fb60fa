//! Bisection for the parameters where entropy switches on.

use rayon::prelude::*;
use serde::Serialize;

use super::{lap_entropy, ReductionError, ReturnCase};
use crate::exact_geometry::{rat, simplest_between, Rational};

/// Lap-image budget for the exact positivity predicate.
pub const PREDICATE_BUDGET: usize = 20_000;

const MAX_ROUNDS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Onset {
    /// Onset near `b ≈ −0.815` on the diagonal return line.
    Alpha,
    /// Onset near `b ≈ 0.68994` on the horizontal return line.
    Beta,
}

impl Onset {
    pub fn case(self) -> ReturnCase {
        match self {
            Onset::Alpha => ReturnCase::Diagonal,
            Onset::Beta => ReturnCase::Horizontal,
        }
    }

    /// Closed window with zero entropy at the left end and positive entropy
    /// at the right end.
    pub fn window(self) -> (Rational, Rational) {
        let w = self.case().window();
        (w.lo, w.hi)
    }

    pub fn name(self) -> &'static str {
        match self {
            Onset::Alpha => "alpha",
            Onset::Beta => "beta",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OnsetBracket {
    pub which: Onset,
    #[serde(with = "crate::exact_geometry::serde_rational")]
    pub lo: Rational,
    #[serde(with = "crate::exact_geometry::serde_rational")]
    pub hi: Rational,
    /// `(b, verdict)` for every probe, `None` when undecided.
    pub probes: Vec<(String, Option<bool>)>,
    /// Set when a probe could not be decided or the ends disagree with the
    /// expected zero/positive pattern.
    pub undecided: bool,
}

impl OnsetBracket {
    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }
}

/// Exact verdict on positive entropy of the reduced trapezoidal map at `b`.
pub fn onset_predicate(which: Onset, b: &Rational) -> Option<bool> {
    let t = which.case().trapezoid(b).ok()?;
    lap_entropy(&t, 1, PREDICATE_BUDGET).positive()
}

/// Narrows the onset window to width at most `tol`, strictly inside the
/// window. Each round probes three simple rationals near the quartiles in
/// parallel; entropy is monotone in `b`, so the transition lies between the
/// last zero and the first positive probe.
pub fn bracket_onset(which: Onset, tol: &Rational) -> Result<OnsetBracket, ReductionError> {
    if tol <= &Rational::from_integer(0.into()) {
        return Err(ReductionError::Domain("tolerance must be positive".into()));
    }
    let (mut lo, mut hi) = which.window();
    let mut probes = Vec::new();
    let mut undecided = false;
    let ends = [lo.clone(), hi.clone()];
    let ends_v: Vec<_> = ends.par_iter().map(|b| onset_predicate(which, b)).collect();
    for (b, v) in ends.iter().zip(&ends_v) {
        probes.push((b.to_string(), *v));
    }
    if ends_v != [Some(false), Some(true)] {
        undecided = true;
    }
    let (w_lo, w_hi) = (lo.clone(), hi.clone());
    // Keep refining until the bracket is narrow enough and both ends have
    // moved off the window ends, so it lies strictly inside the window.
    let mut rounds = 0;
    while (&(&hi - &lo) > tol || lo == w_lo || hi == w_hi) && rounds < MAX_ROUNDS {
        rounds += 1;
        let w = &hi - &lo;
        let pts: Vec<Rational> = (1..=3)
            .map(|k| {
                let c = &lo + &w * rat(k, 4);
                let r = &w * rat(1, 16);
                simplest_between(&(&c - &r), &(&c + &r))
            })
            .collect();
        let vs: Vec<Option<bool>> = pts.par_iter().map(|b| onset_predicate(which, b)).collect();
        let mut new_lo = lo.clone();
        let mut new_hi = hi.clone();
        for (b, v) in pts.iter().zip(&vs) {
            probes.push((b.to_string(), *v));
            match v {
                Some(false) if b > &new_lo && b < &new_hi => new_lo = b.clone(),
                Some(true) if b < &new_hi && b > &new_lo => new_hi = b.clone(),
                None => undecided = true,
                _ => {}
            }
        }
        // A positive probe below a zero probe contradicts monotonicity.
        let bad = pts.iter().zip(&vs).any(|(b, v)| {
            (*v == Some(true) && b <= &new_lo) || (*v == Some(false) && b >= &new_hi)
        });
        if bad {
            undecided = true;
        }
        if new_lo == lo && new_hi == hi {
            undecided = true;
            break;
        }
        lo = new_lo;
        hi = new_hi;
    }
    Ok(OnsetBracket { which, lo, hi, probes, undecided })
}
