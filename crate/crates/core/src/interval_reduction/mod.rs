//! Piecewise-affine interval maps, trapezoidal maps, first-return maps of
//! `F` on a line of the invariant graph, lap-number entropy, bisection of
//! the chaos onset parameters and the per-case entropy dispatch.

pub mod case;
pub mod onset;
pub mod plmap;
pub mod symbolic;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exact_geometry::{int, rat, Rational};
use crate::map_engine::MapParams;

pub use case::{entropy_of_case, CaseEntropy, EntropyClaim, ReferenceValue};
pub use onset::{bracket_onset, Onset, OnsetBracket};
pub use plmap::{lap_entropy, make_trapezoid, LapEntropy, PLIntervalMap, TrapezoidParams};
pub use symbolic::{iterate_segment, Aff, SymPiece, Window};

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("b = {0} lies outside both reduction windows")]
    UnsupportedWindow(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("branch structure not uniform over the window: {0}")]
    NonUniform(String),
    #[error("return map does not land back on its line: {0}")]
    OffLine(String),
}

/// The two parameter windows where the graph dynamics reduce to a
/// trapezoidal interval map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReturnCase {
    /// Return time 6 on the line `y = x + b + 1`, `b ∈ [−112/137, −13/16]`.
    Diagonal,
    /// Return time 7 on the line `y = 2b − 1`, `b ∈ [603/874, 563/816]`.
    Horizontal,
}

impl ReturnCase {
    pub fn window(self) -> Window {
        match self {
            ReturnCase::Diagonal => Window::new(rat(-112, 137), rat(-13, 16)),
            ReturnCase::Horizontal => Window::new(rat(603, 874), rat(563, 816)),
        }
    }

    pub fn period(self) -> usize {
        match self {
            ReturnCase::Diagonal => 6,
            ReturnCase::Horizontal => 7,
        }
    }

    pub fn containing(b: &Rational) -> Option<ReturnCase> {
        [ReturnCase::Diagonal, ReturnCase::Horizontal].into_iter().find(|c| {
            let w = c.window();
            &w.lo <= b && b <= &w.hi
        })
    }

    /// The starting segment `x ↦ (x, y(x))` over the return domain.
    pub fn start(self) -> SymPiece {
        match self {
            ReturnCase::Diagonal => SymPiece {
                lo: Aff::from_ints(-8, -9, 0),
                hi: Aff::from_ints(0, -1, 0),
                px: Aff::x(),
                py: Aff::from_ints(1, 1, 1),
            },
            ReturnCase::Horizontal => SymPiece {
                lo: Aff::from_ints(300, -435, 0),
                hi: Aff::from_ints(-20, 29, 0),
                px: Aff::x(),
                py: Aff::from_ints(-1, 2, 0),
            },
        }
    }

    /// `y − y_line(x)`, which must vanish on the returned segment.
    fn line_defect(self, p: &SymPiece) -> Aff {
        match self {
            ReturnCase::Diagonal => p.py.sub(&p.px).plus_const(&-Rational::one(), &-Rational::one()),
            ReturnCase::Horizontal => p.py.plus_const(&Rational::one(), &-int(2)),
        }
    }

    /// Reference formula of the return map: `(lo, hi, value)` per piece.
    pub fn displayed(self) -> Vec<(Aff, Aff, Aff)> {
        let a = |c0: Rational, cb: Rational, cx: i64| Aff::new(c0, cb, int(cx));
        match self {
            ReturnCase::Diagonal => vec![
                (Aff::from_ints(-8, -9, 0), a(int(-1), rat(-1, 2), 0), Aff::from_ints(16, 7, 16)),
                (a(int(-1), rat(-1, 2), 0), Aff::from_ints(-1, -1, 0), Aff::from_ints(0, -1, 0)),
                (Aff::from_ints(-1, -1, 0), Aff::from_ints(0, 0, 0), Aff::from_ints(-8, -9, -8)),
                (Aff::from_ints(0, 0, 0), Aff::from_ints(0, -1, 0), Aff::from_ints(-8, -9, 0)),
            ],
            ReturnCase::Horizontal => vec![
                (Aff::from_ints(300, -435, 0), a(rat(-3, 2), int(2), 0), Aff::from_ints(4, -3, 16)),
                (a(rat(-3, 2), int(2), 0), Aff::from_ints(0, 0, 0), Aff::from_ints(-20, 29, 0)),
                (Aff::from_ints(0, 0, 0), Aff::from_ints(-20, 29, 0), Aff::from_ints(-20, 29, -16)),
            ],
        }
    }

    /// Plateau length of the rescaled trapezoid as a function of `b`.
    pub fn z_formula(self, b: &Rational) -> Rational {
        match self {
            ReturnCase::Diagonal => int(55) * b / (int(16) * (int(3) * b - int(1))),
            ReturnCase::Horizontal => (int(45) - int(60) * b) / (int(48) * b - int(29)),
        }
    }

    /// `(X, Y)` of the trapezoid family.
    pub fn slopes(self) -> (Rational, Rational) {
        match self {
            ReturnCase::Diagonal => (rat(1, 16), rat(1, 8)),
            ReturnCase::Horizontal => (rat(1, 16), rat(1, 16)),
        }
    }

    pub fn trapezoid(self, b: &Rational) -> Result<PLIntervalMap, ReductionError> {
        let (x, y) = self.slopes();
        make_trapezoid(&TrapezoidParams::new(x, y, self.z_formula(b)))
    }
}

/// First-return map to the case's line, symbolic in `b` and valid for all
/// `b` in `w`. Each piece is checked to land back on the line.
pub fn return_map_symbolic(case: ReturnCase, w: &Window) -> Result<Vec<SymPiece>, ReductionError> {
    let pieces = iterate_segment(case.start(), case.period(), w)?;
    for p in &pieces {
        let d = case.line_defect(p);
        let zero_on_window = [&w.lo, &w.hi].iter().all(|b| {
            let (c, cx) = d.at_b(b);
            c.is_zero() && cx.is_zero()
        });
        if !zero_on_window {
            return Err(ReductionError::OffLine(format!("defect {d} on [{}, {}]", p.lo, p.hi)));
        }
    }
    Ok(pieces)
}

/// `F^period` on the starting segment split into the pieces that land back
/// on the line and those that do not.
pub fn return_map_partial(case: ReturnCase, w: &Window) -> Result<(Vec<SymPiece>, Vec<SymPiece>), ReductionError> {
    let pieces = iterate_segment(case.start(), case.period(), w)?;
    Ok(pieces.into_iter().partition(|p| {
        let d = case.line_defect(p);
        [&w.lo, &w.hi].iter().all(|b| {
            let (c, cx) = d.at_b(b);
            c.is_zero() && cx.is_zero()
        })
    }))
}

/// Weaker form of [`matches_displayed`] for parameters where the return
/// map has a different shape: each reference formula is carried by some
/// returning piece lying inside that formula's reference range.
pub fn displayed_formulas_occur(case: ReturnCase, returning: &[SymPiece], w: &Window) -> bool {
    let z = Rational::zero();
    let within = |p: &SymPiece, lo: &Aff, hi: &Aff| {
        [&w.lo, &w.hi].iter().all(|b| lo.eval(b, &z) <= p.lo.eval(b, &z) && p.hi.eval(b, &z) <= hi.eval(b, &z))
    };
    case.displayed().iter().all(|(lo, hi, v)| returning.iter().any(|p| p.px == *v && within(p, lo, hi)))
}

/// Whether symbolic pieces coincide with the reference formula: values as
/// exact affine forms in `(b, x)`, breakpoints at both window ends.
pub fn matches_displayed(case: ReturnCase, pieces: &[SymPiece], w: &Window) -> bool {
    let shown = case.displayed();
    pieces.len() == shown.len()
        && pieces.iter().zip(&shown).all(|(p, (lo, hi, v))| {
            p.px == *v
                && [&w.lo, &w.hi].iter().all(|b| {
                    let z = Rational::zero();
                    p.lo.eval(b, &z) == lo.eval(b, &z) && p.hi.eval(b, &z) == hi.eval(b, &z)
                })
        })
}

/// Evaluates symbolic pieces at one `b` as an interval map.
pub fn instantiate_pieces(pieces: &[SymPiece], b: &Rational) -> Result<PLIntervalMap, ReductionError> {
    let z = Rational::zero();
    let list: Vec<_> = pieces
        .iter()
        .map(|p| {
            let (c, s) = p.px.at_b(b);
            (p.lo.eval(b, &z), p.hi.eval(b, &z), s, c)
        })
        .filter(|(lo, hi, _, _)| lo < hi)
        .collect();
    PLIntervalMap::from_pieces(&list)
}

/// Every stage of the reduction to a trapezoidal map at one parameter.
#[derive(Debug, Clone, Serialize)]
pub struct Reduction {
    pub case: ReturnCase,
    #[serde(with = "crate::exact_geometry::serde_rational")]
    pub b: Rational,
    pub period: usize,
    /// The first-return map on its natural domain.
    pub return_map: PLIntervalMap,
    /// Return map conjugated onto `[0, 1]`.
    pub normalized: PLIntervalMap,
    /// After collapsing the trailing constant piece, when there is one.
    pub collapsed: Option<PLIntervalMap>,
    /// Outer branches extended to the repelling fixed point and its preimage.
    pub extended: PLIntervalMap,
    #[serde(with = "crate::exact_geometry::serde_rational")]
    pub x1: Rational,
    #[serde(with = "crate::exact_geometry::serde_rational")]
    pub x2: Rational,
    /// The extended map rescaled to `[0, 1]`.
    pub scaled: PLIntervalMap,
    pub trapezoid: TrapezoidParams,
    /// `scaled` equals `T_{X,Y,Z}` with `Z` from the closed formula.
    pub formula_agrees: bool,
}

/// Reduces the first-return map at `params` to a trapezoidal map.
pub fn reduce_return_map(params: &MapParams) -> Result<Reduction, ReductionError> {
    if params.a != int(-1) {
        return Err(ReductionError::Domain("reduction is stated for a = -1".into()));
    }
    let b = &params.b;
    let case = ReturnCase::containing(b).ok_or_else(|| ReductionError::UnsupportedWindow(b.to_string()))?;
    let pieces = return_map_symbolic(case, &Window::point(b.clone()))?;
    let return_map = instantiate_pieces(&pieces, b)?;
    let normalized = return_map.normalized();
    let collapsed = match case {
        ReturnCase::Diagonal => {
            // The last piece is constant 0; the point where the falling branch
            // reaches 0 is the collapse point.
            let pcs = normalized.pieces();
            let c = pcs.last().map(|p| p.0.clone()).unwrap_or_else(Rational::one);
            Some(normalized.collapse_tail(&c)?)
        }
        ReturnCase::Horizontal => None,
    };
    let (extended, x1, x2) = match &collapsed {
        Some(c) => {
            // At the left end of the window the clipped map has no rising
            // branch left, so the branches are read off the normalized map.
            let pcs = normalized.pieces();
            let left = (pcs[0].2.clone(), pcs[0].3.clone());
            let fall = &pcs[pcs.len() - 2];
            c.extend_with(left, (fall.2.clone(), fall.3.clone()))?
        }
        None => {
            // Branch formulas come from the whole window so that a branch
            // that is empty at this b is still available.
            let full = return_map_symbolic(case, &case.window())?;
            let branch = |p: &SymPiece| {
                let (c, s) = p.px.at_b(b);
                (s, c)
            };
            let (ext, x1, x2) = return_map.extend_with(branch(&full[0]), branch(full.last().unwrap()))?;
            (ext, x1, x2)
        }
    };
    let scaled = extended.normalized();
    let (x, y) = case.slopes();
    let ends = &scaled.breaks;
    let z = if scaled.piece_count() == 3 { &ends[2] - &ends[1] } else { Rational::zero() };
    let trapezoid = TrapezoidParams::new(x, y, z);
    let formula_agrees = trapezoid.z == case.z_formula(b) && make_trapezoid(&trapezoid).map(|t| t == scaled).unwrap_or(false);
    Ok(Reduction {
        case,
        b: b.clone(),
        period: case.period(),
        return_map,
        normalized,
        collapsed,
        extended,
        x1,
        x2,
        scaled,
        trapezoid,
        formula_agrees,
    })
}

#[cfg(test)]
mod tests;
