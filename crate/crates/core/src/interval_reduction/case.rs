//! Entropy of `F|_Γ` for every `b`, with each answer labeled by what is
//! known about it and cross-checked against the covering-matrix engine.

use num_traits::{One, Signed};
use serde::Serialize;

use super::{lap_entropy, onset::PREDICATE_BUDGET, Onset, ReductionError, ReturnCase};
use crate::exact_geometry::{format_rational, rat, Rational};
use crate::graph_catalog::{atlas_lookup, instantiate};
use crate::map_engine::{normalize_params, MapParams};
use crate::markov_entropy::{analyze_graph, default_tol, perron_root, IntPolynomial, MatrixEntropy, RootInterval};

/// Named entropy constants, each `ln` of the largest root of a polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReferenceValue {
    H1,
    H2,
    H3,
    H4,
    H5,
    Ln2Over6,
}

impl ReferenceValue {
    pub const ALL: [ReferenceValue; 6] = [
        ReferenceValue::H1,
        ReferenceValue::H2,
        ReferenceValue::H3,
        ReferenceValue::H4,
        ReferenceValue::H5,
        ReferenceValue::Ln2Over6,
    ];

    /// Coefficients in ascending degree.
    pub fn coeffs(self) -> Vec<i64> {
        let mut c = vec![0i64; self.degree() + 1];
        let set = |c: &mut Vec<i64>, terms: &[(usize, i64)]| terms.iter().for_each(|&(k, v)| c[k] = v);
        match self {
            ReferenceValue::H1 => set(&mut c, &[(0, -2), (1, -1), (6, 1)]),
            ReferenceValue::H2 => set(&mut c, &[(0, -1), (1, -1), (6, 1)]),
            ReferenceValue::H3 => set(&mut c, &[(0, -1), (3, -1), (7, 1)]),
            ReferenceValue::H4 => set(&mut c, &[(0, -1), (7, -1), (11, 1)]),
            ReferenceValue::H5 => set(&mut c, &[(0, -1), (3, -1), (4, -1), (7, 1)]),
            ReferenceValue::Ln2Over6 => set(&mut c, &[(0, -2), (6, 1)]),
        }
        c
    }

    fn degree(self) -> usize {
        match self {
            ReferenceValue::H1 | ReferenceValue::H2 | ReferenceValue::Ln2Over6 => 6,
            ReferenceValue::H3 | ReferenceValue::H5 => 7,
            ReferenceValue::H4 => 11,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ReferenceValue::H1 => "h1",
            ReferenceValue::H2 => "h2",
            ReferenceValue::H3 => "h3",
            ReferenceValue::H4 => "h4",
            ReferenceValue::H5 => "h5",
            ReferenceValue::Ln2Over6 => "ln2/6",
        }
    }

    pub fn poly(self) -> IntPolynomial {
        IntPolynomial::from_i64(&self.coeffs())
    }

    pub fn root(self) -> RootInterval {
        perron_root(&self.poly(), &default_tol())
    }

    pub fn value(self) -> f64 {
        self.root().ln_mid()
    }
}

/// What is asserted about the entropy at a parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyClaim {
    Zero,
    Exact(ReferenceValue),
    AtLeast(ReferenceValue),
    Positive,
    /// Near an onset parameter: zero on one side, positive on the other,
    /// decided here by the trapezoidal reduction.
    Bracket(Onset),
}

struct Band {
    lo: Option<Rational>,
    lo_open: bool,
    hi: Option<Rational>,
    hi_open: bool,
    claim: EntropyClaim,
    source: &'static str,
}

impl Band {
    fn contains(&self, b: &Rational) -> bool {
        let above = match &self.lo {
            None => true,
            Some(l) if self.lo_open => b > l,
            Some(l) => b >= l,
        };
        let below = match &self.hi {
            None => true,
            Some(h) if self.hi_open => b < h,
            Some(h) => b <= h,
        };
        above && below
    }
}

fn bands() -> Vec<Band> {
    use EntropyClaim::*;
    use ReferenceValue::*;
    let band = |lo: Option<Rational>, lo_open, hi: Option<Rational>, hi_open, claim, source| Band {
        lo,
        lo_open,
        hi,
        hi_open,
        claim,
        source,
    };
    let r = |n, d| Some(rat(n, d));
    vec![
        band(None, true, r(-1, 1), false, Zero, "graph is a circle; degree-one monotone maps have zero entropy"),
        band(r(-1, 1), true, r(-112, 137), false, Zero, "single loops through every rome vertex"),
        band(r(-112, 137), true, r(-13, 16), true, Bracket(Onset::Alpha), "trapezoidal reduction, return time 6"),
        band(r(-13, 16), false, r(-3, 4), false, Positive, "trapezoidal reduction with full plateau height"),
        band(r(-3, 4), true, r(-1, 5), false, Exact(H1), "Markov partition, rome of two vertices"),
        band(r(-1, 5), true, r(-1, 9), false, AtLeast(H2), "forced loops of lengths 5 and 6"),
        band(r(-1, 9), true, r(-1, 16), false, Exact(H1), "Markov partition, rome of two vertices"),
        band(r(-1, 16), true, r(-1, 36), true, AtLeast(Ln2Over6), "forced horseshoe for the sixth iterate"),
        band(r(-1, 36), false, r(0, 1), true, Zero, "attracting periodic plateau images"),
        band(r(0, 1), false, r(1, 2), false, Zero, "graph reduces to periodic points"),
        band(r(1, 2), true, r(2, 3), false, Zero, "single loops through every rome vertex"),
        band(r(2, 3), true, r(603, 874), false, Zero, "single loops through every rome vertex"),
        band(r(603, 874), true, r(563, 816), true, Bracket(Onset::Beta), "trapezoidal reduction, return time 7"),
        band(r(563, 816), false, r(5, 7), false, Positive, "trapezoidal reduction with full plateau height"),
        band(r(5, 7), true, r(4, 5), false, AtLeast(H3), "forced loops of lengths 4 and 7"),
        band(r(4, 5), true, r(6, 7), false, AtLeast(H3), "forced loops of lengths 4 and 7"),
        band(r(6, 7), true, r(12, 13), false, AtLeast(H4), "forced loops of lengths 4 and 11"),
        band(r(12, 13), true, r(1, 1), true, Positive, "two loops through one rome vertex"),
        band(r(1, 1), false, r(1, 1), false, Zero, "plateaus absorbed by two 4-cycles"),
        band(r(1, 1), true, r(2, 1), true, Positive, "two loops through one rome vertex"),
        band(r(2, 1), false, r(4, 1), false, Exact(H5), "Markov partition, loops of lengths 3, 4 and 7"),
        band(r(4, 1), true, r(8, 1), true, Positive, "two loops through one rome vertex"),
        band(r(8, 1), false, None, true, Zero, "plateaus absorbed by a 3-cycle"),
    ]
}

/// Entropy at one parameter: the claim for its band, the interval computed
/// by the covering-matrix engine, and whether the two agree.
#[derive(Debug, Clone, Serialize)]
pub struct CaseEntropy {
    pub b: String,
    pub case_id: String,
    pub claim: EntropyClaim,
    pub source: &'static str,
    /// The claimed value (exact or lower bound) when the claim names one.
    pub reference: Option<f64>,
    /// `ln ρ(M)`: covering relations force at least this much entropy.
    pub lower: f64,
    /// `ln ρ(M̄)`, equal to `lower` when the partition is Markov.
    pub upper: f64,
    pub markov: bool,
    pub intervals: usize,
    /// Characteristic polynomial of the covering matrix, powers of λ removed.
    pub poly: Option<Vec<String>>,
    /// `h(T)/period` for the trapezoidal reduction, in bracket windows.
    pub reduced: Option<f64>,
    pub consistent: bool,
}

impl CaseEntropy {
    /// Best single number for reporting.
    pub fn value(&self) -> f64 {
        match self.claim {
            EntropyClaim::Zero => 0.0,
            EntropyClaim::Exact(_) => self.reference.unwrap_or(self.lower),
            _ => self.lower.max(self.reduced.unwrap_or(0.0)),
        }
    }

    pub fn is_positive(&self) -> bool {
        !matches!(self.claim, EntropyClaim::Zero) && self.value() > 0.0
    }
}

fn above_one(r: &RootInterval) -> bool {
    r.cmp_exact(&RootInterval::exact(Rational::one())).is_gt()
}

fn ln_of(m: &MatrixEntropy) -> f64 {
    if above_one(&m.radius) {
        m.radius.ln_mid()
    } else {
        0.0
    }
}

/// Entropy of `F_{a,b}` restricted to its invariant graph, for `a < 0`.
pub fn entropy_of_case(params: &MapParams, budget: usize) -> Result<CaseEntropy, ReductionError> {
    if !params.a.is_negative() {
        return Err(ReductionError::Domain("the graph entropy dispatch needs a < 0".into()));
    }
    let (norm, _) = normalize_params(params);
    let b = norm.b.clone();
    let band = bands().into_iter().find(|w| w.contains(&b)).expect("bands cover the line");
    let case = atlas_lookup(&b);
    let g = instantiate(case, &b).map_err(|e| ReductionError::Domain(e.to_string()))?;
    let (_, ge) = analyze_graph(&norm, &g, budget).map_err(|e| ReductionError::Domain(e.to_string()))?;
    let lower_m = &ge.markov;
    let upper_m = ge.upper.as_ref().unwrap_or(&ge.markov);
    let (lower, upper) = (ln_of(lower_m), ln_of(upper_m));
    let one = RootInterval::exact(Rational::one());
    let reduced = match band.claim {
        EntropyClaim::Bracket(which) => {
            let rc: ReturnCase = which.case();
            let t = rc.trapezoid(&b)?;
            Some(lap_entropy(&t, 1, PREDICATE_BUDGET).value() / rc.period() as f64)
        }
        _ => None,
    };
    let consistent = match band.claim {
        EntropyClaim::Zero => !above_one(&upper_m.radius) || (ge.markov.size == 0),
        EntropyClaim::Exact(h) => ge.exact && lower_m.radius.cmp_exact(&h.root()).is_eq(),
        EntropyClaim::AtLeast(h) => lower_m.radius.cmp_exact(&h.root()).is_ge(),
        EntropyClaim::Positive => lower_m.radius.cmp_exact(&one).is_gt(),
        EntropyClaim::Bracket(_) => {
            let r = reduced.unwrap_or(f64::NAN);
            r >= lower - 1e-2 && r <= upper + 1e-2
        }
    };
    let reference = match band.claim {
        EntropyClaim::Exact(h) | EntropyClaim::AtLeast(h) => Some(h.value()),
        _ => None,
    };
    let poly = (lower_m.poly.degree().unwrap_or(0) <= 64)
        .then(|| lower_m.poly.coeffs().iter().map(|c| c.to_string()).collect());
    Ok(CaseEntropy {
        b: format_rational(&b),
        case_id: case.id.clone(),
        claim: band.claim,
        source: band.source,
        reference,
        lower,
        upper,
        markov: ge.exact,
        intervals: ge.intervals,
        poly,
        reduced,
        consistent,
    })
}

/// Parameters where the band table changes claim, for sweeps and reports.
pub fn band_edges() -> Vec<Rational> {
    let mut v: Vec<Rational> = bands().into_iter().flat_map(|b| [b.lo, b.hi]).flatten().collect();
    v.sort();
    v.dedup();
    v
}
