//! Integer polynomials, Sturm sequences and exact root isolation.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::exact_geometry::{rat, to_f64, Rational};

/// Integer coefficients in ascending degree; the zero polynomial has no
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^k`.
    pub fn monomial(c: BigInt, k: usize) -> Self {
        let mut v = vec![BigInt::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn to_i64_vec(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(|c| c.to_i64()).collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut v = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    v[i + j] += a * b;
                }
            }
        }
        Self::new(v)
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut r = Self::one();
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![BigInt::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Self::new(v)
    }

    /// Removes the largest power of `x` dividing the polynomial.
    pub fn strip_x(&self) -> (Self, usize) {
        let k = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        (Self::new(self.coeffs[k..].to_vec()), k)
    }

    /// `x^n p(1/x)` for `n >= deg p`.
    pub fn reversed(&self, n: usize) -> Self {
        assert!(self.degree().is_none_or(|d| d <= n), "reversal degree too small");
        let mut v = vec![BigInt::zero(); n + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[n - i] = c.clone();
        }
        Self::new(v)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides by the content and makes the leading coefficient positive.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut g = self.content();
        if self.leading().is_negative() {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Exact quotient, or `None` if `d` does not divide `self` over Z.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let dd = d.degree()?;
        if self.is_zero() {
            return Some(Self::zero());
        }
        let mut r = self.coeffs.clone();
        let n = self.degree().unwrap();
        if n < dd {
            return None;
        }
        let lc = d.leading();
        let mut q = vec![BigInt::zero(); n - dd + 1];
        for k in (0..=n - dd).rev() {
            let top = &r[k + dd];
            if top.is_zero() {
                continue;
            }
            let (c, rem) = top.div_rem(&lc);
            if !rem.is_zero() {
                return None;
            }
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[k + i] -= &c * dc;
            }
            q[k] = c;
        }
        if r.iter().all(|c| c.is_zero()) {
            Some(Self::new(q))
        } else {
            None
        }
    }

    /// Remainder of `lc(d)^k * self` modulo `d` for some `k >= 0`; enough
    /// for gcd computations, where only the primitive part matters.
    pub fn pseudo_rem(&self, d: &Self) -> Self {
        let dd = d.degree().expect("division by zero polynomial");
        let mut r = self.clone();
        let lc = d.leading();
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let t = r.leading();
            r = r.scale(&lc).sub(&d.shift(rd - dd).scale(&t));
        }
        r
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.primitive(), o.primitive());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive();
            a = b;
            b = r;
        }
        a.primitive()
    }

    /// Product of the distinct irreducible factors.
    pub fn squarefree(&self) -> Self {
        let d = self.derivative();
        if d.is_zero() {
            return self.primitive();
        }
        let g = self.gcd(&d);
        self.primitive().div_exact(&g).unwrap_or_else(|| self.primitive()).primitive()
    }

    /// Sign of the value at a rational point, computed with integers only.
    pub fn sign_at(&self, x: &Rational) -> Ordering {
        let Some(n) = self.degree() else { return Ordering::Equal };
        let (p, q) = (x.numer(), x.denom());
        // q^n f(p/q) = sum c_i p^i q^(n-i) has the sign of f(p/q).
        let mut qpows = Vec::with_capacity(n + 1);
        let mut qp = BigInt::one();
        for _ in 0..=n {
            qpows.push(qp.clone());
            qp *= q;
        }
        let mut total = BigInt::zero();
        let mut pp = BigInt::one();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                total += c * &pp * &qpows[n - i];
            }
            pp *= p;
        }
        total.sign_cmp()
    }

    pub fn eval_rational(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + Rational::from_integer(c.clone());
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    /// Characteristic polynomial formatted in `x`.
    pub fn pretty(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            if a.is_one() && i > 0 {
                out.push_str(&mono);
            } else {
                out.push_str(&a.to_string());
                out.push_str(&mono);
            }
        }
        out
    }
}

trait SignCmp {
    fn sign_cmp(&self) -> Ordering;
}

impl SignCmp for BigInt {
    fn sign_cmp(&self) -> Ordering {
        if self.is_positive() {
            Ordering::Greater
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pretty("x"))
    }
}

impl Serialize for IntPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.to_i64_vec() {
            Some(v) => v.serialize(s),
            None => self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().serialize(s),
        }
    }
}

/// Sturm chain of a square-free polynomial.
#[derive(Debug, Clone)]
pub struct Sturm {
    chain: Vec<IntPolynomial>,
}

impl Sturm {
    pub fn new(p: &IntPolynomial) -> Sturm {
        let mut chain = vec![p.clone()];
        let d = p.derivative();
        if d.is_zero() {
            return Sturm { chain };
        }
        chain.push(d.primitive_keep_sign());
        loop {
            let n = chain.len();
            let (a, b) = (&chain[n - 2], &chain[n - 1]);
            if b.degree() == Some(0) {
                break;
            }
            // Pseudo-remainder with a positive multiplier, then negated.
            let lc = b.leading();
            let mut r = a.clone();
            let bd = b.degree().unwrap();
            while let Some(rd) = r.degree() {
                if rd < bd {
                    break;
                }
                let t = r.leading();
                let pos = lc.abs();
                let sgn = if lc.is_negative() { -BigInt::one() } else { BigInt::one() };
                // r <- |lc| r - sign(lc) t x^(rd-bd) b keeps the remainder a
                // positive multiple of the true remainder.
                r = r.scale(&pos).sub(&b.shift(rd - bd).scale(&(t * sgn)));
            }
            if r.is_zero() {
                break;
            }
            chain.push(r.neg().primitive_keep_sign());
        }
        Sturm { chain }
    }

    fn variations(signs: impl Iterator<Item = Ordering>) -> usize {
        let mut last = Ordering::Equal;
        let mut v = 0;
        for s in signs {
            if s == Ordering::Equal {
                continue;
            }
            if last != Ordering::Equal && s != last {
                v += 1;
            }
            last = s;
        }
        v
    }

    pub fn variations_at(&self, x: &Rational) -> usize {
        Self::variations(self.chain.iter().map(|p| p.sign_at(x)))
    }

    pub fn variations_at_pos_inf(&self) -> usize {
        Self::variations(self.chain.iter().map(|p| p.leading().sign_cmp()))
    }

    /// Number of distinct real roots in `(a, b]`.
    pub fn count(&self, a: &Rational, b: &Rational) -> usize {
        self.variations_at(a).saturating_sub(self.variations_at(b))
    }

    pub fn count_above(&self, a: &Rational) -> usize {
        self.variations_at(a).saturating_sub(self.variations_at_pos_inf())
    }
}

impl IntPolynomial {
    /// Divides by the positive content only, preserving the sign.
    fn primitive_keep_sign(&self) -> Self {
        let g = self.content().abs();
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }
}

/// A real algebraic number: the unique root of a square-free polynomial in
/// the interval `(lo, hi]`, or the rational `lo` when `lo == hi`.
#[derive(Debug, Clone)]
pub struct RootInterval {
    pub poly: IntPolynomial,
    pub lo: Rational,
    pub hi: Rational,
}

impl RootInterval {
    pub fn exact(r: Rational) -> RootInterval {
        let poly = IntPolynomial::new(vec![-r.numer().clone(), r.denom().clone()]);
        RootInterval { poly, lo: r.clone(), hi: r }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn mid_f64(&self) -> f64 {
        (to_f64(&self.lo) + to_f64(&self.hi)) / 2.0
    }

    /// Natural logarithm of the root, as a float enclosure.
    pub fn ln_bounds(&self) -> (f64, f64) {
        let lo = to_f64(&self.lo);
        let hi = to_f64(&self.hi);
        (if lo > 0.0 { lo.ln() } else { f64::NEG_INFINITY }, if hi > 0.0 { hi.ln() } else { f64::NEG_INFINITY })
    }

    pub fn ln_mid(&self) -> f64 {
        let m = self.mid_f64();
        if m > 0.0 {
            m.ln()
        } else {
            0.0
        }
    }

    /// Halves the enclosure while keeping the root isolated.
    pub fn refine(&mut self) {
        if self.is_exact() {
            return;
        }
        let mid = (&self.lo + &self.hi) * rat(1, 2);
        if self.poly.sign_at(&mid) == Ordering::Equal {
            self.lo = mid.clone();
            self.hi = mid;
            return;
        }
        if Sturm::new(&self.poly).count(&mid, &self.hi) >= 1 {
            self.lo = mid;
        } else {
            self.hi = mid;
        }
    }

    pub fn refine_to(&mut self, tol: &Rational) {
        while !self.is_exact() && &self.width() > tol {
            self.refine();
        }
    }

    /// Whether `x` lies in the enclosure: `{lo}` when exact, else `(lo, hi]`.
    fn encloses(&self, x: &Rational) -> bool {
        if self.is_exact() {
            x == &self.lo
        } else {
            &self.lo < x && x <= &self.hi
        }
    }

    /// Exact comparison of two algebraic numbers.
    pub fn cmp_exact(&self, other: &RootInterval) -> Ordering {
        let mut a = self.clone();
        let mut b = other.clone();
        loop {
            match (a.is_exact(), b.is_exact()) {
                (true, true) => return a.lo.cmp(&b.lo),
                (true, false) => {
                    let x = a.lo.clone();
                    if !b.encloses(&x) {
                        return if x <= b.lo { Ordering::Less } else { Ordering::Greater };
                    }
                    if b.poly.sign_at(&x) == Ordering::Equal {
                        return Ordering::Equal;
                    }
                    b.refine();
                }
                (false, true) => return b.cmp_exact(&a).reverse(),
                (false, false) => {
                    if a.hi <= b.lo {
                        return Ordering::Less;
                    }
                    if b.hi <= a.lo {
                        return Ordering::Greater;
                    }
                    let lo = if a.lo > b.lo { a.lo.clone() } else { b.lo.clone() };
                    let hi = if a.hi < b.hi { a.hi.clone() } else { b.hi.clone() };
                    let g = a.poly.gcd(&b.poly);
                    if g.degree().unwrap_or(0) > 0 && Sturm::new(&g.squarefree()).count(&lo, &hi) > 0 {
                        return Ordering::Equal;
                    }
                    a.refine();
                    b.refine();
                }
            }
        }
    }
}

impl Serialize for RootInterval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("RootInterval", 3)?;
        st.serialize_field("lo", &self.lo.to_string())?;
        st.serialize_field("hi", &self.hi.to_string())?;
        st.serialize_field("approx", &self.mid_f64())?;
        st.end()
    }
}

/// Cauchy bound: every real root has absolute value below it.
fn cauchy_bound(p: &IntPolynomial) -> Rational {
    let lc = Rational::from_integer(p.leading().abs());
    let m = p
        .coeffs()
        .iter()
        .take(p.coeffs().len() - 1)
        .map(|c| Rational::from_integer(c.abs()) / &lc)
        .max()
        .unwrap_or_else(Rational::zero);
    m + Rational::one()
}

/// Largest real root that is at least zero, enclosed to width `tol` by exact
/// sign-change bisection. For the characteristic polynomial of a
/// nonnegative matrix this is the spectral radius. A polynomial with no
/// nonnegative root yields the exact value 0.
pub fn perron_root(p: &IntPolynomial, tol: &Rational) -> RootInterval {
    if p.degree().unwrap_or(0) == 0 {
        return RootInterval::exact(Rational::zero());
    }
    let q = p.squarefree();
    let sturm = Sturm::new(&q);
    let zero = Rational::zero();
    if sturm.count_above(&zero) == 0 {
        return RootInterval::exact(zero);
    }
    let mut lo = zero;
    let mut hi = cauchy_bound(&q);
    // Invariant: the largest root lies in (lo, hi].
    loop {
        if q.sign_at(&hi) == Ordering::Equal {
            return RootInterval { poly: q, lo: hi.clone(), hi };
        }
        let isolated = sturm.count(&lo, &hi) == 1;
        if isolated && &hi - &lo <= *tol {
            return RootInterval { poly: q, lo, hi };
        }
        let mid = (&lo + &hi) * rat(1, 2);
        if sturm.count(&mid, &hi) >= 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Spectral radius of a square 0/1 (or nonnegative integer) matrix via its
/// characteristic polynomial.
pub fn matrix_perron_root(m: &[Vec<u32>], tol: &Rational) -> RootInterval {
    perron_root(&charpoly_bareiss(m), tol)
}

/// Fraction-free (Bareiss) determinant of a matrix over Z[x].
pub fn det_bareiss(mut a: Vec<Vec<IntPolynomial>>) -> IntPolynomial {
    let n = a.len();
    if n == 0 {
        return IntPolynomial::one();
    }
    let mut sign = false;
    let mut prev = IntPolynomial::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = !sign;
                }
                None => return IntPolynomial::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j].mul(&a[k][k]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = num.div_exact(&prev).expect("Bareiss step divides exactly");
            }
            a[i][k] = IntPolynomial::zero();
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign {
        d.neg()
    } else {
        d
    }
}

/// `det(xI - M)` by fraction-free elimination over Z[x].
pub fn charpoly_bareiss(m: &[Vec<u32>]) -> IntPolynomial {
    let n = m.len();
    let a: Vec<Vec<IntPolynomial>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = IntPolynomial::constant(-BigInt::from(m[i][j]));
                    if i == j {
                        c.add(&IntPolynomial::monomial(BigInt::one(), 1))
                    } else {
                        c
                    }
                })
                .collect()
        })
        .collect();
    det_bareiss(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_geometry::int;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn arithmetic_and_division() {
        let a = p(&[-1, 1]);
        let b = p(&[1, 1]);
        let ab = a.mul(&b);
        assert_eq!(ab, p(&[-1, 0, 1]));
        assert_eq!(ab.div_exact(&a), Some(b.clone()));
        assert_eq!(p(&[1, 0, 1]).div_exact(&a), None);
        assert_eq!(ab.mul(&a).squarefree(), ab);
        assert_eq!(p(&[0, 0, 2, 4]).strip_x(), (p(&[2, 4]), 2));
        assert_eq!(p(&[-1, 0, 1]).gcd(&p(&[1, 2, 1])), p(&[1, 1]));
    }

    #[test]
    fn sign_evaluation() {
        let q = p(&[-2, -1, 0, 0, 0, 0, 1]);
        assert_eq!(q.sign_at(&int(1)), Ordering::Less);
        assert_eq!(q.sign_at(&int(2)), Ordering::Greater);
        assert_eq!(q.sign_at(&rat(-1, 1)), Ordering::Equal);
        assert_eq!(q.sign_at(&rat(-1, 2)), Ordering::Less);
        assert_eq!(p(&[-1, 2]).sign_at(&rat(1, 2)), Ordering::Equal);
    }

    #[test]
    fn perron_roots_of_known_polynomials() {
        let tol = rat(1, 1_000_000_000_000);
        let r = perron_root(&p(&[-1, 0, 0, -1, -1, 0, 0, 1]), &tol);
        assert!(r.lo >= rat(1288452, 1000000) && r.hi <= rat(1288453, 1000000));
        assert!((r.ln_mid() - 0.25344).abs() < 5e-6);
        let r = perron_root(&p(&[-2, -1, 0, 0, 0, 0, 1]), &tol);
        assert!((r.ln_mid() - 0.19463).abs() < 5e-6);
        let r = perron_root(&p(&[0, 0, 0, 1]), &tol);
        assert!(r.is_exact() && r.lo.is_zero());
        let r = perron_root(&p(&[-1, 1]).mul(&p(&[1, 0, 1])), &tol);
        assert!(r.is_exact() && r.lo == int(1));
    }

    #[test]
    fn exact_comparisons() {
        let tol = rat(1, 1000);
        let a = perron_root(&p(&[-2, 0, 0, 0, 0, 0, 1]), &tol);
        // (x^6 - 2)(x^2 + 1) has the same largest root.
        let b = perron_root(&p(&[-2, 0, 0, 0, 0, 0, 1]).mul(&p(&[1, 0, 1])), &tol);
        assert_eq!(a.cmp_exact(&b), Ordering::Equal);
        let c = perron_root(&p(&[-1, -1, 0, 0, 0, 0, 1]), &tol);
        assert_eq!(c.cmp_exact(&a), Ordering::Greater);
        assert_eq!(a.cmp_exact(&c), Ordering::Less);
        assert_eq!(RootInterval::exact(int(1)).cmp_exact(&perron_root(&p(&[-1, 1]), &tol)), Ordering::Equal);
    }

    #[test]
    fn bareiss_matches_small_cases() {
        let m = vec![vec![0, 1], vec![1, 1]];
        assert_eq!(charpoly_bareiss(&m), p(&[-1, -1, 1]));
        let m = vec![vec![1]];
        assert_eq!(charpoly_bareiss(&m), p(&[-1, 1]));
        let m = vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]];
        assert_eq!(charpoly_bareiss(&m), p(&[-1, 0, 0, 1]));
        // Needs a pivot swap.
        let m = vec![vec![0, 1], vec![1, 0]];
        assert_eq!(charpoly_bareiss(&m), p(&[-1, 0, 1]));
    }

    #[test]
    fn pretty_printing() {
        assert_eq!(p(&[-1, 0, 0, -1, -1, 0, 0, 1]).pretty("x"), "x^7 - x^4 - x^3 - 1");
        assert_eq!(p(&[2, -3]).pretty("t"), "-3t + 2");
    }
}
