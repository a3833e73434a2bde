//! Truncated series `Σ_k P_k(t) e^{k t'}` with polynomial coefficients.
//!
//! One coordinate (the *marker variable* `t'`) may appear both polynomially
//! and through the formal markers `e^{k t'}`, `0 <= k <= K`. A series without a
//! marker variable is just a polynomial, which lets every chart operation run
//! on a single type.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::poly::MultiPoly;
use super::rational::Rational;
use crate::error::{Error, Result};

#[derive(Clone)]
pub struct ExpSeries {
    arity: usize,
    marker: Option<usize>,
    truncation: u32,
    terms: BTreeMap<u32, MultiPoly>,
    truncated: bool,
}

impl PartialEq for ExpSeries {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.terms == other.terms
    }
}

impl Eq for ExpSeries {}

impl From<MultiPoly> for ExpSeries {
    fn from(p: MultiPoly) -> Self {
        ExpSeries::from_poly(p)
    }
}

impl ExpSeries {
    pub fn from_poly(p: MultiPoly) -> Self {
        let arity = p.arity();
        let mut terms = BTreeMap::new();
        if !p.is_zero() {
            terms.insert(0, p);
        }
        ExpSeries { arity, marker: None, truncation: 0, terms, truncated: false }
    }

    pub fn zero(arity: usize) -> Self {
        ExpSeries { arity, marker: None, truncation: 0, terms: BTreeMap::new(), truncated: false }
    }

    /// Empty series in `arity` coordinates with marker variable `marker` and
    /// truncation degree `truncation`.
    pub fn with_marker(arity: usize, marker: usize, truncation: u32) -> Result<Self> {
        if marker >= arity {
            return Err(Error::IndexOutOfRange { index: marker, arity });
        }
        Ok(ExpSeries { arity, marker: Some(marker), truncation, terms: BTreeMap::new(), truncated: false })
    }

    /// Same marker layout as `self`, no terms.
    pub fn zero_like(&self) -> Self {
        ExpSeries { terms: BTreeMap::new(), truncated: false, ..self.clone() }
    }

    pub fn constant_like(&self, c: Rational) -> Self {
        let mut s = self.zero_like();
        s.add_marker_term(0, MultiPoly::constant(self.arity, c));
        s
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn marker(&self) -> Option<usize> {
        self.marker
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    /// Whether any arithmetic on this value (or its inputs) dropped terms
    /// beyond the truncation degree.
    pub fn was_truncated(&self) -> bool {
        self.truncated
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|&k| k == 0)
    }

    pub fn markers(&self) -> impl Iterator<Item = (u32, &MultiPoly)> {
        self.terms.iter().map(|(k, p)| (*k, p))
    }

    pub fn marker_coeff(&self, k: u32) -> MultiPoly {
        self.terms.get(&k).cloned().unwrap_or_else(|| MultiPoly::zero(self.arity))
    }

    /// The marker-free part as a polynomial.
    pub fn polynomial_part(&self) -> MultiPoly {
        self.marker_coeff(0)
    }

    /// Adds `p · e^{k t'}`; terms past the truncation degree are dropped and
    /// flagged.
    pub fn add_marker_term(&mut self, k: u32, p: MultiPoly) {
        assert_eq!(p.arity(), self.arity, "arity mismatch");
        if p.is_zero() {
            return;
        }
        if k > 0 {
            assert!(self.marker.is_some(), "marker term in a series without marker variable");
            if k > self.truncation {
                self.truncated = true;
                return;
            }
        }
        let entry = self.terms.entry(k).or_insert_with(|| MultiPoly::zero(p.arity()));
        *entry = &*entry + &p;
        if entry.is_zero() {
            self.terms.remove(&k);
        }
    }

    fn meta(a: &Self, b: &Self) -> (Option<usize>, u32) {
        assert_eq!(a.arity, b.arity, "arity mismatch");
        match (a.marker, b.marker) {
            (None, None) => (None, 0),
            (Some(m), None) => (Some(m), a.truncation),
            (None, Some(m)) => (Some(m), b.truncation),
            (Some(m), Some(n)) => {
                assert_eq!(m, n, "series with different marker variables");
                (Some(m), a.truncation.min(b.truncation))
            }
        }
    }

    fn empty_meta(arity: usize, meta: (Option<usize>, u32), truncated: bool) -> Self {
        ExpSeries { arity, marker: meta.0, truncation: meta.1, terms: BTreeMap::new(), truncated }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = self.zero_like();
        out.truncated = self.truncated;
        for (k, p) in &self.terms {
            out.add_marker_term(*k, p.scale(c));
        }
        out
    }

    pub fn mul_poly(&self, p: &MultiPoly) -> Self {
        let mut out = self.zero_like();
        out.truncated = self.truncated;
        for (k, q) in &self.terms {
            out.add_marker_term(*k, q * p);
        }
        out
    }

    pub fn derivative(&self, var: usize) -> Result<Self> {
        if var >= self.arity {
            return Err(Error::IndexOutOfRange { index: var, arity: self.arity });
        }
        let mut out = self.zero_like();
        out.truncated = self.truncated;
        for (&k, p) in &self.terms {
            let mut d = p.derivative(var)?;
            if Some(var) == self.marker && k > 0 {
                d = &d + &p.scale(&Rational::from_integer(k.into()));
            }
            out.add_marker_term(k, d);
        }
        Ok(out)
    }

    /// Antiderivative in `var` without constant of integration. For the marker
    /// variable, `∫ P e^{kt'} dt' = e^{kt'} Σ_j (-1)^j ∂^j P / k^{j+1}`.
    pub fn integrate(&self, var: usize) -> Result<Self> {
        if var >= self.arity {
            return Err(Error::IndexOutOfRange { index: var, arity: self.arity });
        }
        let mut out = self.zero_like();
        out.truncated = self.truncated;
        for (&k, p) in &self.terms {
            if Some(var) == self.marker && k > 0 {
                let kk = Rational::from_integer(k.into());
                let mut factor = Rational::one() / &kk;
                let mut d = p.clone();
                let mut acc = MultiPoly::zero(self.arity);
                while !d.is_zero() {
                    acc = &acc + &d.scale(&factor);
                    factor = -factor / &kk;
                    d = d.derivative(var)?;
                }
                out.add_marker_term(k, acc);
            } else {
                out.add_marker_term(k, p.integrate(var)?);
            }
        }
        Ok(out)
    }

    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::zero();
        for (&k, p) in &self.terms {
            let v = p.eval_complex(point);
            if k == 0 {
                acc += v;
            } else {
                let m = self.marker.expect("marker term without marker variable");
                acc += v * (point[m] * k as f64).exp();
            }
        }
        acc
    }

    pub fn extend_arity(&self, arity: usize) -> Self {
        ExpSeries {
            arity,
            marker: self.marker,
            truncation: self.truncation,
            terms: self.terms.iter().map(|(k, p)| (*k, p.extend_arity(arity))).collect(),
            truncated: self.truncated,
        }
    }

    /// Removes monomials of total degree `<= deg` from the marker-free part.
    pub fn without_low_degree(&self, deg: u32) -> Self {
        let mut out = self.clone();
        if let Some(p) = self.terms.get(&0) {
            let q = p.without_degree_at_most(deg);
            if q.is_zero() {
                out.terms.remove(&0);
            } else {
                out.terms.insert(0, q);
            }
        }
        out
    }

    /// True when the series is a polynomial of total degree at most `deg`.
    pub fn is_polynomial_of_degree_at_most(&self, deg: u32) -> bool {
        self.is_polynomial() && self.polynomial_part().total_degree().is_none_or(|d| d <= deg)
    }

    /// The constant and linear parts of the marker-free term.
    pub fn affine_part(&self) -> MultiPoly {
        self.polynomial_part().degree_at_most(1)
    }

    /// Number of stored monomials across all markers.
    pub fn len(&self) -> usize {
        self.terms.values().map(MultiPoly::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Debug for ExpSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ExpSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, p) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if *k == 0 {
                write!(f, "({p})")?;
            } else {
                write!(f, "({p})*e^({k}*t{})", self.marker.map_or(0, |m| m + 1))?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a ExpSeries> for &'a ExpSeries {
    type Output = ExpSeries;
    fn add(self, rhs: &ExpSeries) -> ExpSeries {
        let meta = ExpSeries::meta(self, rhs);
        let mut out = ExpSeries::empty_meta(self.arity, meta, self.truncated || rhs.truncated);
        for (k, p) in self.terms.iter().chain(rhs.terms.iter()) {
            out.add_marker_term(*k, p.clone());
        }
        out
    }
}

impl<'a> Sub<&'a ExpSeries> for &'a ExpSeries {
    type Output = ExpSeries;
    fn sub(self, rhs: &ExpSeries) -> ExpSeries {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a ExpSeries> for &'a ExpSeries {
    type Output = ExpSeries;
    fn mul(self, rhs: &ExpSeries) -> ExpSeries {
        let meta = ExpSeries::meta(self, rhs);
        let mut out = ExpSeries::empty_meta(self.arity, meta, self.truncated || rhs.truncated);
        for (ka, pa) in &self.terms {
            for (kb, pb) in &rhs.terms {
                let k = ka + kb;
                if k > 0 && k > out.truncation {
                    out.truncated = true;
                    continue;
                }
                out.add_marker_term(k, pa * pb);
            }
        }
        out
    }
}

impl Neg for &ExpSeries {
    type Output = ExpSeries;
    fn neg(self) -> ExpSeries {
        self.scale(&-Rational::one())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<ExpSeries> for ExpSeries {
            type Output = ExpSeries;
            fn $m(self, rhs: ExpSeries) -> ExpSeries {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a ExpSeries> for ExpSeries {
            type Output = ExpSeries;
            fn $m(self, rhs: &ExpSeries) -> ExpSeries {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for ExpSeries {
    type Output = ExpSeries;
    fn neg(self) -> ExpSeries {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    #[test]
    fn marker_derivative_rule() {
        // d/dt' (e^{2t'} t3) = 2 e^{2t'} t3
        let mut s = ExpSeries::with_marker(3, 1, 4).unwrap();
        s.add_marker_term(2, MultiPoly::var(3, 2));
        let d = s.derivative(1).unwrap();
        let mut expected = s.zero_like();
        expected.add_marker_term(2, MultiPoly::var(3, 2).scale(&int(2)));
        assert_eq!(d, expected);
    }

    #[test]
    fn marker_integration_inverts_derivative() {
        // P = t2^2 t1, k = 3
        let mut s = ExpSeries::with_marker(2, 1, 5).unwrap();
        let t2 = MultiPoly::var(2, 1);
        s.add_marker_term(3, &(&t2 * &t2) * &MultiPoly::var(2, 0));
        s.add_marker_term(0, t2.clone());
        let back = s.integrate(1).unwrap().derivative(1).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn product_saturates_and_flags() {
        let mut s = ExpSeries::with_marker(1, 0, 2).unwrap();
        s.add_marker_term(2, MultiPoly::one(1));
        assert!(!s.was_truncated());
        let sq = &s * &s;
        assert!(sq.is_zero());
        assert!(sq.was_truncated());
    }

    #[test]
    fn evaluates_markers() {
        let mut s = ExpSeries::with_marker(1, 0, 2).unwrap();
        s.add_marker_term(1, MultiPoly::one(1));
        let v = s.eval_complex(&[Complex64::new(0.5, 0.0)]);
        assert!((v.re - 0.5f64.exp()).abs() < 1e-15);
    }
}
