//! Sparse multivariate polynomials with rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::rational::{self, Rational};
use crate::error::{Error, Result};

pub type Exponents = Vec<u32>;

/// A polynomial in `arity` variables, stored as a map from exponent vectors
/// to nonzero coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    arity: usize,
    terms: BTreeMap<Exponents, Rational>,
}

impl MultiPoly {
    pub fn zero(arity: usize) -> Self {
        MultiPoly { arity, terms: BTreeMap::new() }
    }

    pub fn constant(arity: usize, c: Rational) -> Self {
        let mut p = Self::zero(arity);
        p.add_term(vec![0; arity], c);
        p
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, Rational::one())
    }

    /// The coordinate function `x_i`.
    pub fn var(arity: usize, i: usize) -> Self {
        assert!(i < arity, "variable {i} out of range for arity {arity}");
        let mut e = vec![0; arity];
        e[i] = 1;
        Self::monomial(e, Rational::one())
    }

    pub fn monomial(exps: Exponents, c: Rational) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    /// Builds from `(coefficient, exponents)` pairs, merging duplicates.
    pub fn from_terms<I>(arity: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Rational, Exponents)>,
    {
        let mut p = Self::zero(arity);
        for (c, e) in terms {
            if e.len() != arity {
                return Err(Error::Invalid(format!(
                    "exponent vector of length {} in a polynomial of arity {arity}",
                    e.len()
                )));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&vec![0; self.arity])
    }

    /// Some(c) when the polynomial is the constant `c`.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&k| k == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn add_term(&mut self, exps: Exponents, c: Rational) {
        debug_assert_eq!(exps.len(), self.arity);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.arity);
        }
        MultiPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.arity);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative(&self, var: usize) -> Result<Self> {
        if var >= self.arity {
            return Err(Error::IndexOutOfRange { index: var, arity: self.arity });
        }
        let mut out = Self::zero(self.arity);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut f = e.clone();
            f[var] -= 1;
            out.add_term(f, c * Rational::from_integer(e[var].into()));
        }
        Ok(out)
    }

    /// Antiderivative in `var` with no constant of integration.
    pub fn integrate(&self, var: usize) -> Result<Self> {
        if var >= self.arity {
            return Err(Error::IndexOutOfRange { index: var, arity: self.arity });
        }
        let mut out = Self::zero(self.arity);
        for (e, c) in &self.terms {
            let mut f = e.clone();
            f[var] += 1;
            let k = Rational::from_integer(f[var].into());
            out.add_term(f, c / k);
        }
        Ok(out)
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.arity);
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    m *= num_traits::pow(x.clone(), k as usize);
                }
            }
            acc += m;
        }
        acc
    }

    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.arity);
        let mut acc = Complex64::zero();
        for (e, c) in &self.terms {
            let mut m = Complex64::new(rational::to_f64(c), 0.0);
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    m *= x.powu(k);
                }
            }
            acc += m;
        }
        acc
    }

    /// Composes with `subs[i]` in place of variable `i`; the result has the
    /// arity of the substituted polynomials.
    pub fn substitute(&self, subs: &[MultiPoly]) -> Result<Self> {
        if subs.len() != self.arity {
            return Err(Error::Invalid(format!(
                "substitution of {} polynomials into arity {}",
                subs.len(),
                self.arity
            )));
        }
        let target = subs.first().map_or(0, |p| p.arity);
        if subs.iter().any(|p| p.arity != target) {
            return Err(Error::Invalid("substituted polynomials differ in arity".into()));
        }
        // Cache powers per variable.
        let mut powers: Vec<Vec<MultiPoly>> = subs.iter().map(|p| vec![MultiPoly::one(p.arity), p.clone()]).collect();
        let mut out = MultiPoly::zero(target);
        for (e, c) in &self.terms {
            let mut m = MultiPoly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                let k = k as usize;
                while powers[i].len() <= k {
                    let next = &powers[i][powers[i].len() - 1] * &subs[i];
                    powers[i].push(next);
                }
                if k > 0 {
                    m = &m * &powers[i][k];
                }
            }
            out = &out + &m;
        }
        Ok(out)
    }

    /// Re-embeds into a ring with more variables (new ones appended).
    pub fn extend_arity(&self, arity: usize) -> Self {
        assert!(arity >= self.arity);
        MultiPoly {
            arity,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut f = e.clone();
                    f.resize(arity, 0);
                    (f, c.clone())
                })
                .collect(),
        }
    }

    /// Drops every monomial of total degree at most `deg`.
    pub fn without_degree_at_most(&self, deg: u32) -> Self {
        MultiPoly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() > deg)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Keeps only monomials of total degree at most `deg`.
    pub fn degree_at_most(&self, deg: u32) -> Self {
        MultiPoly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() <= deg)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn depends_on(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e[var] > 0)
    }

    /// Any nonzero coefficient, useful for proportionality tests.
    pub fn leading(&self) -> Option<(&Exponents, &Rational)> {
        self.terms.iter().next_back()
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*t{}", i + 1)?,
                    _ => write!(f, "*t{}^{}", i + 1, k)?,
                }
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.arity, rhs.arity, "arity mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.arity, rhs.arity, "arity mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.arity, rhs.arity, "arity mismatch");
        let mut out = MultiPoly::zero(self.arity);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $m(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $m(self, rhs: &MultiPoly) -> MultiPoly {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};

    fn t(arity: usize, i: usize) -> MultiPoly {
        MultiPoly::var(arity, i)
    }

    #[test]
    fn partial_derivative_of_monomial() {
        // d/dt1 (t1^2 t2) = 2 t1 t2
        let p = &(&t(2, 0) * &t(2, 0)) * &t(2, 1);
        let d = p.derivative(0).unwrap();
        assert_eq!(d, (&t(2, 0) * &t(2, 1)).scale(&int(2)));
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let c = MultiPoly::constant(2, rat(5, 3));
        assert!(c.derivative(1).unwrap().is_zero());
    }

    #[test]
    fn derivative_index_out_of_range() {
        let p = t(2, 0);
        assert_eq!(p.derivative(2), Err(Error::IndexOutOfRange { index: 2, arity: 2 }));
    }

    #[test]
    fn integrate_inverts_derivative() {
        let p = &(&t(3, 0) * &t(3, 2)) + &MultiPoly::constant(3, int(4));
        let q = p.integrate(2).unwrap();
        assert_eq!(q.derivative(2).unwrap(), p);
    }

    #[test]
    fn substitution_composes() {
        // p(x, y) = x*y, substitute x = a + b, y = a - b  ->  a^2 - b^2
        let p = &t(2, 0) * &t(2, 1);
        let a = t(2, 0);
        let b = t(2, 1);
        let q = p.substitute(&[&a + &b, &a - &b]).unwrap();
        assert_eq!(q, &(&a * &a) - &(&b * &b));
    }

    #[test]
    fn cancellation_leaves_no_zero_terms() {
        let p = &t(2, 0) - &t(2, 0);
        assert!(p.is_zero());
        assert_eq!(p.len(), 0);
    }

    #[test]
    fn evaluation() {
        let p = &(&t(2, 0) * &t(2, 0)) + &t(2, 1).scale(&rat(1, 2));
        assert_eq!(p.eval(&[int(3), int(4)]), int(11));
        let z = p.eval_complex(&[Complex64::new(0.0, 1.0), Complex64::new(2.0, 0.0)]);
        assert!((z - Complex64::new(0.0, 0.0)).norm() < 1e-15);
    }
}
