//! Univariate polynomials with parametric coefficients, expansions at
//! `x = ∞`, residues there, and the root expansion `x(k)` of `k^m = f(x)`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::poly::MultiPoly;
use super::rational::Rational;
use crate::error::{Error, Result};

/// Largest order accepted by [`puiseux_root_expansion`].
pub const MAX_ROOT_ORDER: usize = 64;

/// `Σ_j a_j(s) x^j` with coefficients in `arity` parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly {
    arity: usize,
    coeffs: Vec<MultiPoly>,
}

impl UPoly {
    pub fn new(arity: usize, mut coeffs: Vec<MultiPoly>) -> Self {
        assert!(coeffs.iter().all(|c| c.arity() == arity), "coefficient arity mismatch");
        while coeffs.last().is_some_and(MultiPoly::is_zero) {
            coeffs.pop();
        }
        UPoly { arity, coeffs }
    }

    pub fn zero(arity: usize) -> Self {
        UPoly { arity, coeffs: Vec::new() }
    }

    pub fn monomial(arity: usize, deg: usize, c: MultiPoly) -> Self {
        let mut coeffs = vec![MultiPoly::zero(arity); deg + 1];
        coeffs[deg] = c;
        Self::new(arity, coeffs)
    }

    /// Splits `p` by the powers of its variable `var`; the remaining
    /// variables (in order) become parameters.
    pub fn from_multipoly(p: &MultiPoly, var: usize) -> Result<Self> {
        if var >= p.arity() {
            return Err(Error::IndexOutOfRange { index: var, arity: p.arity() });
        }
        let arity = p.arity() - 1;
        let mut coeffs: Vec<MultiPoly> = Vec::new();
        for (e, c) in p.terms() {
            let d = e[var] as usize;
            if coeffs.len() <= d {
                coeffs.resize(d + 1, MultiPoly::zero(arity));
            }
            let mut rest = e.clone();
            rest.remove(var);
            coeffs[d].add_term(rest, c.clone());
        }
        Ok(Self::new(arity, coeffs))
    }

    /// Univariate polynomial with rational coefficients.
    pub fn from_rationals(coeffs: &[Rational]) -> Self {
        Self::new(0, coeffs.iter().map(|c| MultiPoly::constant(0, c.clone())).collect())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, j: usize) -> MultiPoly {
        self.coeffs.get(j).cloned().unwrap_or_else(|| MultiPoly::zero(self.arity))
    }

    pub fn coeffs(&self) -> &[MultiPoly] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&MultiPoly> {
        self.coeffs.last()
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| c.scale(&Rational::from_integer(j.into())))
            .collect();
        Self::new(self.arity, coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.arity, other.arity, "arity mismatch");
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.arity);
        }
        let mut coeffs = vec![MultiPoly::zero(self.arity); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        Self::new(self.arity, coeffs)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.arity, other.arity, "arity mismatch");
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(self.arity, (0..n).map(|j| &self.coeff(j) + &other.coeff(j)).collect())
    }

    pub fn eval(&self, x: &Rational, params: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.eval(params);
        }
        acc
    }

    /// Laurent expansion of `self / den` at `x = ∞`: the `terms` leading
    /// coefficients, starting from `x^{deg self − deg den}`. The leading
    /// coefficient of `den` must be a nonzero constant.
    pub fn expand_ratio_at_infinity(&self, den: &Self, terms: usize) -> Result<LaurentTail> {
        assert_eq!(self.arity, den.arity, "arity mismatch");
        let q = den.degree().ok_or(Error::DivisionByZero)?;
        let lead = den.coeffs[q].as_constant().filter(|c| !c.is_zero()).ok_or_else(|| {
            Error::Invalid("denominator leading coefficient must be a nonzero constant".into())
        })?;
        let lead_inv = Rational::one() / lead;
        let Some(p) = self.degree() else {
            return Ok(LaurentTail { arity: self.arity, terms: BTreeMap::new(), valid_above: i64::MIN });
        };
        let top = p as i64 - q as i64;
        // Remainder stored by exponent; each step eliminates its current top term.
        let mut rem: BTreeMap<i64, MultiPoly> =
            self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(j, c)| (j as i64, c.clone())).collect();
        let mut out = BTreeMap::new();
        for step in 0..terms as i64 {
            let e = top - step;
            let Some(c) = rem.remove(&(e + q as i64)) else { continue };
            let quot = c.scale(&lead_inv);
            for (j, dj) in den.coeffs.iter().enumerate().take(q) {
                if dj.is_zero() {
                    continue;
                }
                let k = e + j as i64;
                let entry = rem.entry(k).or_insert_with(|| MultiPoly::zero(self.arity));
                *entry = &*entry - &(&quot * dj);
                if entry.is_zero() {
                    rem.remove(&k);
                }
            }
            out.insert(e, quot);
        }
        Ok(LaurentTail { arity: self.arity, terms: out, valid_above: top - terms as i64 })
    }
}

/// Expansion at `x = ∞` known exactly for exponents `> valid_above`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentTail {
    arity: usize,
    terms: BTreeMap<i64, MultiPoly>,
    valid_above: i64,
}

impl LaurentTail {
    pub fn coeff(&self, e: i64) -> Option<MultiPoly> {
        if e <= self.valid_above {
            return None;
        }
        Some(self.terms.get(&e).cloned().unwrap_or_else(|| MultiPoly::zero(self.arity)))
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &MultiPoly)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    /// Exponents at or below this value were not computed.
    pub fn truncation(&self) -> i64 {
        self.valid_above
    }
}

/// `res_{x=∞}(num/den) = −[x^{−1}]`, with polynomial dependence on the
/// parameters. `order_hint` is the number of expansion terms to compute.
pub fn residue_at_infinity_param(num: &UPoly, den: &UPoly, order_hint: usize) -> Result<MultiPoly> {
    let q = den.degree().ok_or(Error::DivisionByZero)?;
    let Some(p) = num.degree() else { return Ok(MultiPoly::zero(num.arity())) };
    let top = p as i64 - q as i64;
    if top < -1 {
        return Ok(MultiPoly::zero(num.arity()));
    }
    let needed = (top + 2) as usize;
    if order_hint < needed {
        return Err(Error::InsufficientOrder { hint: order_hint, needed });
    }
    let tail = num.expand_ratio_at_infinity(den, needed)?;
    let c = tail.coeff(-1).expect("x^-1 lies inside the computed range");
    Ok(-c)
}

/// Residue at infinity of a ratio of univariate polynomials (arity-1
/// [`MultiPoly`] values).
pub fn residue_at_infinity(num: &MultiPoly, den: &MultiPoly, order_hint: usize) -> Result<Rational> {
    for p in [num, den] {
        if p.arity() != 1 {
            return Err(Error::Invalid(format!("expected a univariate polynomial, got arity {}", p.arity())));
        }
    }
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let n = UPoly::from_multipoly(num, 0)?;
    let d = UPoly::from_multipoly(den, 0)?;
    let lead = d.leading().and_then(MultiPoly::as_constant).expect("constant leading coefficient");
    // Rescale so the leading coefficient is one; the residue is linear.
    let inv = Rational::one() / &lead;
    let d = UPoly::new(0, d.coeffs().iter().map(|c| c.scale(&inv)).collect());
    let r = residue_at_infinity_param(&n, &d, order_hint)?;
    Ok(r.constant_term() * inv)
}

/// `x(k) = k + Σ_{j<order} c_j k^{−j}` solving `k^m = f(x)` near `x = ∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootExpansion {
    degree: usize,
    arity: usize,
    coeffs: Vec<MultiPoly>,
}

impl RootExpansion {
    /// `c_j`, the coefficient of `k^{−j}`.
    pub fn coeff(&self, j: usize) -> &MultiPoly {
        &self.coeffs[j]
    }

    pub fn coeffs(&self) -> &[MultiPoly] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// `x(k)` as a Laurent polynomial in `k`, keyed by exponent.
    pub fn as_laurent(&self) -> BTreeMap<i64, MultiPoly> {
        let mut x = BTreeMap::new();
        x.insert(1, MultiPoly::one(self.arity));
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let e = -(j as i64);
                let entry = x.entry(e).or_insert_with(|| MultiPoly::zero(self.arity));
                *entry = &*entry + c;
            }
        }
        x.retain(|_, c| !c.is_zero());
        x
    }

    /// `f(x(k)) − k^m`, kept for exponents `>= floor`.
    pub fn remainder(&self, f: &UPoly, floor: i64) -> BTreeMap<i64, MultiPoly> {
        let mut r = compose_laurent(f, &self.as_laurent(), floor, self.arity);
        let m = self.degree as i64;
        let entry = r.entry(m).or_insert_with(|| MultiPoly::zero(self.arity));
        *entry = &*entry - &MultiPoly::one(self.arity);
        r.retain(|_, c| !c.is_zero());
        r
    }
}

type Laurent = BTreeMap<i64, MultiPoly>;

fn laurent_mul(a: &Laurent, b: &Laurent, floor: i64, arity: usize) -> Laurent {
    let mut out = Laurent::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = ea + eb;
            if e < floor {
                continue;
            }
            let entry = out.entry(e).or_insert_with(|| MultiPoly::zero(arity));
            *entry = &*entry + &(ca * cb);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `f(x)` for a Laurent polynomial `x`, dropping exponents below `floor`
/// (valid because every factor has top exponent at most 1 and Horner
/// multiplications only lower exponents past the floor).
fn compose_laurent(f: &UPoly, x: &Laurent, floor: i64, arity: usize) -> Laurent {
    let mut acc = Laurent::new();
    for (i, c) in f.coeffs().iter().enumerate().rev() {
        // Remaining multiplications by x can raise exponents by at most i.
        let local_floor = floor - i as i64;
        acc = laurent_mul(&acc, x, local_floor, arity);
        if !c.is_zero() {
            let entry = acc.entry(0).or_insert_with(|| MultiPoly::zero(arity));
            *entry = &*entry + c;
        }
        acc.retain(|_, c| !c.is_zero());
    }
    acc
}

/// Solves `k^m = f(x)` for `x = k + c_0 + c_1/k + …` with `order` terms `c_j`.
pub fn puiseux_root_expansion(f: &UPoly, order: usize) -> Result<RootExpansion> {
    let m = f.degree().ok_or(Error::NotMonic)?;
    if !f.leading().and_then(MultiPoly::as_constant).is_some_and(|c| c.is_one()) {
        return Err(Error::NotMonic);
    }
    if m < 2 {
        return Err(Error::Invalid(format!("root expansion needs degree at least 2, got {m}")));
    }
    if order == 0 {
        return Err(Error::Invalid("order must be at least 1".into()));
    }
    if order > MAX_ROOT_ORDER {
        return Err(Error::OrderTooLarge(order));
    }
    let arity = f.arity();
    let mi = m as i64;
    let inv_m = Rational::one() / Rational::from_integer(m.into());
    let mut exp = RootExpansion { degree: m, arity, coeffs: Vec::with_capacity(order) };
    for j in 0..order {
        // c_j is fixed by the k^{m-1-j} coefficient of f(x) − k^m.
        let target = mi - 1 - j as i64;
        let r = exp.remainder(f, target);
        let c = r.get(&target).cloned().unwrap_or_else(|| MultiPoly::zero(arity));
        exp.coeffs.push(c.scale(&-inv_m.clone()));
    }
    Ok(exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};

    fn uni(coeffs: &[i64]) -> MultiPoly {
        let mut p = MultiPoly::zero(1);
        for (j, c) in coeffs.iter().enumerate() {
            p.add_term(vec![j as u32], int(*c));
        }
        p
    }

    #[test]
    fn residue_examples() {
        assert_eq!(residue_at_infinity(&uni(&[1]), &uni(&[0, 1]), 4).unwrap(), int(-1));
        assert_eq!(residue_at_infinity(&uni(&[1]), &uni(&[0, 0, 3]), 4).unwrap(), int(0));
        assert_eq!(residue_at_infinity(&uni(&[0, 1]), &uni(&[1, 0, 1]), 4).unwrap(), int(-1));
        assert_eq!(residue_at_infinity(&uni(&[0, 0, 2]), &uni(&[0, 1, 0, 2]), 4).unwrap(), int(-1));
    }

    #[test]
    fn residue_reports_insufficient_order() {
        let err = residue_at_infinity(&uni(&[0, 0, 0, 1]), &uni(&[1, 1]), 1).unwrap_err();
        assert_eq!(err, Error::InsufficientOrder { hint: 1, needed: 4 });
        assert!(residue_at_infinity(&uni(&[1]), &MultiPoly::zero(1), 3).is_err());
    }

    #[test]
    fn residue_matches_remainder_oracle() {
        // x^5 / (x^2 + 2x + 3): res_∞ = −[x^{q−1}] (x^5 mod den) / lead
        let num = uni(&[0, 0, 0, 0, 0, 1]);
        let den = uni(&[3, 2, 1]);
        let mut rem = [int(0), int(0), int(0), int(0), int(0), int(1)];
        for top in (2..rem.len()).rev() {
            let c = rem[top].clone();
            rem[top] -= &c;
            rem[top - 1] -= &c * int(2);
            rem[top - 2] -= &c * int(3);
        }
        let expected = -rem[1].clone();
        assert_eq!(residue_at_infinity(&num, &den, 10).unwrap(), expected);
    }

    #[test]
    fn root_expansion_examples() {
        // f = x^2
        let f = UPoly::from_rationals(&[int(0), int(0), int(1)]);
        let e = puiseux_root_expansion(&f, 1).unwrap();
        assert!(e.coeff(0).is_zero());

        // f = x^2 + s: x = k − s/(2k)
        let f = UPoly::new(1, vec![MultiPoly::var(1, 0), MultiPoly::zero(1), MultiPoly::one(1)]);
        let e = puiseux_root_expansion(&f, 2).unwrap();
        assert!(e.coeff(0).is_zero());
        assert_eq!(e.coeff(1), &MultiPoly::var(1, 0).scale(&rat(-1, 2)));

        // f = x^3 + s1 x + s2
        let f = UPoly::new(2, vec![MultiPoly::var(2, 1), MultiPoly::var(2, 0), MultiPoly::zero(2), MultiPoly::one(2)]);
        let e = puiseux_root_expansion(&f, 3).unwrap();
        assert!(e.coeff(0).is_zero());
        assert_eq!(e.coeff(1), &MultiPoly::var(2, 0).scale(&rat(-1, 3)));
        assert_eq!(e.coeff(2), &MultiPoly::var(2, 1).scale(&rat(-1, 3)));
        // remainder starts strictly below k^{m-1-order}
        let r = e.remainder(&f, -20);
        assert!(r.keys().all(|&k| k < 3 - 1 - 3 + 1));
    }

    #[test]
    fn root_expansion_errors() {
        let f = UPoly::from_rationals(&[int(0), int(0), int(2)]);
        assert_eq!(puiseux_root_expansion(&f, 2).unwrap_err(), Error::NotMonic);
        let f = UPoly::from_rationals(&[int(0), int(0), int(1)]);
        assert_eq!(puiseux_root_expansion(&f, 65).unwrap_err(), Error::OrderTooLarge(65));
    }
}
