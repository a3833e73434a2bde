//! Monodromy data `(η, μ, R, S, C)`, the P^d Stokes and central connection
//! matrices, and the braid group action.

pub mod braid;
pub mod mp;

pub use braid::{
    braid_act, braid_move, braid_orbit, braid_word, canonicalize, equal_mod_signs, monodromy_char_poly, parse_word,
    BraidGenerator, BraidMove, BraidOrbit, OrbitEntry,
};
pub use mp::{MpComplex, MpMatrix, Precision};

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::Zero;

use crate::algebra::rational::Rational;
use crate::algebra::QMatrix;
use crate::error::{Error, Result};
use crate::quantum::pd_classical_data;
use mp::{mp_from_rational_matrix, mp_matmul, mp_transpose};

/// `s_{ij} = binom(d+1, j−i)`.
pub fn pd_stokes(d: usize) -> Result<QMatrix> {
    if d == 0 {
        return Err(Error::Invalid("dimension d must be at least 1".into()));
    }
    let n = d + 1;
    Ok(QMatrix::from_fn(n, n, |i, j| {
        if i <= j {
            Rational::from_integer(binomial(BigInt::from(d + 1), BigInt::from(j - i)))
        } else {
            Rational::zero()
        }
    }))
}

/// Gram matrix `χ(O(i−1), O(j−1)) = binom(d+j−i, d)`, the Stokes matrix
/// matching the `C″` columns `ch O(j−1)`.
pub fn pd_gram_stokes(d: usize) -> Result<QMatrix> {
    if d == 0 {
        return Err(Error::Invalid("dimension d must be at least 1".into()));
    }
    let n = d + 1;
    Ok(QMatrix::from_fn(n, n, |i, j| {
        if i <= j {
            Rational::from_integer(binomial(BigInt::from(d + j - i), BigInt::from(d)))
        } else {
            Rational::zero()
        }
    }))
}

/// Scalar in front of `C′`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Prefactor {
    /// `(−1)^{d+1} i^{1−d̄} / (2π)^{d/2}`, normalized so `Cᵀηe^{πiμ}e^{πiR}C = S`.
    #[default]
    Normalized,
    /// `(−1)^{d+1} / ((2π)^{(d+1)/2} i^{d̄})`, giving `−S/(2π)` instead.
    Unnormalized,
}

#[derive(Clone, Debug)]
pub struct PdConnectionData {
    pub d: usize,
    pub precision: Precision,
    pub prefactor: Prefactor,
    /// `A_0(d) = 1, …, A_d(d)`.
    pub a: Vec<MpComplex>,
    pub c_prime: MpMatrix,
    pub c_double: MpMatrix,
    pub c: MpMatrix,
}

fn parity_bar(d: usize) -> i64 {
    if d.is_multiple_of(2) {
        1
    } else {
        0
    }
}

/// `(2π)^{h/2}` as a fixed-point real.
fn two_pi_half_power(h: usize, p: &Precision) -> Result<BigInt> {
    let two_pi = p.pi() * 2;
    let mut acc = p.one();
    for _ in 0..h / 2 {
        acc = p.mul(&acc, &two_pi);
    }
    if h % 2 == 1 {
        acc = p.mul(&acc, &p.sqrt(&two_pi)?);
    }
    Ok(acc)
}

/// Laurent coefficients of `(−1)^{d+1}Γ^{d+1}(−x)e^{−πi d̄ x}` at `x = 0`.
pub fn pd_laurent_coefficients(d: usize, p: &Precision) -> Result<Vec<MpComplex>> {
    let db = parity_bar(d);
    let pi = p.pi();
    let k1 = BigInt::from(d + 1);
    // L_1 = (d+1)γ − πi d̄, L_m = (d+1)ζ(m)/m.
    let mut l = vec![MpComplex::zero(); d + 1];
    if d >= 1 {
        l[1] = MpComplex { re: p.euler_gamma() * &k1, im: -(&pi * db) };
    }
    for (m, lm) in l.iter_mut().enumerate().skip(2) {
        *lm = MpComplex::real(p.zeta(m as u32)? * &k1).div_int(m as i64);
    }
    let mut a = vec![MpComplex::real(p.one())];
    for k in 1..=d {
        let mut acc = MpComplex::zero();
        for j in 1..=k {
            acc = acc.add(&l[j].mul(&a[k - j], p).scale(&p.from_int(j as i64), p));
        }
        a.push(acc.div_int(k as i64));
    }
    Ok(a)
}

pub fn pd_connection(d: usize, precision: Precision, prefactor: Prefactor) -> Result<PdConnectionData> {
    if d == 0 {
        return Err(Error::Invalid("dimension d must be at least 1".into()));
    }
    if precision.digits < 12 {
        return Err(Error::Precision(format!(
            "{} digits cannot support the 1e-8 compatibility check; use at least 12",
            precision.digits
        )));
    }
    let p = &precision;
    let n = d + 1;
    let a = pd_laurent_coefficients(d, p)?;
    let db = parity_bar(d);
    let sign_pow = if d % 2 == 1 { 0 } else { 2 };
    let (i_pow, h) = match prefactor {
        Prefactor::Normalized => (1 - db, d),
        Prefactor::Unnormalized => (-db, d + 1),
    };
    let denom = two_pi_half_power(h, p)?;
    let lambda = MpComplex::real(p.div(&p.one(), &denom)?).mul_i_pow(i_pow + sign_pow);
    let c_prime: MpMatrix = (0..n)
        .map(|al| (0..n).map(|b| if al >= b { lambda.mul(&a[al - b], p) } else { MpComplex::zero() }).collect())
        .collect();
    let pi = p.pi();
    let c_double: MpMatrix = (0..n)
        .map(|b| {
            (0..n)
                .map(|j| {
                    // [2πi j]^b / b!, 0-based
                    let base = MpComplex { re: BigInt::zero(), im: &pi * BigInt::from(2 * j) };
                    let mut acc = MpComplex::real(p.one());
                    for k in 1..=b {
                        acc = acc.mul(&base, p).div_int(k as i64);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let c = mp_matmul(&c_prime, &c_double, p);
    Ok(PdConnectionData { d, precision, prefactor, a, c_prime, c_double, c })
}

/// `(V, ⟨,⟩, μ, R, e₁, S, C)`.
#[derive(Clone, Debug)]
pub struct MonodromyData {
    pub n: usize,
    pub eta: QMatrix,
    /// Diagonal.
    pub mu: QMatrix,
    pub r: QMatrix,
    pub e1: usize,
    pub s: QMatrix,
    pub c: MpMatrix,
    pub precision: Precision,
}

impl MonodromyData {
    pub fn new(eta: QMatrix, mu: QMatrix, r: QMatrix, e1: usize, s: QMatrix, c: MpMatrix, precision: Precision) -> Result<Self> {
        let n = eta.rows();
        let square = |m: &QMatrix| m.rows() == n && m.cols() == n;
        if !(square(&eta) && square(&mu) && square(&r) && square(&s)) {
            return Err(Error::Invalid(format!("η, μ, R, S must all be {n}×{n}")));
        }
        if c.len() != n || c.iter().any(|row| row.len() != n) {
            return Err(Error::Invalid(format!("C must be {n}×{n}")));
        }
        if e1 >= n {
            return Err(Error::IndexOutOfRange { index: e1, arity: n });
        }
        if !eta.is_symmetric() || eta.det()?.is_zero() {
            return Err(Error::Invalid("⟨,⟩ must be symmetric and nondegenerate".into()));
        }
        if (0..n).any(|i| (0..n).any(|j| i != j && !mu[(i, j)].is_zero())) {
            return Err(Error::Invalid("μ must be given in diagonal form".into()));
        }
        if !(&(&mu.transpose() * &eta) + &(&eta * &mu)).is_zero() {
            return Err(Error::Invalid("μ must be skew with respect to ⟨,⟩".into()));
        }
        if !r.pow(n as u32)?.is_zero() {
            return Err(Error::Invalid("R must be nilpotent".into()));
        }
        if !s.is_unit_upper_triangular() {
            return Err(Error::Invalid("S must be unit upper triangular".into()));
        }
        Ok(MonodromyData { n, eta, mu, r, e1, s, c, precision })
    }

    /// The P^d tuple with the requested Stokes form.
    pub fn pd(d: usize, precision: Precision, prefactor: Prefactor, gram_stokes: bool) -> Result<Self> {
        let cl = pd_classical_data(d)?;
        let s = if gram_stokes { pd_gram_stokes(d)? } else { pd_stokes(d)? };
        let c = pd_connection(d, precision, prefactor)?.c;
        MonodromyData::new(cl.eta, cl.mu, cl.r, 0, s, c, precision)
    }

    /// `e^{πiμ} e^{πiR}`.
    pub fn monodromy_factor(&self) -> MpMatrix {
        let p = &self.precision;
        let n = self.n;
        let pi = p.pi();
        let r = mp_from_rational_matrix(&self.r, p);
        let pir: MpMatrix = r.iter().map(|row| row.iter().map(|z| z.scale(&pi, p).mul_i_pow(1)).collect()).collect();
        let mut e = identity(n, p);
        let mut term = identity(n, p);
        for k in 1..=n {
            term = mp_matmul(&term, &pir, p).into_iter().map(|row| row.into_iter().map(|z| z.div_int(k as i64)).collect()).collect();
            e = add(&e, &term);
        }
        let diag: Vec<MpComplex> = (0..n).map(|i| MpComplex::exp_i(&p.mul(&pi, &p.from_rational(&self.mu[(i, i)])), p)).collect();
        e.iter().enumerate().map(|(i, row)| row.iter().map(|z| diag[i].mul(z, p)).collect()).collect()
    }

    /// `Cᵀ η e^{πiμ} e^{πiR} C`.
    pub fn compatibility_gram(&self) -> MpMatrix {
        let p = &self.precision;
        let eta = mp_from_rational_matrix(&self.eta, p);
        let m = mp_matmul(&mp_matmul(&mp_transpose(&self.c), &eta, p), &self.monodromy_factor(), p);
        mp_matmul(&m, &self.c, p)
    }
}

fn identity(n: usize, p: &Precision) -> MpMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { MpComplex::real(p.one()) } else { MpComplex::zero() }).collect()).collect()
}

fn add(a: &MpMatrix, b: &MpMatrix) -> MpMatrix {
    a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.add(y)).collect()).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompatibilityReport {
    pub residual: f64,
    pub tol: f64,
    pub digits: u32,
}

impl CompatibilityReport {
    pub fn passes(&self) -> bool {
        self.residual < self.tol
    }
}

/// Max-norm residual of `⟨a,b⟩_S = ⟨Ca, e^{πiμ}e^{πiR}Cb⟩` over the basis.
pub fn check_compatibility(m: &MonodromyData, tol: f64) -> CompatibilityReport {
    let target = mp_from_rational_matrix(&m.s, &m.precision);
    compatibility_against(m, &target, tol)
}

pub fn compatibility_against(m: &MonodromyData, target: &MpMatrix, tol: f64) -> CompatibilityReport {
    let p = &m.precision;
    let g = m.compatibility_gram();
    let residual = g
        .iter()
        .zip(target)
        .flat_map(|(rg, rt)| rg.iter().zip(rt).map(|(x, y)| x.sub(y).norm_f64(p)))
        .fold(0.0, f64::max);
    CompatibilityReport { residual, tol, digits: p.digits }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p30() -> Precision {
        Precision::digits(30).unwrap()
    }

    #[test]
    fn stokes_formulas() {
        assert_eq!(pd_stokes(1).unwrap(), QMatrix::from_i64(&[vec![1, 2], vec![0, 1]]).unwrap());
        assert_eq!(pd_stokes(2).unwrap(), QMatrix::from_i64(&[vec![1, 3, 3], vec![0, 1, 3], vec![0, 0, 1]]).unwrap());
        assert_eq!(pd_gram_stokes(2).unwrap(), QMatrix::from_i64(&[vec![1, 3, 6], vec![0, 1, 3], vec![0, 0, 1]]).unwrap());
        assert_eq!(pd_stokes(1).unwrap(), pd_gram_stokes(1).unwrap());
        // Pascal rows: row i sums binom(d+1, k) for k ≤ d − i.
        for d in 1..7 {
            let s = pd_stokes(d).unwrap();
            let mut pascal = vec![1u64];
            for _ in 0..d + 1 {
                let mut next = vec![1u64];
                next.extend(pascal.windows(2).map(|w| w[0] + w[1]));
                next.push(1);
                pascal = next;
            }
            for i in 0..=d {
                let sum: Rational = (0..=d).map(|j| s[(i, j)].clone()).sum();
                let want: u64 = pascal[..=d - i].iter().sum();
                assert_eq!(sum, Rational::from_integer(BigInt::from(want)));
            }
        }
    }

    #[test]
    fn p1_laurent_coefficient() {
        // Γ²(−x) x² = 1 + 2γ x + O(x²).
        let p = p30();
        let a = pd_laurent_coefficients(1, &p).unwrap();
        assert_eq!(p.to_decimal(&a[0].re), "1.000000000000000000000000000000");
        assert_eq!(p.to_decimal(&a[1].re), "1.154431329803065721213024180165");
        assert!(a[1].im.is_zero());
    }

    #[test]
    fn p2_laurent_coefficients() {
        // 3γ − πi, and (3γ − πi)²/2 + 3ζ(2)/2.
        let p = p30();
        let a = pd_laurent_coefficients(2, &p).unwrap();
        let g = 0.577_215_664_901_532_9_f64;
        let z1 = num_complex::Complex64::new(3.0 * g, -std::f64::consts::PI);
        let z2 = z1 * z1 / 2.0 + 1.5 * std::f64::consts::PI.powi(2) / 6.0;
        assert!((a[1].to_c64(&p) - z1).norm() < 1e-14);
        assert!((a[2].to_c64(&p) - z2).norm() < 1e-13);
    }

    #[test]
    fn c_double_entry() {
        let p = p30();
        let c = pd_connection(3, p, Prefactor::Normalized).unwrap();
        let z = c.c_double[1][1].to_c64(&p);
        assert!((z - num_complex::Complex64::new(0.0, 2.0 * std::f64::consts::PI)).norm() < 1e-14);
        assert_eq!(c.c_double[0][2].to_c64(&p), num_complex::Complex64::new(1.0, 0.0));
    }

    #[test]
    fn p1_compatibility() {
        let m = MonodromyData::pd(1, p30(), Prefactor::Normalized, false).unwrap();
        let r = check_compatibility(&m, 1e-8);
        assert!(r.residual < 1e-25, "{}", r.residual);
        let mut bad = m.clone();
        bad.c[0][1] = bad.c[0][1].add(&MpComplex::real(bad.precision.from_rational(&Rational::new(1.into(), 1000.into()))));
        assert!(!check_compatibility(&bad, 1e-8).passes());
    }

    #[test]
    fn gram_stokes_compatibility() {
        for d in 1..=5 {
            let m = MonodromyData::pd(d, p30(), Prefactor::Normalized, true).unwrap();
            assert!(check_compatibility(&m, 1e-20).passes(), "d = {d}");
        }
        let m = MonodromyData::pd(2, p30(), Prefactor::Normalized, false).unwrap();
        assert!(!check_compatibility(&m, 1e-8).passes());
    }

    #[test]
    fn unnormalized_prefactor_gives_scaled_stokes() {
        let p = p30();
        for d in 1..=4 {
            let m = MonodromyData::pd(d, p, Prefactor::Unnormalized, true).unwrap();
            let two_pi = p.pi() * 2;
            let target: MpMatrix = mp_from_rational_matrix(&m.s, &p)
                .iter()
                .map(|row| row.iter().map(|z| MpComplex::real(p.div(&z.re, &two_pi).unwrap()).neg()).collect())
                .collect();
            assert!(compatibility_against(&m, &target, 1e-20).passes(), "d = {d}");
        }
    }

    #[test]
    fn trivial_data() {
        let p = p30();
        let id = QMatrix::identity(3);
        let m = MonodromyData::new(id.clone(), QMatrix::zeros(3, 3), QMatrix::zeros(3, 3), 0, id.clone(), identity(3, &p), p).unwrap();
        assert_eq!(check_compatibility(&m, 1e-12).residual, 0.0);
    }

    #[test]
    fn low_precision_rejected() {
        assert!(matches!(pd_connection(1, Precision::digits(8).unwrap(), Prefactor::Normalized), Err(Error::Precision(_))));
    }

    #[test]
    fn p2_stokes_forms_share_an_orbit() {
        let orbit = braid_orbit(&pd_stokes(2).unwrap(), None, 2, 1000).unwrap();
        let gram = pd_gram_stokes(2).unwrap();
        assert!(orbit.entries.iter().any(|e| equal_mod_signs(&e.s, &gram)));
    }
}
