//! Binary fixed-point reals and complexes on `BigInt`, enough for the
//! constants in the P^d connection matrix.

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::rational::Rational;
use crate::error::{Error, Result};

pub const DEFAULT_DIGITS: u32 = 30;
const GUARD_BITS: u32 = 64;

/// Working precision: values are integers scaled by `2^bits`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision {
    pub digits: u32,
    pub bits: u32,
}

impl Precision {
    pub fn digits(digits: u32) -> Result<Self> {
        if digits == 0 || digits > 2000 {
            return Err(Error::Precision(format!("{digits} decimal digits is out of range 1..=2000")));
        }
        let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + GUARD_BITS;
        Ok(Precision { digits, bits })
    }

    /// Reads `FROBFORGE_PRECISION`, falling back to 30 digits.
    pub fn from_env() -> Result<Self> {
        match std::env::var("FROBFORGE_PRECISION") {
            Ok(s) => {
                let d: u32 = s
                    .trim()
                    .parse()
                    .map_err(|_| Error::Precision(format!("FROBFORGE_PRECISION={s:?} is not a digit count")))?;
                Precision::digits(d)
            }
            Err(_) => Precision::digits(DEFAULT_DIGITS),
        }
    }

    pub fn one(&self) -> BigInt {
        BigInt::one() << self.bits
    }

    pub fn from_int(&self, k: i64) -> BigInt {
        BigInt::from(k) << self.bits
    }

    pub fn from_rational(&self, r: &Rational) -> BigInt {
        round_div(&(r.numer() << self.bits), r.denom())
    }

    pub fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        round_shift(&(a * b), self.bits)
    }

    pub fn div(&self, a: &BigInt, b: &BigInt) -> Result<BigInt> {
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(round_div(&(a << self.bits), b))
    }

    pub fn sqrt(&self, a: &BigInt) -> Result<BigInt> {
        if a.is_negative() {
            return Err(Error::Invalid("square root of a negative number".into()));
        }
        Ok((a << self.bits).sqrt())
    }

    pub fn to_f64(&self, a: &BigInt) -> f64 {
        let shift = a.bits().saturating_sub(60);
        let top = (a >> shift).to_f64().unwrap_or(0.0);
        top * 2f64.powi(shift as i32 - self.bits as i32)
    }

    /// Rounded decimal with `digits` places after the point.
    pub fn to_decimal(&self, a: &BigInt) -> String {
        let scaled = round_shift(&(a * BigInt::from(10).pow(self.digits)), self.bits);
        let neg = scaled.is_negative();
        let s = scaled.abs().to_string();
        let d = self.digits as usize;
        let s = if s.len() <= d { format!("{}{}", "0".repeat(d + 1 - s.len()), s) } else { s };
        let (int, frac) = s.split_at(s.len() - d);
        format!("{}{}.{}", if neg { "-" } else { "" }, int, frac)
    }

    /// `π` by Machin's formula.
    pub fn pi(&self) -> BigInt {
        let a = self.atan_inv(5);
        let b = self.atan_inv(239);
        a * 16 - b * 4
    }

    fn atan_inv(&self, k: i64) -> BigInt {
        let k2 = BigInt::from(k * k);
        let mut term = self.one() / k;
        let mut sum = BigInt::zero();
        let mut j: i64 = 0;
        while !term.is_zero() {
            let t = &term / (2 * j + 1);
            if j % 2 == 0 {
                sum += t;
            } else {
                sum -= t;
            }
            term /= &k2;
            j += 1;
        }
        sum
    }

    /// `ln 2 = Σ 1/(k 2^k)`.
    pub fn ln2(&self) -> BigInt {
        let mut sum = BigInt::zero();
        let mut k: u32 = 1;
        loop {
            let t = (self.one() >> k) / k;
            if t.is_zero() {
                break;
            }
            sum += t;
            k += 1;
        }
        sum
    }

    /// Euler's constant by the Brent–McMillan sums with `n = 2^m`.
    pub fn euler_gamma(&self) -> BigInt {
        let target = self.bits as f64 * std::f64::consts::LN_2 + 10.0;
        let mut m = 0u32;
        while ((1u64 << m) as f64) * 4.0 < target {
            m += 1;
        }
        let n = BigInt::one() << m;
        let n2 = &n * &n;
        let mut a = -(self.ln2() * m);
        let mut b = self.one();
        let mut u = a.clone();
        let mut v = b.clone();
        let mut k: u64 = 1;
        loop {
            let kk = BigInt::from(k);
            b = &b * &n2 / (&kk * &kk);
            a = (&a * &n2 / &kk + &b) / &kk;
            if b.is_zero() && a.is_zero() {
                break;
            }
            u += &a;
            v += &b;
            k += 1;
        }
        round_div(&(u << self.bits), &v)
    }

    /// `ζ(s)`, `s ≥ 2`, by Borwein's alternating-series acceleration.
    pub fn zeta(&self, s: u32) -> Result<BigInt> {
        if s < 2 {
            return Err(Error::Invalid(format!("ζ({s}) is not available")));
        }
        let n = (self.bits as f64 * std::f64::consts::LN_2 / (3.0 + 8f64.sqrt()).ln()).ceil() as usize + 2;
        let fact = |k: usize| (1..=k).fold(BigInt::one(), |acc, j| acc * BigInt::from(j));
        let nn = Rational::from_integer(BigInt::from(n));
        let mut d = Vec::with_capacity(n + 1);
        let mut acc = Rational::zero();
        for i in 0..=n {
            let num = fact(n + i - 1) * (BigInt::from(4).pow(i as u32));
            let den = fact(n - i) * fact(2 * i);
            acc += Rational::new(num, den);
            d.push(&nn * &acc);
        }
        let dn = d[n].clone();
        let mut sum = Rational::zero();
        for (k, dk) in d.iter().enumerate().take(n) {
            let t = (dk - &dn) / Rational::from_integer(BigInt::from(k + 1).pow(s));
            if k % 2 == 0 {
                sum += t;
            } else {
                sum -= t;
            }
        }
        let factor = Rational::one() - Rational::new(BigInt::one(), BigInt::from(2).pow(s - 1));
        let z = -sum / (dn * factor);
        Ok(self.from_rational(&z))
    }
}

fn round_shift(a: &BigInt, bits: u32) -> BigInt {
    if bits == 0 {
        return a.clone();
    }
    let half = BigInt::one() << (bits - 1);
    (a + half) >> bits
}

fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    let twice = r * 2;
    let up = if b.sign() == Sign::Minus { twice <= *b } else { twice >= *b };
    if up {
        q + 1
    } else {
        q
    }
}

/// Fixed-point complex number at a shared [`Precision`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MpComplex {
    pub re: BigInt,
    pub im: BigInt,
}

impl MpComplex {
    pub fn zero() -> Self {
        MpComplex { re: BigInt::zero(), im: BigInt::zero() }
    }

    pub fn real(re: BigInt) -> Self {
        MpComplex { re, im: BigInt::zero() }
    }

    pub fn add(&self, o: &MpComplex) -> MpComplex {
        MpComplex { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &MpComplex) -> MpComplex {
        MpComplex { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn neg(&self) -> MpComplex {
        MpComplex { re: -&self.re, im: -&self.im }
    }

    /// Multiplication by `i^k`.
    pub fn mul_i_pow(&self, k: i64) -> MpComplex {
        match k.rem_euclid(4) {
            0 => self.clone(),
            1 => MpComplex { re: -&self.im, im: self.re.clone() },
            2 => self.neg(),
            _ => MpComplex { re: self.im.clone(), im: -&self.re },
        }
    }

    pub fn mul(&self, o: &MpComplex, p: &Precision) -> MpComplex {
        MpComplex {
            re: p.mul(&self.re, &o.re) - p.mul(&self.im, &o.im),
            im: p.mul(&self.re, &o.im) + p.mul(&self.im, &o.re),
        }
    }

    pub fn scale(&self, x: &BigInt, p: &Precision) -> MpComplex {
        MpComplex { re: p.mul(&self.re, x), im: p.mul(&self.im, x) }
    }

    pub fn div_int(&self, k: i64) -> MpComplex {
        let k = BigInt::from(k);
        MpComplex { re: round_div(&self.re, &k), im: round_div(&self.im, &k) }
    }

    pub fn to_c64(&self, p: &Precision) -> Complex64 {
        Complex64::new(p.to_f64(&self.re), p.to_f64(&self.im))
    }

    pub fn from_c64(z: Complex64, p: &Precision) -> MpComplex {
        let conv = |x: f64| {
            let r = Rational::from_float(x).unwrap_or_else(Rational::zero);
            p.from_rational(&r)
        };
        MpComplex { re: conv(z.re), im: conv(z.im) }
    }

    pub fn norm_f64(&self, p: &Precision) -> f64 {
        self.to_c64(p).norm()
    }

    /// `e^{iθ}` for real `θ`.
    pub fn exp_i(theta: &BigInt, p: &Precision) -> MpComplex {
        // Halve until |θ| < 1/2, sum the series, square back.
        let mut r = 0u32;
        let mut t = theta.clone();
        let half = p.one() >> 1;
        while t.abs() >= half {
            t = round_shift(&t, 1);
            r += 1;
        }
        let x = MpComplex { re: BigInt::zero(), im: t };
        let mut sum = MpComplex::real(p.one());
        let mut term = sum.clone();
        let mut k = 1;
        loop {
            term = term.mul(&x, p).div_int(k);
            if term.re.is_zero() && term.im.is_zero() {
                break;
            }
            sum = sum.add(&term);
            k += 1;
        }
        for _ in 0..r {
            sum = sum.mul(&sum, p);
        }
        sum
    }
}

pub type MpMatrix = Vec<Vec<MpComplex>>;

pub fn mp_matmul(a: &MpMatrix, b: &MpMatrix, p: &Precision) -> MpMatrix {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = MpComplex::zero();
                    for (k, bk) in b.iter().enumerate() {
                        acc = acc.add(&a[i][k].mul(&bk[j], p));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn mp_transpose(a: &MpMatrix) -> MpMatrix {
    let m = a.first().map_or(0, Vec::len);
    (0..m).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn mp_from_rational_matrix(q: &crate::algebra::QMatrix, p: &Precision) -> MpMatrix {
    q.to_rows().iter().map(|row| row.iter().map(|x| MpComplex::real(p.from_rational(x))).collect()).collect()
}

pub fn mp_to_c64(a: &MpMatrix, p: &Precision) -> Vec<Vec<Complex64>> {
    a.iter().map(|row| row.iter().map(|z| z.to_c64(p)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI_40: &str = "3.1415926535897932384626433832795028841972";
    const GAMMA_40: &str = "0.5772156649015328606065120900824024310422";
    const ZETA3_40: &str = "1.2020569031595942853997381615114499907650";
    const LN2_40: &str = "0.6931471805599453094172321214581765680755";

    fn p40() -> Precision {
        Precision::digits(40).unwrap()
    }

    #[test]
    fn constants() {
        let p = p40();
        assert_eq!(p.to_decimal(&p.pi()), PI_40);
        assert_eq!(p.to_decimal(&p.euler_gamma()), GAMMA_40);
        assert_eq!(p.to_decimal(&p.zeta(3).unwrap()), ZETA3_40);
        assert_eq!(p.to_decimal(&p.ln2()), LN2_40);
    }

    #[test]
    fn zeta_even_closed_forms() {
        let p = p40();
        let pi = p.pi();
        let pi2 = p.mul(&pi, &pi);
        let want = p.div(&pi2, &p.from_int(6)).unwrap();
        assert!((p.zeta(2).unwrap() - want).abs() < BigInt::from(1u64 << 40));
    }

    #[test]
    fn exp_i_pi_is_minus_one() {
        let p = p40();
        let z = MpComplex::exp_i(&p.pi(), &p);
        assert!((z.to_c64(&p) + 1.0).norm() < 1e-30);
        assert_eq!(p.to_decimal(&(z.re + p.one())), "0.0000000000000000000000000000000000000000");
    }

    #[test]
    fn decimal_formatting() {
        let p = Precision::digits(3).unwrap();
        assert_eq!(p.to_decimal(&p.from_rational(&Rational::new(BigInt::from(-1), BigInt::from(8)))), "-0.125");
        assert_eq!(p.to_decimal(&p.from_int(12)), "12.000");
    }
}
