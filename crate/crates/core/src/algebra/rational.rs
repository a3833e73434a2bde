//! Arbitrary-precision rationals.
//!
//! `BigRational` already keeps values reduced with a positive denominator, so
//! the type is used as is; this module adds the `"p/q"` text form and a few
//! constructors.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// `"p/q"` with `q > 0`; integers are written with `/1`.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `"p/q"` or a bare integer `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Invalid(format!("not a rational: {s:?}")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let q = parse_int(q)?;
            if q.is_zero() {
                return Err(Error::Invalid(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(parse_int(p)?, q))
        }
        None => Ok(Rational::from_integer(parse_int(s)?)),
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(p), Some(q)) if p.is_finite() && q.is_finite() => p / q,
        _ => {
            // Huge components: scale both down before dividing.
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let p = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let q = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            p / q
        }
    }
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

/// Best rational approximation with denominator at most `max_den`, used for
/// turning sampled floating-point coordinates into exact points.
pub fn from_f64_approx(x: f64, max_den: i64) -> Rational {
    let den = max_den.max(1);
    let p = (x * den as f64).round() as i64;
    rat(p, den)
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_form_round_trips() {
        let r = rat(-6, 4);
        assert_eq!(format_rational(&r), "-3/2");
        assert_eq!(parse_rational("-3/2").unwrap(), r);
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert_eq!(format_rational(&int(7)), "7/1");
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
    }

    #[test]
    fn canonical_form() {
        let r = Rational::new(BigInt::from(4), BigInt::from(-6));
        assert_eq!(r.denom(), &BigInt::from(3));
        assert_eq!(r.numer(), &BigInt::from(-2));
    }
}
