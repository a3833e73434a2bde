//! JSON encodings: rationals as `"p/q"`, complex numbers as `{"re", "im"}`
//! decimal strings, charts with 1-based indices.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::algebra::rational::{format_rational, is_integer, parse_rational, Rational};
use crate::algebra::{ExpSeries, MultiPoly, QMatrix};
use crate::error::{Error, Result};
use crate::frobenius::{EulerField, FMChart};
use crate::monodromy::{MpComplex, MpMatrix, Precision};

pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))
}

pub fn to_pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

fn field<'a>(obj: &'a Value, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| schema(format!("missing field {key:?}")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(format!("{what} must be an array")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| schema(format!("{what} must be a non-negative integer")))
}

pub fn rational_to_json(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

/// Accepts `"p/q"`, `"p"` or a JSON integer.
pub fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|e| schema(e.to_string())),
        Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().expect("i64").into())),
        _ => Err(schema(format!("expected a rational, found {v}"))),
    }
}

pub fn qmatrix_to_json(m: &QMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| Value::Array(r.iter().map(rational_to_json).collect())).collect())
}

/// Integer entries as JSON numbers, the rest as `"p/q"`.
pub fn qmatrix_to_int_json(m: &QMatrix) -> Value {
    Value::Array(
        m.to_rows()
            .iter()
            .map(|r| {
                Value::Array(
                    r.iter()
                        .map(|x| match (is_integer(x), x.numer().to_i64()) {
                            (true, Some(k)) => json!(k),
                            _ => rational_to_json(x),
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn qmatrix_from_json(v: &Value) -> Result<QMatrix> {
    let rows = array(v, "matrix")?;
    let rows: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| array(r, "matrix row")?.iter().map(rational_from_json).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let width = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != width) {
        return Err(schema("matrix rows have different lengths"));
    }
    QMatrix::from_rows(rows).map_err(|e| schema(e.to_string()))
}

pub fn poly_to_json(p: &MultiPoly) -> Value {
    Value::Array(p.terms().map(|(e, c)| json!({"coeff": format_rational(c), "exps": e})).collect())
}

fn exps_from_json(v: &Value, arity: usize) -> Result<Vec<u32>> {
    let e: Vec<u32> = array(v, "exps")?
        .iter()
        .map(|x| x.as_u64().and_then(|k| u32::try_from(k).ok()).ok_or_else(|| schema("exponents must be small non-negative integers")))
        .collect::<Result<_>>()?;
    if e.len() != arity {
        return Err(schema(format!("exponent vector has length {}, expected {arity}", e.len())));
    }
    Ok(e)
}

pub fn poly_from_json(v: &Value, arity: usize) -> Result<MultiPoly> {
    let mut p = MultiPoly::zero(arity);
    for t in array(v, "polynomial")? {
        let c = rational_from_json(field(t, "coeff")?)?;
        p.add_term(exps_from_json(field(t, "exps")?, arity)?, c);
    }
    Ok(p)
}

pub fn series_to_json(s: &ExpSeries) -> Value {
    let terms: Vec<Value> = s
        .markers()
        .flat_map(|(k, p)| p.terms().map(move |(e, c)| json!({"coeff": format_rational(c), "exps": e, "marker": k})))
        .collect();
    json!({
        "marker_var": s.marker().map(|m| m + 1),
        "truncation": s.marker().map(|_| s.truncation()),
        "terms": terms,
    })
}

pub fn series_from_json(v: &Value, arity: usize) -> Result<ExpSeries> {
    let marker = match field(v, "marker_var")? {
        Value::Null => None,
        m => {
            let m = as_usize(m, "marker_var")?;
            if m == 0 || m > arity {
                return Err(schema(format!("marker_var {m} out of range 1..={arity}")));
            }
            Some(m - 1)
        }
    };
    let mut s = match marker {
        None => ExpSeries::zero(arity),
        Some(m) => {
            let k = field(v, "truncation")?
                .as_u64()
                .and_then(|k| u32::try_from(k).ok())
                .ok_or_else(|| schema("truncation must be a non-negative integer"))?;
            ExpSeries::with_marker(arity, m, k).map_err(|e| schema(e.to_string()))?
        }
    };
    for t in array(field(v, "terms")?, "terms")? {
        let c = rational_from_json(field(t, "coeff")?)?;
        let k = match t.get("marker") {
            None | Some(Value::Null) => 0,
            Some(m) => as_usize(m, "marker")? as u32,
        };
        if k > 0 && marker.is_none() {
            return Err(schema("exponential term in a series without marker_var"));
        }
        if k > s.truncation() && marker.is_some() {
            return Err(schema(format!("marker degree {k} exceeds truncation {}", s.truncation())));
        }
        s.add_marker_term(k, MultiPoly::monomial(exps_from_json(field(t, "exps")?, arity)?, c));
    }
    Ok(s)
}

pub fn chart_to_json(c: &FMChart) -> Value {
    json!({
        "n": c.dim(),
        "eta": qmatrix_to_json(c.eta()),
        "charge_d": rational_to_json(c.charge()),
        "unity_index": c.unity() + 1,
        "potential": series_to_json(c.potential()),
        "euler": {
            "linear": qmatrix_to_json(&c.euler().linear),
            "const": c.euler().constant.iter().map(rational_to_json).collect::<Vec<_>>(),
        },
    })
}

pub fn chart_from_json(v: &Value) -> Result<FMChart> {
    if !v.is_object() {
        return Err(schema("chart must be an object"));
    }
    let n = as_usize(field(v, "n")?, "n")?;
    if n == 0 {
        return Err(schema("n must be positive"));
    }
    let eta = qmatrix_from_json(field(v, "eta")?)?;
    if eta.rows() != n || eta.cols() != n {
        return Err(schema(format!("eta must be {n}×{n}")));
    }
    let charge = rational_from_json(field(v, "charge_d")?)?;
    let unity = as_usize(field(v, "unity_index")?, "unity_index")?;
    if unity == 0 || unity > n {
        return Err(schema(format!("unity_index {unity} out of range 1..={n}")));
    }
    let potential = series_from_json(field(v, "potential")?, n)?;
    let e = field(v, "euler")?;
    let linear = qmatrix_from_json(field(e, "linear")?)?;
    if linear.rows() != n || linear.cols() != n {
        return Err(schema(format!("euler.linear must be {n}×{n}")));
    }
    let constant: Vec<Rational> =
        array(field(e, "const")?, "euler.const")?.iter().map(rational_from_json).collect::<Result<_>>()?;
    if constant.len() != n {
        return Err(schema(format!("euler.const must have {n} entries")));
    }
    let euler = EulerField::new(linear, constant).map_err(|e| schema(e.to_string()))?;
    FMChart::new(eta, potential, euler, charge, unity - 1)
}

pub fn complex_to_json(z: Complex64) -> Value {
    json!({"re": format!("{}", z.re), "im": format!("{}", z.im)})
}

/// Accepts `{"re", "im"}` with string or number parts, or a bare real.
pub fn complex_from_json(v: &Value) -> Result<Complex64> {
    let part = |x: &Value| -> Result<f64> {
        match x {
            Value::String(s) => s.trim().parse::<f64>().map_err(|_| schema(format!("not a number: {s:?}"))),
            Value::Number(n) => n.as_f64().ok_or_else(|| schema("number out of range")),
            _ => Err(schema(format!("expected a number, found {x}"))),
        }
    };
    match v {
        Value::Object(_) => Ok(Complex64::new(part(field(v, "re")?)?, part(field(v, "im")?)?)),
        _ => Ok(Complex64::new(part(v)?, 0.0)),
    }
}

pub fn complex_vec_to_json(zs: &[Complex64]) -> Value {
    Value::Array(zs.iter().map(|z| complex_to_json(*z)).collect())
}

pub fn complex_vec_from_json(v: &Value) -> Result<Vec<Complex64>> {
    array(v, "complex vector")?.iter().map(complex_from_json).collect()
}

pub fn complex_matrix_to_json(rows: &[Vec<Complex64>]) -> Value {
    Value::Array(rows.iter().map(|r| complex_vec_to_json(r)).collect())
}

pub fn complex_matrix_from_json(v: &Value) -> Result<Vec<Vec<Complex64>>> {
    let rows: Vec<Vec<Complex64>> = array(v, "complex matrix")?.iter().map(complex_vec_from_json).collect::<Result<_>>()?;
    let width = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != width) {
        return Err(schema("matrix rows have different lengths"));
    }
    Ok(rows)
}

pub fn dmatrix_rows(m: &nalgebra::DMatrix<Complex64>) -> Vec<Vec<Complex64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

pub fn mp_to_json(z: &MpComplex, p: &Precision) -> Value {
    json!({"re": p.to_decimal(&z.re), "im": p.to_decimal(&z.im)})
}

pub fn mp_matrix_to_json(m: &MpMatrix, p: &Precision) -> Value {
    Value::Array(m.iter().map(|r| Value::Array(r.iter().map(|z| mp_to_json(z, p)).collect())).collect())
}

/// Parses `{"re", "im"}` decimal strings exactly at precision `p`.
pub fn mp_from_json(v: &Value, p: &Precision) -> Result<MpComplex> {
    let part = |x: &Value| -> Result<num_bigint::BigInt> {
        let s = match x {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            _ => return Err(schema(format!("expected a decimal, found {x}"))),
        };
        Ok(p.from_rational(&decimal_to_rational(&s)?))
    };
    match v {
        Value::Object(_) => Ok(MpComplex { re: part(field(v, "re")?)?, im: part(field(v, "im")?)? }),
        _ => Ok(MpComplex::real(part(v)?)),
    }
}

pub fn mp_matrix_from_json(v: &Value, p: &Precision) -> Result<MpMatrix> {
    array(v, "matrix")?
        .iter()
        .map(|r| array(r, "matrix row")?.iter().map(|z| mp_from_json(z, p)).collect())
        .collect()
}

/// `"-12.5e-3"` as an exact rational.
pub fn decimal_to_rational(s: &str) -> Result<Rational> {
    use num_bigint::BigInt;
    let s = s.trim();
    let bad = || schema(format!("not a decimal number: {s:?}"));
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}0").parse::<BigInt>().map_err(|_| bad())? / 10;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        Rational::from_integer(digits * ten.pow(scale as u32))
    } else {
        Rational::new(digits, ten.pow((-scale) as u32))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

pub fn object(pairs: Vec<(&str, Value)>) -> Value {
    let mut m = Map::new();
    for (k, v) in pairs {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;
    use crate::quantum::build_p2_chart;
    use crate::singularity::build_an_chart;

    #[test]
    fn chart_round_trip() {
        for c in [build_an_chart(3).unwrap(), build_p2_chart(3).unwrap(), FMChart::one_dimensional()] {
            let v = chart_to_json(&c);
            let text = to_pretty(&v);
            let back = chart_from_json(&parse(&text).unwrap()).unwrap();
            assert_eq!(back, c);
            assert_eq!(chart_to_json(&back), v);
        }
    }

    #[test]
    fn schema_errors() {
        let c = build_an_chart(2).unwrap();
        let mut v = chart_to_json(&c);
        v["unity_index"] = json!(0);
        assert!(matches!(chart_from_json(&v), Err(Error::Schema(_))));
        let mut v = chart_to_json(&c);
        v.as_object_mut().unwrap().remove("eta");
        assert!(matches!(chart_from_json(&v), Err(Error::Schema(_))));
        assert!(matches!(parse("{"), Err(Error::Json(_))));
        let mut v = chart_to_json(&c);
        v["eta"] = json!([["1/1", "0/1"], ["0/1", "1/1"]]);
        assert!(chart_from_json(&v).is_ok());
        v["eta"] = json!([["1/1", "1/1"], ["0/1", "1/1"]]);
        assert!(matches!(chart_from_json(&v), Err(Error::MalformedChart(_))));
    }

    #[test]
    fn complex_and_decimal() {
        let z = Complex64::new(0.1, -1e-300);
        assert_eq!(complex_from_json(&complex_to_json(z)).unwrap(), z);
        assert_eq!(decimal_to_rational("-12.5e-3").unwrap(), rat(-1, 80));
        assert_eq!(decimal_to_rational("3").unwrap(), rat(3, 1));
        assert!(decimal_to_rational("1.2.3").is_err());
        let p = Precision::digits(30).unwrap();
        let m = MpComplex { re: p.pi(), im: -p.euler_gamma() };
        let back = mp_from_json(&mp_to_json(&m, &p), &p).unwrap();
        assert_eq!(p.to_decimal(&back.re), p.to_decimal(&m.re));
        assert_eq!(p.to_decimal(&back.im), p.to_decimal(&m.im));
    }

    #[test]
    fn stokes_as_integers() {
        let s = crate::monodromy::pd_stokes(2).unwrap();
        assert_eq!(serde_json::to_string(&qmatrix_to_int_json(&s)).unwrap(), "[[1,3,3],[0,1,3],[0,0,1]]");
        assert_eq!(qmatrix_from_json(&qmatrix_to_int_json(&s)).unwrap(), s);
    }
}
