use num_traits::{One, Zero};

use crate::algebra::rational::{self, Rational};
use crate::algebra::ExpSeries;
use crate::error::{Error, Result};

use super::chart::FMChart;
use super::deformed::SeriesMatrix;

#[derive(Clone, Debug)]
pub struct IntersectionForm {
    /// `g^{αβ}(t)`.
    pub matrix: SeriesMatrix,
    /// `det g`.
    pub discriminant: ExpSeries,
}

/// `g^{αβ} = E^ε η^{αγ} c_{εγ}^β`.
pub fn intersection_form(chart: &FMChart) -> IntersectionForm {
    let n = chart.dim();
    let c = &chart.structure().upper;
    let eta_inv = chart.eta_inv();
    let e: Vec<_> = (0..n).map(|a| chart.euler().component(a)).collect();
    // (E·)_γ^β = E^ε c_{εγ}^β
    let mut emul: SeriesMatrix = vec![vec![chart.zero_series(); n]; n];
    for g in 0..n {
        for b in 0..n {
            let mut acc = chart.zero_series();
            for (eps, ee) in e.iter().enumerate() {
                if !ee.is_zero() && !c[eps][g][b].is_zero() {
                    acc = &acc + &c[eps][g][b].mul_poly(ee);
                }
            }
            emul[g][b] = acc;
        }
    }
    let mut matrix: SeriesMatrix = vec![vec![chart.zero_series(); n]; n];
    for a in 0..n {
        for b in 0..n {
            let mut acc = chart.zero_series();
            for g in 0..n {
                let w = &eta_inv[(a, g)];
                if !w.is_zero() {
                    acc = &acc + &emul[g][b].scale(w);
                }
            }
            matrix[a][b] = acc;
        }
    }
    let discriminant = determinant(&matrix, &chart.zero_series());
    IntersectionForm { matrix, discriminant }
}

/// Determinant by cofactor expansion along the first row.
pub fn determinant(m: &SeriesMatrix, zero: &ExpSeries) -> ExpSeries {
    let n = m.len();
    let cols: Vec<usize> = (0..n).collect();
    det_rec(m, 0, &cols, zero)
}

fn det_rec(m: &SeriesMatrix, row: usize, cols: &[usize], zero: &ExpSeries) -> ExpSeries {
    if cols.is_empty() {
        return zero.constant_like(Rational::one());
    }
    let mut acc = zero.clone();
    for (k, &c) in cols.iter().enumerate() {
        if m[row][c].is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = det_rec(m, row + 1, &rest, zero);
        let term = &m[row][c] * &minor;
        acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// `6 (1 − d)^{−2} (n − 4 tr μ²)` with `μ = (2 − d)/2 − ∇E`.
pub fn virasoro_central_charge(chart: &FMChart) -> Result<Rational> {
    let d = chart.charge();
    if d.is_one() {
        return Err(Error::ChargePole);
    }
    let mu = chart.mu_matrix();
    let tr = (&mu * &mu).trace();
    let n = rational::int(chart.dim() as i64);
    let one_minus_d = Rational::one() - d;
    Ok(rational::int(6) * (n - rational::int(4) * tr) / (&one_minus_d * &one_minus_d))
}

/// Evaluates a series matrix at a complex point.
pub fn eval_matrix(m: &SeriesMatrix, t: &[num_complex::Complex64]) -> nalgebra::DMatrix<num_complex::Complex64> {
    let n = m.len();
    let k = m.first().map_or(0, Vec::len);
    nalgebra::DMatrix::from_fn(n, k, |i, j| m[i][j].eval_complex(t))
}
