use num_traits::Zero;

use crate::algebra::rational::Rational;
use crate::algebra::{ExpSeries, MultiPoly};
use crate::error::{Error, Result};

use super::chart::FMChart;
use super::integrate::integrate_gradient;

pub type SeriesMatrix = Vec<Vec<ExpSeries>>;

/// `Φ₀(z; t) = Σ_p Θ_p(t) z^p` with `(Θ_p)^μ_λ = η^{μν} ∂_ν θ^{(p)}_λ`.
#[derive(Clone, Debug)]
pub struct DeformedFlatSeries {
    pub order: usize,
    /// `θ^{(p)}_λ` for `p = 0..=order`.
    pub theta: Vec<Vec<ExpSeries>>,
    /// `Θ_p`, row `μ`, column `λ`.
    pub big_theta: Vec<SeriesMatrix>,
}

pub fn matmul(a: &SeriesMatrix, b: &SeriesMatrix, zero: &ExpSeries) -> SeriesMatrix {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let k = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = zero.clone();
                    for l in 0..k {
                        if !a[i][l].is_zero() && !b[l][j].is_zero() {
                            acc = &acc + &(&a[i][l] * &b[l][j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn transpose(a: &SeriesMatrix) -> SeriesMatrix {
    let m = a.first().map_or(0, Vec::len);
    (0..m).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn constant_matrix(chart: &FMChart, m: &crate::algebra::QMatrix) -> SeriesMatrix {
    let n = m.rows();
    (0..n)
        .map(|i| {
            (0..m.cols())
                .map(|j| chart.series_from_poly(MultiPoly::constant(chart.dim(), m[(i, j)].clone())))
                .collect()
        })
        .collect()
}

/// Removes the constant and linear parts of the marker-free term.
fn strip_affine(s: &ExpSeries) -> ExpSeries {
    s.without_low_degree(1)
}

/// `∂α∂β θ^{(p+1)} = c_{αβ}^γ ∂γ θ^{(p)}`, `θ^{(0)}_λ = η_{λγ} t^γ`, each
/// `θ^{(p+1)}` with zero constant and linear part.
pub fn deformed_flat_coordinates(chart: &FMChart, order: usize) -> Result<DeformedFlatSeries> {
    let n = chart.dim();
    let sc = chart.structure();
    let c = &sc.upper;
    let eta = chart.eta();
    let mut theta: Vec<Vec<ExpSeries>> = Vec::with_capacity(order + 1);
    let theta0: Vec<ExpSeries> = (0..n)
        .map(|l| {
            let mut p = MultiPoly::zero(n);
            for g in 0..n {
                if !eta[(l, g)].is_zero() {
                    p = &p + &MultiPoly::var(n, g).scale(&eta[(l, g)]);
                }
            }
            chart.series_from_poly(p)
        })
        .collect();
    theta.push(theta0);
    for p in 0..order {
        let mut next = Vec::with_capacity(n);
        for l in 0..n {
            let grad: Vec<ExpSeries> = (0..n).map(|g| theta[p][l].derivative(g)).collect::<Result<_>>()?;
            // Hessian candidate h_{αβ} = c_{αβ}^γ ∂γθ
            let mut first = Vec::with_capacity(n);
            for b in 0..n {
                let col: Vec<ExpSeries> = (0..n)
                    .map(|a| {
                        let mut acc = chart.zero_series();
                        for g in 0..n {
                            if !c[a][b][g].is_zero() && !grad[g].is_zero() {
                                acc = &acc + &(&c[a][b][g] * &grad[g]);
                            }
                        }
                        acc
                    })
                    .collect();
                first.push(integrate_gradient(&col).map_err(|e| {
                    Error::Integrability(format!("deformed flat recursion at order {}: {e}", p + 1))
                })?);
            }
            let th = integrate_gradient(&first).map_err(|e| {
                Error::Integrability(format!("deformed flat recursion at order {}: {e}", p + 1))
            })?;
            next.push(strip_affine(&th));
        }
        theta.push(next);
    }
    let eta_inv = chart.eta_inv();
    let big_theta = theta
        .iter()
        .map(|th| {
            let grads: Vec<Vec<ExpSeries>> = th
                .iter()
                .map(|f| (0..n).map(|nu| f.derivative(nu).expect("index in range")).collect())
                .collect();
            (0..n)
                .map(|mu| {
                    (0..n)
                        .map(|l| {
                            let mut acc = chart.zero_series();
                            for nu in 0..n {
                                let w = &eta_inv[(mu, nu)];
                                if !w.is_zero() {
                                    acc = &acc + &grads[l][nu].scale(w);
                                }
                            }
                            acc
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(DeformedFlatSeries { order, theta, big_theta })
}

impl DeformedFlatSeries {
    /// `N_{a,b} = Θ_aᵀ η Θ_b`.
    pub fn gram(&self, chart: &FMChart, a: usize, b: usize) -> SeriesMatrix {
        let eta = constant_matrix(chart, chart.eta());
        let zero = chart.zero_series();
        matmul(&matmul(&transpose(&self.big_theta[a]), &eta, &zero), &self.big_theta[b], &zero)
    }

    /// Coefficients `Σ_{a+b=p} (−1)^a Θ_aᵀηΘ_b − η[p=0]`, `p = 0..=order`.
    /// All vanish when `Φ₀ᵀ(−z)Φ₀(z) = η` holds.
    pub fn orthogonality_defects(&self, chart: &FMChart) -> Vec<SeriesMatrix> {
        let n = chart.dim();
        let mut out = Vec::with_capacity(self.order + 1);
        for p in 0..=self.order {
            let mut acc: SeriesMatrix = vec![vec![chart.zero_series(); n]; n];
            for a in 0..=p {
                let g = self.gram(chart, a, p - a);
                let sign = if a % 2 == 0 { Rational::from_integer(1.into()) } else { Rational::from_integer((-1).into()) };
                for i in 0..n {
                    for j in 0..n {
                        acc[i][j] = &acc[i][j] + &g[i][j].scale(&sign);
                    }
                }
            }
            if p == 0 {
                for i in 0..n {
                    for j in 0..n {
                        let e = chart.series_from_poly(MultiPoly::constant(n, chart.eta()[(i, j)].clone()));
                        acc[i][j] = &acc[i][j] - &e;
                    }
                }
            }
            out.push(acc);
        }
        out
    }

    pub fn orthogonality_holds(&self, chart: &FMChart) -> bool {
        self.orthogonality_defects(chart).iter().all(|m| m.iter().flatten().all(ExpSeries::is_zero))
    }
}
