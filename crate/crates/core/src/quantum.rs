//! Quantum cohomology of P²: the potential with instanton numbers fixed by
//! WDVV, and the classical data `(η, μ, R)` of P^d.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebra::rational::{self, Rational};
use crate::algebra::{ExpSeries, MultiPoly, QMatrix};
use crate::error::{Error, Result};
use crate::frobenius::{check_wdvv, EulerField, FMChart};

const T1: usize = 0;
const T2: usize = 1;
const T3: usize = 2;

fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}

fn p2_eta() -> QMatrix {
    QMatrix::from_fn(3, 3, |i, j| if i + j == 2 { Rational::one() } else { Rational::zero() })
}

fn p2_euler() -> EulerField {
    let linear = QMatrix::from_fn(3, 3, |i, j| match (i, j) {
        (0, 0) => rational::int(1),
        (2, 2) => rational::int(-1),
        _ => Rational::zero(),
    });
    EulerField::new(linear, vec![Rational::zero(), rational::int(3), Rational::zero()]).expect("shape")
}

/// `F = ½t₁²t₃ + ½t₁t₂² + Σ_d N_d t₃^{3d−1} e^{d t₂}/(3d−1)!` truncated at
/// marker degree `truncation`.
pub fn p2_potential(numbers: &[Rational], truncation: u32) -> ExpSeries {
    let t = |i| MultiPoly::var(3, i);
    let mut f = ExpSeries::with_marker(3, T2, truncation).expect("marker in range");
    let half = rational::rat(1, 2);
    f.add_marker_term(0, (&(&t(T1) * &t(T1)) * &t(T3)).scale(&half));
    f.add_marker_term(0, (&(&t(T2) * &t(T2)) * &t(T1)).scale(&half));
    for (i, n) in numbers.iter().enumerate() {
        let d = i as u32 + 1;
        if d > truncation || n.is_zero() {
            continue;
        }
        let k = 3 * d - 1;
        let c = n / Rational::from_integer(factorial(k));
        f.add_marker_term(d, t(T3).pow(k).scale(&c));
    }
    f
}

fn p2_chart_with(numbers: &[Rational], truncation: u32) -> FMChart {
    FMChart::new(p2_eta(), p2_potential(numbers, truncation), p2_euler(), rational::int(2), 0).expect("valid chart")
}

/// `N_1..N_D`, each solved from the WDVV residual at marker degree `d`,
/// which is affine in `N_d`, with `N_1 = 1`.
pub fn instanton_numbers(max_degree: u32) -> Result<Vec<Rational>> {
    let mut numbers: Vec<Rational> = Vec::new();
    if max_degree == 0 {
        return Ok(numbers);
    }
    numbers.push(Rational::one());
    for d in 2..=max_degree {
        let residuals = |x: Rational| -> Vec<MultiPoly> {
            let mut trial = numbers.clone();
            trial.push(x);
            let chart = p2_chart_with(&trial, d);
            let report = check_wdvv(&chart);
            report.nonzero.iter().map(|r| r.value.marker_coeff(d)).collect::<Vec<_>>()
        };
        // Compare full residual lists at the same indices.
        let chart0 = p2_chart_with(&[numbers.clone(), vec![Rational::zero()]].concat(), d);
        let chart1 = p2_chart_with(&[numbers.clone(), vec![Rational::one()]].concat(), d);
        let r0 = all_residuals(&chart0, d);
        let r1 = all_residuals(&chart1, d);
        let mut solution = None;
        'outer: for (a, b) in r0.iter().zip(&r1) {
            let slope = b - a;
            for (e, s) in slope.terms() {
                if !s.is_zero() {
                    solution = Some(-a.coeff(e) / s);
                    break 'outer;
                }
            }
        }
        let x = solution.ok_or_else(|| Error::Integrability(format!("degree {d} coefficient is not determined")))?;
        if residuals(x.clone()).iter().any(|p| !p.is_zero()) {
            return Err(Error::Integrability(format!("no solution at degree {d}")));
        }
        numbers.push(x);
    }
    Ok(numbers)
}

fn all_residuals(chart: &FMChart, d: u32) -> Vec<MultiPoly> {
    // Every index tuple, including the zero ones, so the lists align.
    let n = chart.dim();
    let c = &chart.structure().upper;
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for g in a + 1..n {
                for dd in 0..n {
                    let mut r = chart.zero_series();
                    for e in 0..n {
                        r = &r + &(&c[a][b][e] * &c[e][g][dd]);
                        r = &r - &(&c[b][g][e] * &c[e][a][dd]);
                    }
                    out.push(r.marker_coeff(d));
                }
            }
        }
    }
    out
}

/// The P² chart through marker degree `max_degree`.
pub fn build_p2_chart(max_degree: u32) -> Result<FMChart> {
    let numbers = instanton_numbers(max_degree)?;
    Ok(p2_chart_with(&numbers, max_degree))
}

/// `(η, μ, R)` for P^d in the basis `e_α ∈ H^{2(α−1)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdClassicalData {
    pub d: usize,
    pub eta: QMatrix,
    pub mu: QMatrix,
    /// Multiplication by `c₁`; column `α` is the image of `e_α`.
    pub r: QMatrix,
}

pub fn pd_classical_data(d: usize) -> Result<PdClassicalData> {
    if d == 0 {
        return Err(Error::Invalid("dimension d must be at least 1".into()));
    }
    let n = d + 1;
    let eta = QMatrix::from_fn(n, n, |i, j| if i + j == d { Rational::one() } else { Rational::zero() });
    let mu = QMatrix::from_fn(n, n, |i, j| {
        if i == j {
            rational::rat(2 * i as i64 - d as i64, 2)
        } else {
            Rational::zero()
        }
    });
    let r = QMatrix::from_fn(n, n, |i, j| if i == j + 1 { rational::int(n as i64) } else { Rational::zero() });
    Ok(PdClassicalData { d, eta, mu, r })
}

impl PdClassicalData {
    /// `⟨μa, b⟩ + ⟨a, μb⟩ = 0`.
    pub fn mu_is_skew(&self) -> bool {
        (&(&self.mu.transpose() * &self.eta) + &(&self.eta * &self.mu)).is_zero()
    }

    /// `⟨Ra, b⟩ = ⟨a, Rb⟩`.
    pub fn r_is_self_adjoint(&self) -> bool {
        &self.r.transpose() * &self.eta == &self.eta * &self.r
    }

    /// `[μ, R] = R`.
    pub fn r_raises_degree(&self) -> bool {
        &(&self.mu * &self.r) - &(&self.r * &self.mu) == self.r
    }

    pub fn r_is_nilpotent(&self) -> bool {
        self.r.pow(self.d as u32 + 1).map(|m| m.is_zero()).unwrap_or(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};
    use crate::frobenius::check_axioms;

    #[test]
    fn low_degree_numbers() {
        assert_eq!(instanton_numbers(3).unwrap(), vec![int(1), int(1), int(12)]);
    }

    #[test]
    fn classical_and_degree_one_potentials() {
        let f0 = build_p2_chart(0).unwrap();
        assert!(f0.potential().is_polynomial());
        let f1 = build_p2_chart(1).unwrap();
        assert_eq!(f1.potential().marker_coeff(1), MultiPoly::var(3, 2).pow(2).scale(&rat(1, 2)));
    }

    #[test]
    fn p2_axioms() {
        let c = build_p2_chart(3).unwrap();
        let ax = check_axioms(&c);
        assert!(ax.passes());
        assert!(!ax.quadratic_correction.is_zero());
        assert!(check_wdvv(&c).passes());
    }

    #[test]
    fn pd_data() {
        let p1 = pd_classical_data(1).unwrap();
        assert_eq!(p1.mu, QMatrix::from_rows(vec![vec![rat(-1, 2), int(0)], vec![int(0), rat(1, 2)]]).unwrap());
        assert_eq!(p1.r, QMatrix::from_i64(&[vec![0, 0], vec![2, 0]]).unwrap());
        for d in 1..6 {
            let p = pd_classical_data(d).unwrap();
            assert!(p.mu_is_skew() && p.r_is_self_adjoint() && p.r_raises_degree() && p.r_is_nilpotent());
            let tr: Rational = (0..=d).map(|k| rat(2 * k as i64 - d as i64, 2).pow(2)).sum();
            assert_eq!((&p.mu * &p.mu).trace(), tr);
        }
    }
}
