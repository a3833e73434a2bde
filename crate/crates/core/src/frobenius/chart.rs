use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::algebra::rational::{self, Rational};
use crate::algebra::{ExpSeries, MultiPoly, QMatrix};
use crate::error::{Error, Result};

use super::tensor::{self, StructureConstants};

/// `E = Σ_α (L t + r)^α ∂_α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerField {
    pub linear: QMatrix,
    pub constant: Vec<Rational>,
}

impl EulerField {
    pub fn new(linear: QMatrix, constant: Vec<Rational>) -> Result<Self> {
        if !linear.is_square() || linear.rows() != constant.len() {
            return Err(Error::MalformedChart("Euler field shape mismatch".into()));
        }
        Ok(EulerField { linear, constant })
    }

    /// `E = Σ w_α t^α ∂_α`.
    pub fn diagonal(weights: &[Rational]) -> Self {
        let n = weights.len();
        let linear = QMatrix::from_fn(n, n, |i, j| if i == j { weights[i].clone() } else { Rational::zero() });
        EulerField { linear, constant: vec![Rational::zero(); n] }
    }

    pub fn dim(&self) -> usize {
        self.constant.len()
    }

    /// Component `E^α` as a polynomial in `t`.
    pub fn component(&self, alpha: usize) -> MultiPoly {
        let n = self.dim();
        let mut p = MultiPoly::constant(n, self.constant[alpha].clone());
        for beta in 0..n {
            let c = &self.linear[(alpha, beta)];
            if !c.is_zero() {
                p = &p + &MultiPoly::var(n, beta).scale(c);
            }
        }
        p
    }

    pub fn eval_complex(&self, t: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        (0..n)
            .map(|a| {
                let mut v = Complex64::new(rational::to_f64(&self.constant[a]), 0.0);
                for (b, tb) in t.iter().enumerate() {
                    v += tb * rational::to_f64(&self.linear[(a, b)]);
                }
                v
            })
            .collect()
    }
}

/// A Frobenius manifold chart in flat coordinates `t^1..t^n` (stored 0-based).
#[derive(Clone)]
pub struct FMChart {
    eta: QMatrix,
    eta_inv: QMatrix,
    potential: ExpSeries,
    euler: EulerField,
    charge: Rational,
    unity: usize,
    cache: OnceLock<Arc<StructureConstants>>,
}

impl std::fmt::Debug for FMChart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FMChart")
            .field("n", &self.dim())
            .field("eta", &self.eta)
            .field("potential", &self.potential)
            .field("euler", &self.euler)
            .field("charge", &self.charge)
            .field("unity", &self.unity)
            .finish()
    }
}

impl PartialEq for FMChart {
    fn eq(&self, other: &Self) -> bool {
        self.eta == other.eta
            && self.potential == other.potential
            && self.euler == other.euler
            && self.charge == other.charge
            && self.unity == other.unity
            && self.potential.marker() == other.potential.marker()
            && self.potential.truncation() == other.potential.truncation()
    }
}

impl FMChart {
    /// Validates shapes, symmetry and invertibility of `eta`.
    pub fn new(
        eta: QMatrix,
        potential: ExpSeries,
        euler: EulerField,
        charge: Rational,
        unity: usize,
    ) -> Result<Self> {
        let n = eta.rows();
        if n == 0 {
            return Err(Error::MalformedChart("dimension must be positive".into()));
        }
        if !eta.is_square() {
            return Err(Error::MalformedChart("metric is not square".into()));
        }
        if !eta.is_symmetric() {
            return Err(Error::MalformedChart("metric is not symmetric".into()));
        }
        let eta_inv = eta.inverse().map_err(|_| Error::MalformedChart("metric is degenerate".into()))?;
        if potential.arity() != n {
            return Err(Error::MalformedChart(format!(
                "potential has {} variables, metric has dimension {n}",
                potential.arity()
            )));
        }
        if euler.dim() != n {
            return Err(Error::MalformedChart("Euler field dimension differs from metric".into()));
        }
        if unity >= n {
            return Err(Error::MalformedChart(format!("unity index {} out of range", unity + 1)));
        }
        Ok(FMChart { eta, eta_inv, potential, euler, charge, unity, cache: OnceLock::new() })
    }

    /// `n = 1`, `F = t³/6`, `E = t ∂_t`, `d = 0`.
    pub fn one_dimensional() -> Self {
        let f = MultiPoly::var(1, 0).pow(3).scale(&rational::rat(1, 6));
        FMChart::new(
            QMatrix::identity(1),
            f.into(),
            EulerField::diagonal(&[Rational::one()]),
            Rational::zero(),
            0,
        )
        .expect("valid chart")
    }

    /// Constant algebra with `F = (1/6) Σ c_{αβγ} t^α t^β t^γ`.
    pub fn cubic(eta: QMatrix, c_lower: &[Vec<Vec<Rational>>], weights: &[Rational], charge: Rational, unity: usize) -> Result<Self> {
        let n = eta.rows();
        let mut f = MultiPoly::zero(n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let v = &c_lower[a][b][c];
                    if v.is_zero() {
                        continue;
                    }
                    let m = &(&MultiPoly::var(n, a) * &MultiPoly::var(n, b)) * &MultiPoly::var(n, c);
                    f = &f + &m.scale(&(v * rational::rat(1, 6)));
                }
            }
        }
        FMChart::new(eta, f.into(), EulerField::diagonal(weights), charge, unity)
    }

    pub fn dim(&self) -> usize {
        self.eta.rows()
    }

    pub fn eta(&self) -> &QMatrix {
        &self.eta
    }

    pub fn eta_inv(&self) -> &QMatrix {
        &self.eta_inv
    }

    pub fn potential(&self) -> &ExpSeries {
        &self.potential
    }

    pub fn euler(&self) -> &EulerField {
        &self.euler
    }

    pub fn charge(&self) -> &Rational {
        &self.charge
    }

    /// 0-based index of the unity direction.
    pub fn unity(&self) -> usize {
        self.unity
    }

    pub fn is_polynomial(&self) -> bool {
        self.potential.marker().is_none()
    }

    /// Structure constants, computed once and shared.
    pub fn structure(&self) -> Arc<StructureConstants> {
        self.cache.get_or_init(|| Arc::new(tensor::compute_structure_constants(self))).clone()
    }

    pub fn zero_series(&self) -> ExpSeries {
        self.potential.zero_like()
    }

    pub fn series_from_poly(&self, p: MultiPoly) -> ExpSeries {
        let mut s = self.zero_series();
        s.add_marker_term(0, p);
        s
    }

    pub fn eta_f64(&self) -> DMatrix<Complex64> {
        qmatrix_to_complex(&self.eta)
    }

    /// Multiplication operators `C_α` with `(C_α)_{γβ} = c_{αβ}^γ` at `t`.
    pub fn multiplication_at(&self, t: &[Complex64]) -> Vec<DMatrix<Complex64>> {
        let sc = self.structure();
        let n = self.dim();
        (0..n)
            .map(|a| DMatrix::from_fn(n, n, |g, b| sc.upper[a][b][g].eval_complex(t)))
            .collect()
    }

    /// `(E·)_{γβ} = E^α c_{αβ}^γ` at `t`.
    pub fn euler_multiplication_at(&self, t: &[Complex64]) -> DMatrix<Complex64> {
        let e = self.euler.eval_complex(t);
        let cs = self.multiplication_at(t);
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (a, ca) in cs.iter().enumerate() {
            m += ca * e[a];
        }
        m
    }

    /// `μ = (2 − d)/2 − ∇E` in the flat frame.
    pub fn mu_matrix(&self) -> QMatrix {
        let n = self.dim();
        let half = (rational::int(2) - &self.charge) / rational::int(2);
        &QMatrix::identity(n).scale(&half) - &self.euler.linear
    }
}

pub fn qmatrix_to_complex(m: &QMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| Complex64::new(rational::to_f64(&m[(i, j)]), 0.0))
}
