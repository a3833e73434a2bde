//! The A_n Frobenius manifold on the base of the unfolding
//! `f_s(x) = x^{n+1} + s_1 x^{n−1} + … + s_n`.

use num_complex::Complex64;
use num_traits::Zero;

use crate::algebra::laurent::{puiseux_root_expansion, residue_at_infinity_param, UPoly};
use crate::algebra::rational::{self, Rational};
use crate::algebra::{ExpSeries, MultiPoly, QMatrix};
use crate::error::{Error, Result};
use crate::frobenius::{integrate_gradient, EulerField, FMChart};
use crate::numeric::polynomial_roots;

/// Default backward-error tolerance for critical points.
pub const DEFAULT_ROOT_PRECISION: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Unfolding {
    n: usize,
    f: UPoly,
    df: UPoly,
}

impl Unfolding {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("Milnor number must be at least 1".into()));
        }
        let mut coeffs = vec![MultiPoly::zero(n); n + 2];
        coeffs[n + 1] = MultiPoly::one(n);
        for i in 1..=n {
            coeffs[n - i] = MultiPoly::var(n, i - 1);
        }
        let f = UPoly::new(n, coeffs);
        let df = f.derivative();
        Ok(Unfolding { n, f, df })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn f(&self) -> &UPoly {
        &self.f
    }

    pub fn df(&self) -> &UPoly {
        &self.df
    }

    /// `∂f/∂s_i = x^{n−i}` for `i = 1..=n`, passed 0-based.
    pub fn df_ds(&self, i: usize) -> UPoly {
        UPoly::monomial(self.n, self.n - 1 - i, MultiPoly::one(self.n))
    }

    fn weighted_residue(&self, num: &UPoly) -> MultiPoly {
        let hint = num.degree().unwrap_or(0) + 2;
        let r = residue_at_infinity_param(num, &self.df, hint).expect("order hint covers the x^-1 term");
        r.scale(&-rational::int(self.n as i64 + 1))
    }

    /// `−(n+1) res_∞ [∂_i f ∂_j f / f′]`.
    pub fn residue_pairing(&self) -> Vec<Vec<MultiPoly>> {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|j| self.weighted_residue(&self.df_ds(i).mul(&self.df_ds(j)))).collect())
            .collect()
    }

    /// `−(n+1) res_∞ [∂_i f ∂_j f ∂_k f / f′]`.
    pub fn residue_triple(&self) -> Vec<Vec<Vec<MultiPoly>>> {
        let n = self.n;
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let ij = self.df_ds(i).mul(&self.df_ds(j));
                        (0..n).map(|k| self.weighted_residue(&ij.mul(&self.df_ds(k)))).collect()
                    })
                    .collect()
            })
            .collect()
    }

    /// Values of `f_s` at the roots of `f′_s`, with multiplicity.
    pub fn critical_values(&self, s: &[Complex64], precision: f64) -> Result<Vec<Complex64>> {
        if s.len() != self.n {
            return Err(Error::Invalid(format!("expected {} parameters, got {}", self.n, s.len())));
        }
        let eval_coeffs = |p: &UPoly| -> Vec<Complex64> {
            (0..=p.degree().unwrap_or(0)).map(|j| p.coeff(j).eval_complex(s)).collect()
        };
        let fc = eval_coeffs(&self.f);
        let roots = polynomial_roots(&eval_coeffs(&self.df), precision)?;
        Ok(roots
            .into_iter()
            .map(|x| fc.iter().rev().fold(Complex64::zero(), |acc, c| acc * x + c))
            .collect())
    }

    pub fn critical_values_rational(&self, s: &[Rational], precision: f64) -> Result<Vec<Complex64>> {
        let s: Vec<Complex64> = s.iter().map(|v| Complex64::new(rational::to_f64(v), 0.0)).collect();
        self.critical_values(&s, precision)
    }

    /// `Σ_k (k+1)/(n+1) s_k ∂_{s_k}`, scaled so that `Lie_E f = f`.
    pub fn euler_weights(&self) -> Vec<Rational> {
        (1..=self.n).map(|k| rational::rat(k as i64 + 1, self.n as i64 + 1)).collect()
    }
}

/// Flat coordinates `t^α(s)` and the inverse `s_k(t)`, both polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatCoordinateMap {
    /// `t^α` as polynomials in `s`.
    pub t_of_s: Vec<MultiPoly>,
    /// `s_k` as polynomials in `t`.
    pub s_of_t: Vec<MultiPoly>,
}

impl FlatCoordinateMap {
    /// `∂t^α/∂s_k`, row `α`.
    pub fn jacobian(&self) -> Vec<Vec<MultiPoly>> {
        let n = self.t_of_s.len();
        self.t_of_s.iter().map(|t| (0..n).map(|k| t.derivative(k).expect("index in range")).collect()).collect()
    }

    /// `∂s_k/∂t^α`, row `k`, as polynomials in `t`.
    pub fn inverse_jacobian(&self) -> Vec<Vec<MultiPoly>> {
        let n = self.s_of_t.len();
        self.s_of_t.iter().map(|s| (0..n).map(|a| s.derivative(a).expect("index in range")).collect()).collect()
    }

    pub fn t_at(&self, s: &[Rational]) -> Vec<Rational> {
        self.t_of_s.iter().map(|p| p.eval(s)).collect()
    }

    pub fn s_at(&self, t: &[Rational]) -> Vec<Rational> {
        self.s_of_t.iter().map(|p| p.eval(t)).collect()
    }

    pub fn s_at_complex(&self, t: &[Complex64]) -> Vec<Complex64> {
        self.s_of_t.iter().map(|p| p.eval_complex(t)).collect()
    }
}

/// Reads flat coordinates off the root expansion `x(k)`, `k^{n+1} = f_s(x)`:
/// with `x = k + Σ c_j k^{−j}`, `t^α = −(n+1) c_{n+1−α}`.
pub fn flat_coordinates(u: &Unfolding) -> Result<FlatCoordinateMap> {
    let n = u.n();
    let exp = puiseux_root_expansion(u.f(), n + 1)?;
    let scale = -rational::int(n as i64 + 1);
    let tau: Vec<MultiPoly> = (1..=n).map(|j| exp.coeff(j).scale(&scale)).collect();
    let t_of_s: Vec<MultiPoly> = (1..=n).map(|a| tau[n - a].clone()).collect();
    // τ_j = s_j + N_j(s_1..s_{j−1}); solve for s_j in increasing j.
    let mut s_of_t: Vec<MultiPoly> = Vec::with_capacity(n);
    for j in 0..n {
        let tj = &tau[j];
        let lin = tj.coeff(&unit(n, j));
        if lin != Rational::from_integer(1.into()) {
            return Err(Error::Integrability(format!("flat coordinate {} is not unitriangular in s", n - j)));
        }
        let rest = tj - &MultiPoly::var(n, j);
        if (j..n).any(|k| rest.depends_on(k)) {
            return Err(Error::Integrability("flat coordinates are not triangular".into()));
        }
        // Substitute the already solved s_0..s_{j−1}; later variables are absent.
        let mut subs: Vec<MultiPoly> = s_of_t.clone();
        subs.extend((j..n).map(|_| MultiPoly::zero(n)));
        let rest_t = rest.substitute(&subs)?;
        s_of_t.push(&MultiPoly::var(n, n - 1 - j) - &rest_t);
    }
    let map = FlatCoordinateMap { t_of_s, s_of_t };
    for (a, t) in map.t_of_s.iter().enumerate() {
        if t.substitute(&map.s_of_t)? != MultiPoly::var(n, a) {
            return Err(Error::Integrability("flat coordinate inverse failed to round-trip".into()));
        }
    }
    Ok(map)
}

fn unit(n: usize, j: usize) -> Vec<u32> {
    let mut e = vec![0; n];
    e[j] = 1;
    e
}

/// Pushes a covariant s-tensor to flat coordinates.
fn pull_back(tensor_rank: usize, entries: &dyn Fn(&[usize]) -> MultiPoly, map: &FlatCoordinateMap) -> Result<Vec<MultiPoly>> {
    let n = map.s_of_t.len();
    let jac = map.inverse_jacobian();
    let total = n.pow(tensor_rank as u32);
    let mut cache: Vec<Option<MultiPoly>> = vec![None; total];
    let mut sub = |idx: &[usize]| -> Result<MultiPoly> {
        let flat = idx.iter().fold(0, |acc, &i| acc * n + i);
        if cache[flat].is_none() {
            cache[flat] = Some(entries(idx).substitute(&map.s_of_t)?);
        }
        Ok(cache[flat].clone().expect("filled"))
    };
    let mut out = Vec::with_capacity(total);
    for flat in 0..total {
        let alphas = digits(flat, n, tensor_rank);
        let mut acc = MultiPoly::zero(n);
        for sflat in 0..total {
            let ks = digits(sflat, n, tensor_rank);
            let mut factor = MultiPoly::one(n);
            for (k, a) in ks.iter().zip(&alphas) {
                let j = &jac[*k][*a];
                if j.is_zero() {
                    factor = MultiPoly::zero(n);
                    break;
                }
                factor = &factor * j;
            }
            if factor.is_zero() {
                continue;
            }
            let e = sub(&ks)?;
            if !e.is_zero() {
                acc = &acc + &(&factor * &e);
            }
        }
        out.push(acc);
    }
    Ok(out)
}

fn digits(mut x: usize, base: usize, len: usize) -> Vec<usize> {
    let mut d = vec![0; len];
    for slot in d.iter_mut().rev() {
        *slot = x % base;
        x /= base;
    }
    d
}

/// Everything the A_n construction produces, kept for inspection and tests.
#[derive(Clone, Debug)]
pub struct AnConstruction {
    pub unfolding: Unfolding,
    pub flat: FlatCoordinateMap,
    /// `η_{αβ}` from the residue pairing in flat coordinates.
    pub eta: QMatrix,
    /// `c_{αβγ}(t)` from the residue triple in flat coordinates, flattened.
    pub c_lower: Vec<MultiPoly>,
    pub chart: FMChart,
}

pub fn build_an(n: usize) -> Result<AnConstruction> {
    let u = Unfolding::new(n)?;
    let flat = flat_coordinates(&u)?;
    let pairing = u.residue_pairing();
    let triple = u.residue_triple();
    let eta_t = pull_back(2, &|i: &[usize]| pairing[i[0]][i[1]].clone(), &flat)?;
    let mut eta_rows = vec![vec![Rational::zero(); n]; n];
    for a in 0..n {
        for b in 0..n {
            eta_rows[a][b] = eta_t[a * n + b].as_constant().ok_or_else(|| {
                Error::Integrability(format!("metric entry ({}, {}) is not constant in flat coordinates", a + 1, b + 1))
            })?;
        }
    }
    let eta = QMatrix::from_rows(eta_rows)?;
    let c_lower = pull_back(3, &|i: &[usize]| triple[i[0]][i[1]][i[2]].clone(), &flat)?;

    // Integrate c three times: ψ_{αβ}, then ∂F/∂t^α, then F.
    let s = |p: &MultiPoly| ExpSeries::from_poly(p.clone());
    let mut psi = vec![vec![ExpSeries::zero(n); n]; n];
    for a in 0..n {
        for b in a..n {
            let grad: Vec<ExpSeries> = (0..n).map(|g| s(&c_lower[(a * n + b) * n + g])).collect();
            let v = integrate_gradient(&grad)?;
            psi[a][b] = v.clone();
            psi[b][a] = v;
        }
    }
    let dphi: Vec<ExpSeries> = (0..n).map(|a| integrate_gradient(&psi[a])).collect::<Result<_>>()?;
    let f = integrate_gradient(&dphi)?.without_low_degree(2);

    // Euler field transported from s: E^α = Σ_k ∂t^α/∂s_k · w_k s_k.
    let weights = u.euler_weights();
    let jac = flat.jacobian();
    let mut linear = vec![vec![Rational::zero(); n]; n];
    let mut constant = vec![Rational::zero(); n];
    for a in 0..n {
        let mut ea = MultiPoly::zero(n);
        for k in 0..n {
            let term = &jac[a][k] * &MultiPoly::var(n, k).scale(&weights[k]);
            ea = &ea + &term;
        }
        let ea_t = ea.substitute(&flat.s_of_t)?;
        if ea_t.total_degree().is_some_and(|d| d > 1) {
            return Err(Error::Integrability("Euler field is not affine in flat coordinates".into()));
        }
        constant[a] = ea_t.constant_term();
        for (b, row) in linear[a].iter_mut().enumerate() {
            *row = ea_t.coeff(&unit(n, b));
        }
    }
    let euler = EulerField::new(QMatrix::from_rows(linear)?, constant)?;
    // q_α = 1 − weight(t^α); the charge is q of the lowest-weight coordinate.
    let d = Rational::from_integer(1.into()) - &euler.linear[(n - 1, n - 1)];
    let chart = FMChart::new(eta.clone(), f, euler, d, 0)?;
    Ok(AnConstruction { unfolding: u, flat, eta, c_lower, chart })
}

/// The A_n chart in flat coordinates.
pub fn build_an_chart(n: usize) -> Result<FMChart> {
    Ok(build_an(n)?.chart)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};
    use crate::frobenius::{check_axioms, check_wdvv};

    #[test]
    fn pairing_examples() {
        let u = Unfolding::new(2).unwrap();
        let p = u.residue_pairing();
        let zero = [int(0), int(0)];
        assert_eq!(p[0][1].eval(&zero), int(1));
        assert_eq!(p[0][0].eval(&zero), int(0));
        assert!(p[1][1].is_zero());
        let u1 = Unfolding::new(1).unwrap();
        assert_eq!(u1.residue_pairing()[0][0], MultiPoly::one(1));
    }

    #[test]
    fn triple_examples() {
        let u = Unfolding::new(2).unwrap();
        let c = u.residue_triple();
        assert!(c[1][1][1].is_zero());
        assert_eq!(c[0][1][1].eval(&[int(0), int(0)]), int(1));
        // contracting with ∂_{s_n} gives the pairing
        let p = u.residue_pairing();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(c[i][j][1], p[i][j]);
            }
        }
    }

    #[test]
    fn critical_values_examples() {
        let u = Unfolding::new(2).unwrap();
        let v = u.critical_values_rational(&[int(-3), int(0)], 1e-12).unwrap();
        let mut re: Vec<f64> = v.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 2.0).abs() < 1e-10 && (re[1] - 2.0).abs() < 1e-10);
        let v = u.critical_values_rational(&[int(0), rat(5, 2)], 1e-12).unwrap();
        assert!(v.iter().all(|z| (z - Complex64::new(2.5, 0.0)).norm() < 1e-9));
        let u1 = Unfolding::new(1).unwrap();
        let v = u1.critical_values_rational(&[int(7)], 1e-12).unwrap();
        assert!((v[0].re - 7.0).abs() < 1e-12);
    }

    #[test]
    fn a1_a2_potentials() {
        let c1 = build_an_chart(1).unwrap();
        assert_eq!(c1.potential().polynomial_part(), MultiPoly::var(1, 0).pow(3).scale(&rat(1, 6)));
        let c2 = build_an_chart(2).unwrap();
        let f = c2.potential().polynomial_part();
        let cubic = (&MultiPoly::var(2, 0) * &MultiPoly::var(2, 0)) * MultiPoly::var(2, 1);
        assert_eq!(f.coeff(&[2, 1]), rat(1, 2));
        assert_eq!((&f - &cubic.scale(&rat(1, 2))).total_degree(), Some(4));
        assert_eq!(c2.charge(), &rat(1, 3));
    }

    #[test]
    fn a3_chart_axioms() {
        let c = build_an_chart(3).unwrap();
        assert!(check_wdvv(&c).passes());
        let ax = check_axioms(&c);
        assert!(ax.passes());
        assert!(ax.quadratic_correction.is_zero());
        assert_eq!(c.charge(), &rat(1, 2));
        let w: Vec<Rational> = (0..3).map(|a| c.euler().linear[(a, a)].clone()).collect();
        assert_eq!(w, vec![int(1), rat(3, 4), rat(1, 2)]);
    }
}
