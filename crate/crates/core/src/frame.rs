//! Canonical coordinates and the orthonormal frame `(u, Ψ, V, V_i)` at a
//! semisimple point.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::frobenius::chart::{qmatrix_to_complex, FMChart};

pub type CMatrix = DMatrix<Complex64>;

/// Relative eigenvalue gap below which a point is treated as non-semisimple.
pub const SEMISIMPLE_MARGIN: f64 = 1e-6;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Lexicographic (real, imaginary) order, with real parts closer than
/// `1e-9` of the spectrum scale counted as equal so conjugate pairs sort
/// stably.
pub fn sort_canonical(u: &[Complex64]) -> Vec<usize> {
    let scale = u.iter().map(|z| z.norm()).fold(1e-300, f64::max);
    let tie = 1e-9 * scale;
    let mut order: Vec<usize> = (0..u.len()).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (u[a], u[b]);
        if (x.re - y.re).abs() <= tie {
            x.im.total_cmp(&y.im)
        } else {
            x.re.total_cmp(&y.re)
        }
    });
    order
}

/// Smallest pairwise distance relative to the largest modulus.
pub fn relative_gap(u: &[Complex64]) -> f64 {
    let scale = u.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut gap = f64::INFINITY;
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            gap = gap.min((u[i] - u[j]).norm());
        }
    }
    gap / scale
}

pub fn check_margin(u: &[Complex64]) -> Result<()> {
    let g = relative_gap(u);
    if g > SEMISIMPLE_MARGIN {
        Ok(())
    } else {
        Err(Error::NotSemisimple(format!("relative eigenvalue gap {g:.3e}")))
    }
}

/// Eigenvalues of a complex matrix, polished by a few Newton steps on the
/// characteristic determinant, sorted by (real, imaginary).
pub fn sorted_eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    Ok(sorted_eigenvalues_with_order(m)?.0)
}

/// As [`sorted_eigenvalues`], also returning for each sorted slot the index
/// the eigen-solver reported it at.
pub fn sorted_eigenvalues_with_order(m: &CMatrix) -> Result<(Vec<Complex64>, Vec<usize>)> {
    let n = m.nrows();
    let eig = m
        .clone()
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::NotSemisimple("eigenvalue computation failed".into()))?;
    let mut u: Vec<Complex64> = eig.iter().copied().collect();
    // Inverse iteration refinement: u ← u + 1/tr((u − M)^{-1}).
    for ui in u.iter_mut() {
        for _ in 0..2 {
            let shifted = CMatrix::identity(n, n) * *ui - m;
            let Some(inv) = shifted.try_inverse() else { break };
            let tr = inv.trace();
            if tr.norm() == 0.0 || !tr.norm().is_finite() {
                break;
            }
            let step = Complex64::new(1.0, 0.0) / tr;
            if step.norm() > 1e-6 * (1.0 + ui.norm()) {
                break;
            }
            *ui -= step;
        }
    }
    let order = sort_canonical(&u);
    Ok((order.iter().map(|&i| u[i]).collect(), order))
}

/// Eigenvalues of `(E·)` at `t`, sorted by (real, imaginary).
pub fn canonical_coordinates(chart: &FMChart, t: &[Complex64]) -> Result<Vec<Complex64>> {
    check_point(chart, t)?;
    let u = sorted_eigenvalues(&chart.euler_multiplication_at(t))?;
    check_margin(&u)?;
    Ok(u)
}

fn check_point(chart: &FMChart, t: &[Complex64]) -> Result<()> {
    if t.len() != chart.dim() {
        return Err(Error::Invalid(format!("point has {} coordinates, chart dimension is {}", t.len(), chart.dim())));
    }
    if t.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Invalid("point has non-finite coordinates".into()));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct CanonicalFrame {
    pub t: Vec<Complex64>,
    pub u: Vec<Complex64>,
    /// Rows `i`: `ψ_{iα}`.
    pub psi: CMatrix,
    /// `ψ_{i1}`, principal square roots of `⟨∂_i, ∂_i⟩`.
    pub psi1: Vec<Complex64>,
    /// Columns `i`: `∂t/∂u_i`.
    pub idempotents: CMatrix,
    pub mu: CMatrix,
    pub v: CMatrix,
    /// Sign applied to each principal `ψ_{i1}` (all `+1` unless re-signed).
    pub signs: Vec<i8>,
    /// Canonical coordinates in the order the eigen-solver returned them,
    /// before sorting.
    pub ordering: Vec<usize>,
}

/// Builds the frame from the Lagrange idempotents of `(E·)`.
pub fn canonical_frame(chart: &FMChart, t: &[Complex64]) -> Result<CanonicalFrame> {
    check_point(chart, t)?;
    let n = chart.dim();
    let l = chart.euler_multiplication_at(t);
    let (u, ordering) = sorted_eigenvalues_with_order(&l)?;
    check_margin(&u)?;
    let eta = chart.eta_f64();
    let mut e = nalgebra::DVector::from_element(n, czero());
    e[chart.unity()] = Complex64::new(1.0, 0.0);
    let mut p = CMatrix::zeros(n, n);
    for i in 0..n {
        let mut v = e.clone();
        for j in 0..n {
            if j != i {
                v = (&l * &v - v.clone() * u[j]) / (u[i] - u[j]);
            }
        }
        p.set_column(i, &v);
    }
    let mut psi1 = Vec::with_capacity(n);
    let mut psi = CMatrix::zeros(n, n);
    let eta_norm = eta.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for i in 0..n {
        let col = p.column(i).into_owned();
        let eta_col = &eta * &col;
        let q = (col.transpose() * &eta_col)[(0, 0)];
        let scale = col.norm().powi(2) * eta_norm;
        if q.norm() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::FrameBreakdown(format!("idempotent {} has zero length", i + 1)));
        }
        let r = q.sqrt();
        psi1.push(r);
        for a in 0..n {
            psi[(i, a)] = eta_col[a] / r;
        }
    }
    let mu = qmatrix_to_complex(&chart.mu_matrix());
    let psi_inv = psi.clone().try_inverse().ok_or_else(|| Error::FrameBreakdown("Ψ is singular".into()))?;
    let v = &psi * &mu * &psi_inv;
    let v = (&v - v.transpose()) * Complex64::new(0.5, 0.0);
    Ok(CanonicalFrame { t: t.to_vec(), u, psi, psi1, idempotents: p, mu, v, signs: vec![1; n], ordering })
}

impl CanonicalFrame {
    pub fn dim(&self) -> usize {
        self.u.len()
    }

    /// `J = det(∂t^α/∂u_i)`.
    pub fn jacobian_det(&self) -> Complex64 {
        self.idempotents.determinant()
    }

    pub fn psi1_product(&self) -> Complex64 {
        self.psi1.iter().product()
    }

    /// Flips the sign of `ψ_{i1}` and row `i` of `Ψ`.
    pub fn flip_sign(&mut self, i: usize) {
        self.signs[i] = -self.signs[i];
        self.psi1[i] = -self.psi1[i];
        for a in 0..self.dim() {
            self.psi[(i, a)] = -self.psi[(i, a)];
        }
        for j in 0..self.dim() {
            if j != i {
                self.v[(i, j)] = -self.v[(i, j)];
                self.v[(j, i)] = -self.v[(j, i)];
            }
        }
    }

    /// `du/ds` for a flat-coordinate velocity `dt/ds`.
    pub fn canonical_velocity(&self, tdot: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.dim();
        let rhs = nalgebra::DVector::from_iterator(n, tdot.iter().copied());
        let sol = self
            .idempotents
            .clone()
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::FrameBreakdown("idempotent matrix is singular".into()))?;
        Ok(sol.iter().copied().collect())
    }
}

/// `V_1..V_n` and the elementary matrices `E_i`.
#[derive(Clone, Debug)]
pub struct ViSet {
    pub v: Vec<CMatrix>,
    pub e: Vec<CMatrix>,
}

/// `(V_i)_{jk} = (δ_{ij} V_{ik} − δ_{ik} V_{ji}) / (u_j − u_k)`, `j ≠ k`.
pub fn vi_matrices_from(u: &[Complex64], v: &CMatrix) -> Result<ViSet> {
    let n = u.len();
    for i in 0..n {
        for j in i + 1..n {
            if u[i] == u[j] {
                return Err(Error::CoincidentCoordinates);
            }
        }
    }
    let mut vs = Vec::with_capacity(n);
    let mut es = Vec::with_capacity(n);
    for i in 0..n {
        let mut m = CMatrix::zeros(n, n);
        for k in 0..n {
            if k != i {
                m[(i, k)] = v[(i, k)] / (u[i] - u[k]);
                m[(k, i)] = -v[(k, i)] / (u[k] - u[i]);
            }
        }
        vs.push(m);
        let mut ei = CMatrix::zeros(n, n);
        ei[(i, i)] = Complex64::new(1.0, 0.0);
        es.push(ei);
    }
    Ok(ViSet { v: vs, e: es })
}

pub fn vi_matrices(frame: &CanonicalFrame) -> Result<ViSet> {
    vi_matrices_from(&frame.u, &frame.v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;
    use crate::algebra::QMatrix;
    use crate::singularity::build_an_chart;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn one_dimensional() {
        let ch = FMChart::one_dimensional();
        let f = canonical_frame(&ch, &[c(2.5)]).unwrap();
        assert!((f.u[0] - c(2.5)).norm() < 1e-14);
        assert!((f.psi[(0, 0)] - c(1.0)).norm() < 1e-14);
        assert!(f.v[(0, 0)].norm() < 1e-14);
    }

    #[test]
    fn two_idempotent_algebra() {
        // e_1 e_1 = e_1, e_2 e_2 = e_2, unity e_1 + e_2 in the basis
        // f_1 = e_1 + e_2, f_2 = e_1 − e_2: f_2² = f_1.
        let eta = QMatrix::from_i64(&[vec![2, 0], vec![0, 2]]).unwrap();
        let mut cl = vec![vec![vec![int(0); 2]; 2]; 2];
        cl[0][0][0] = int(2);
        for (a, b, g) in [(0, 1, 1), (1, 0, 1), (1, 1, 0)] {
            cl[a][b][g] = int(2);
        }
        let ch = FMChart::cubic(eta, &cl, &[int(1), int(1)], int(0), 0).unwrap();
        let f = canonical_frame(&ch, &[c(1.0), c(0.5)]).unwrap();
        // u = t1 ± t2
        assert!((f.u[0] - c(0.5)).norm() < 1e-12 && (f.u[1] - c(1.5)).norm() < 1e-12);
        let g = f.psi.transpose() * &f.psi;
        assert!((g - ch.eta_f64()).norm() < 1e-12);
    }

    #[test]
    fn a3_frame_identities() {
        let ch = build_an_chart(3).unwrap();
        let t = [c(0.3), c(-0.7), c(1.1)];
        let f = canonical_frame(&ch, &t).unwrap();
        assert!((f.psi.transpose() * &f.psi - ch.eta_f64()).norm() < 1e-10);
        assert!((&f.v + f.v.transpose()).norm() < 1e-12);
        let mut ev: Vec<Complex64> = f.v.clone().schur().eigenvalues().unwrap().iter().copied().collect();
        ev.sort_by(|a, b| a.re.total_cmp(&b.re));
        for (x, y) in ev.iter().zip([-0.25, 0.0, 0.25]) {
            assert!((x - c(y)).norm() < 1e-8);
        }
        // du_j(π_i) = δ_ij by finite differences
        let h = 1e-6;
        for i in 0..3 {
            let dir: Vec<Complex64> = (0..3).map(|a| f.idempotents[(a, i)]).collect();
            let plus: Vec<Complex64> = t.iter().zip(&dir).map(|(x, d)| x + d * h).collect();
            let minus: Vec<Complex64> = t.iter().zip(&dir).map(|(x, d)| x - d * h).collect();
            let up = canonical_coordinates(&ch, &plus).unwrap();
            let um = canonical_coordinates(&ch, &minus).unwrap();
            let near = |w: &[Complex64], z: Complex64| {
                *w.iter().min_by(|a, b| (*a - z).norm().total_cmp(&(*b - z).norm())).unwrap()
            };
            for j in 0..3 {
                let d = (near(&up, f.u[j]) - near(&um, f.u[j])) / (2.0 * h);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((d - c(want)).norm() < 1e-6, "{i} {j} {d}");
            }
        }
    }

    #[test]
    fn vi_two_by_two() {
        let u = [c(1.0), c(3.0)];
        let v = CMatrix::from_row_slice(2, 2, &[c(0.0), c(0.7), c(-0.7), c(0.0)]);
        let s = vi_matrices_from(&u, &v).unwrap();
        assert!((s.v[0][(0, 1)] - c(0.7 / (1.0 - 3.0))).norm() < 1e-15);
        assert!((&s.v[0] + &s.v[1]).norm() < 1e-15);
        let um = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(u.to_vec()));
        for i in 0..2 {
            let lhs = &um * &s.v[i] - &s.v[i] * &um;
            let rhs = &s.e[i] * &v - &v * &s.e[i];
            assert!((lhs - rhs).norm() < 1e-14);
        }
    }
}
