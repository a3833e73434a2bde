//! Descendent two-point coefficients, hierarchy flow matrices and the
//! restricted genus-one free energy.

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::algebra::rational::Rational;
use crate::algebra::ExpSeries;
use crate::error::{Error, Result};
use crate::frobenius::deformed::{deformed_flat_coordinates, DeformedFlatSeries, SeriesMatrix};
use crate::frobenius::FMChart;
use crate::isomonodromy::{g_function, GValue};

/// `Ω(z, w) = Σ Ω_{p,q} z^p w^q` with `(Ω_{p,q})_{αβ} = Ω_{α,p;β,q}`.
#[derive(Clone, Debug)]
pub struct DescendentTable {
    pub order: usize,
    /// Indexed `[p][q]` for `p + q ≤ order`.
    pub omega: Vec<Vec<SeriesMatrix>>,
}

impl DescendentTable {
    /// `Ω_{α,p;β,q}` with 0-based `α, β`.
    pub fn get(&self, alpha: usize, p: usize, beta: usize, q: usize) -> Option<&ExpSeries> {
        self.omega.get(p)?.get(q)?.get(alpha)?.get(beta)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..=self.order).all(|p| {
            (0..=self.order - p).all(|q| {
                let a = &self.omega[p][q];
                let b = &self.omega[q][p];
                (0..a.len()).all(|i| (0..a.len()).all(|j| a[i][j] == b[j][i]))
            })
        })
    }
}

fn add_scaled(acc: &mut SeriesMatrix, m: &SeriesMatrix, k: &Rational) {
    for (ra, rm) in acc.iter_mut().zip(m) {
        for (x, y) in ra.iter_mut().zip(rm) {
            if !y.is_zero() {
                *x = &*x + &y.scale(k);
            }
        }
    }
}

/// Divides `Φ₀ᵀ(w)ηΦ₀(z) − η` by `z + w`.
pub fn omega_table(chart: &FMChart, order: usize) -> Result<DescendentTable> {
    let deformed = deformed_flat_coordinates(chart, order + 1)?;
    omega_table_from(chart, &deformed, order)
}

pub fn omega_table_from(chart: &FMChart, deformed: &DeformedFlatSeries, order: usize) -> Result<DescendentTable> {
    if deformed.order < order + 1 {
        return Err(Error::Invalid(format!(
            "deformed flat coordinates computed to order {}, need {}",
            deformed.order,
            order + 1
        )));
    }
    let n = chart.dim();
    let zero_m = || vec![vec![chart.zero_series(); n]; n];
    // Numerator coefficients of z^a w^b for a + b ≤ order + 1.
    let top = order + 1;
    let mut num: Vec<Vec<SeriesMatrix>> = Vec::with_capacity(top + 1);
    for a in 0..=top {
        let mut row = Vec::with_capacity(top + 1 - a);
        for b in 0..=top - a {
            let mut g = deformed.gram(chart, a, b);
            if a == 0 && b == 0 {
                add_scaled(&mut g, &crate::frobenius::deformed::constant_matrix(chart, chart.eta()), &-Rational::one());
            }
            row.push(g);
        }
        num.push(row);
    }
    for m in 0..=top {
        let mut acc = zero_m();
        let mut sign = Rational::one();
        for j in 0..=m {
            add_scaled(&mut acc, &num[j][m - j], &sign);
            sign = -sign;
        }
        if acc.iter().flatten().any(|s| !s.is_zero()) {
            return Err(Error::DivisionFailed(format!("numerator not divisible by z + w at total degree {m}")));
        }
    }
    let mut omega = Vec::with_capacity(order + 1);
    for p in 0..=order {
        let mut row = Vec::with_capacity(order + 1 - p);
        for q in 0..=order - p {
            let mut acc = zero_m();
            let mut sign = Rational::one();
            for j in 0..=q {
                add_scaled(&mut acc, &num[p + 1 + j][q - j], &sign);
                sign = -sign;
            }
            row.push(acc);
        }
        omega.push(row);
    }
    Ok(DescendentTable { order, omega })
}

/// `∂_{T^{α,p}} t = A(t) t_X` with `A^γ_ε = η^{γβ} ∂_β∂_ε θ_α^{(p+1)}`.
#[derive(Clone, Debug)]
pub struct HierarchyFlow {
    pub alpha: usize,
    pub p: usize,
    /// Row `γ`, column `ε`.
    pub a: SeriesMatrix,
}

pub fn hierarchy_flow(chart: &FMChart, alpha: usize, p: usize) -> Result<HierarchyFlow> {
    let deformed = deformed_flat_coordinates(chart, p + 1)?;
    hierarchy_flow_from(chart, &deformed, alpha, p)
}

pub fn hierarchy_flow_from(chart: &FMChart, deformed: &DeformedFlatSeries, alpha: usize, p: usize) -> Result<HierarchyFlow> {
    let n = chart.dim();
    if alpha >= n {
        return Err(Error::IndexOutOfRange { index: alpha, arity: n });
    }
    if deformed.order < p + 1 {
        return Err(Error::Invalid(format!("flow ({}, {p}) needs deformed order {}", alpha + 1, p + 1)));
    }
    let eta_inv = chart.eta_inv();
    let h = &deformed.theta[p + 1][alpha];
    let mut hess = Vec::with_capacity(n);
    for b in 0..n {
        let db = h.derivative(b)?;
        hess.push((0..n).map(|e| db.derivative(e)).collect::<Result<Vec<_>>>()?);
    }
    let a = (0..n)
        .map(|g| {
            (0..n)
                .map(|e| {
                    let mut acc = chart.zero_series();
                    for b in 0..n {
                        if !eta_inv[(g, b)].is_zero() {
                            acc = &acc + &hess[b][e].scale(&eta_inv[(g, b)]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    Ok(HierarchyFlow { alpha, p, a })
}

impl HierarchyFlow {
    pub fn is_identity(&self) -> bool {
        let n = self.a.len();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let s = &self.a[i][j];
                if i == j {
                    s.is_polynomial() && s.polynomial_part().as_constant() == Some(Rational::one())
                } else {
                    s.is_zero()
                }
            })
        })
    }

    pub fn eval(&self, t: &[Complex64]) -> Vec<Vec<Complex64>> {
        self.a.iter().map(|row| row.iter().map(|s| s.eval_complex(t)).collect()).collect()
    }
}

/// Jet variables `(t, t_X, t_XX)` packed as `3n` coordinates.
struct Jet {
    n: usize,
}

impl Jet {
    fn lift(&self, s: &ExpSeries) -> ExpSeries {
        s.extend_arity(3 * self.n)
    }

    fn var(&self, chart: &FMChart, block: usize, i: usize) -> Result<ExpSeries> {
        let base = chart.zero_series().extend_arity(3 * self.n);
        let v = crate::algebra::MultiPoly::var(3 * self.n, block * self.n + i);
        Ok(&base + &ExpSeries::from_poly(v))
    }

    /// `D_X f` for `f` depending on `t` and `t_X` only.
    fn dx(&self, chart: &FMChart, f: &ExpSeries) -> Result<ExpSeries> {
        let mut acc = f.zero_like();
        for d in 0..self.n {
            acc = &acc + &(&f.derivative(d)? * &self.var(chart, 1, d)?);
            acc = &acc + &(&f.derivative(self.n + d)? * &self.var(chart, 2, d)?);
        }
        Ok(acc)
    }

    /// `K = A(t) t_X`.
    fn field(&self, chart: &FMChart, a: &SeriesMatrix) -> Result<Vec<ExpSeries>> {
        let mut out = Vec::with_capacity(self.n);
        for row in a {
            let mut acc = self.lift(&chart.zero_series());
            for (e, s) in row.iter().enumerate() {
                if !s.is_zero() {
                    acc = &acc + &(&self.lift(s) * &self.var(chart, 1, e)?);
                }
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// Action of the evolutionary field `K` on a function of `(t, t_X)`.
    fn apply(&self, k: &[ExpSeries], dk: &[ExpSeries], f: &ExpSeries) -> Result<ExpSeries> {
        let mut acc = f.zero_like();
        for d in 0..self.n {
            acc = &acc + &(&f.derivative(d)? * &k[d]);
            acc = &acc + &(&f.derivative(self.n + d)? * &dk[d]);
        }
        Ok(acc)
    }
}

/// Components of `[K_a, K_b]` as series in `(t, t_X, t_XX)`.
pub fn flow_commutator(chart: &FMChart, fa: &HierarchyFlow, fb: &HierarchyFlow) -> Result<Vec<ExpSeries>> {
    let jet = Jet { n: chart.dim() };
    let ka = jet.field(chart, &fa.a)?;
    let kb = jet.field(chart, &fb.a)?;
    let dka = ka.iter().map(|f| jet.dx(chart, f)).collect::<Result<Vec<_>>>()?;
    let dkb = kb.iter().map(|f| jet.dx(chart, f)).collect::<Result<Vec<_>>>()?;
    (0..jet.n)
        .map(|g| Ok(&jet.apply(&ka, &dka, &kb[g])? - &jet.apply(&kb, &dkb, &ka[g])?))
        .collect()
}

/// `max_γ |[K_a, K_b]^γ|` at a jet point.
pub fn flow_commutator_at(
    chart: &FMChart,
    fa: &HierarchyFlow,
    fb: &HierarchyFlow,
    t: &[Complex64],
    tx: &[Complex64],
    txx: &[Complex64],
) -> Result<f64> {
    let n = chart.dim();
    if t.len() != n || tx.len() != n || txx.len() != n {
        return Err(Error::Invalid(format!("jet components need {n} coordinates")));
    }
    let ea = fa.eval(t);
    let eb = fb.eval(t);
    // Derivatives of A along t by evaluating ∂_δ A symbolically.
    let grad = |f: &HierarchyFlow| -> Result<Vec<Vec<Vec<Complex64>>>> {
        (0..n)
            .map(|d| f.a.iter().map(|row| row.iter().map(|s| Ok(s.derivative(d)?.eval_complex(t))).collect()).collect())
            .collect()
    };
    let ga = grad(fa)?;
    let gb = grad(fb)?;
    let mv = |m: &[Vec<Complex64>], v: &[Complex64]| -> Vec<Complex64> {
        m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    };
    let ka = mv(&ea, tx);
    let kb = mv(&eb, tx);
    let dk = |g: &[Vec<Vec<Complex64>>], e: &[Vec<Complex64>]| -> Vec<Complex64> {
        let mut out = mv(e, txx);
        for d in 0..n {
            let part = mv(&g[d], tx);
            for (o, p) in out.iter_mut().zip(part) {
                *o += p * tx[d];
            }
        }
        out
    };
    let dka = dk(&ga, &ea);
    let dkb = dk(&gb, &eb);
    let act = |k: &[Complex64], dk: &[Complex64], g: &[Vec<Vec<Complex64>>], e: &[Vec<Complex64>]| -> Vec<Complex64> {
        let mut out = mv(e, dk);
        for d in 0..n {
            let part = mv(&g[d], tx);
            for (o, p) in out.iter_mut().zip(part) {
                *o += p * k[d];
            }
        }
        out
    };
    let ab = act(&ka, &dka, &gb, &eb);
    let ba = act(&kb, &dkb, &ga, &ea);
    Ok(ab.iter().zip(&ba).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Genus1Value {
    pub t: Vec<Complex64>,
    pub tdot: Vec<Complex64>,
    /// `M_{αβ} = c_{αβγ} ṫ^γ`.
    pub m: Vec<Vec<Complex64>>,
    pub log_det_m: Complex64,
    pub g: GValue,
    pub value: Complex64,
}

/// `G(t) − G(base) + (1/24) log det M(t, ṫ)`.
pub fn genus1_restricted(chart: &FMChart, base: &[Complex64], t: &[Complex64], tdot: &[Complex64], tol: f64) -> Result<Genus1Value> {
    let n = chart.dim();
    if tdot.len() != n {
        return Err(Error::Invalid(format!("velocity needs {n} components")));
    }
    let lower = &chart.structure().lower;
    let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for a in 0..n {
        for b in 0..n {
            for (g, v) in tdot.iter().enumerate() {
                if !lower[a][b][g].is_zero() && *v != Complex64::new(0.0, 0.0) {
                    m[a][b] += lower[a][b][g].eval_complex(t) * v;
                }
            }
        }
    }
    let det = nalgebra::DMatrix::from_fn(n, n, |i, j| m[i][j]).determinant();
    let scale = m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max).powi(n as i32);
    if det.norm() <= 1e-13 * scale || det.norm() == 0.0 {
        return Err(Error::Singular("M(t, ṫ) is singular".into()));
    }
    let g = g_function(chart, base, t, tol)?;
    let log_det_m = det.ln();
    let value = g.delta_g + log_det_m / 24.0;
    Ok(Genus1Value { t: t.to_vec(), tdot: tdot.to_vec(), m, log_det_m, g, value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};
    use crate::algebra::{MultiPoly, QMatrix};
    use crate::frobenius::EulerField;
    use crate::singularity::build_an_chart;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn lowest_order_is_hessian() {
        let ch = build_an_chart(3).unwrap();
        let tab = omega_table(&ch, 2).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let h = ch.potential().derivative(a).unwrap().derivative(b).unwrap();
                assert_eq!(tab.get(a, 0, b, 0).unwrap(), &h);
            }
        }
        assert!(tab.is_symmetric());
    }

    #[test]
    fn one_dimensional_table() {
        // F = t³/6: θ^{(p)} = t^{p+1}/(p+1)!, Ω_{p,q} = t^{p+q+1}/((p+q+1) p! q!).
        let ch = FMChart::one_dimensional();
        let tab = omega_table(&ch, 3).unwrap();
        let fact = |k: i64| (1..=k).product::<i64>().max(1);
        for p in 0..=3usize {
            for q in 0..=3 - p {
                let k = (p + q + 1) as u32;
                let want = MultiPoly::var(1, 0).pow(k).scale(&rat(1, k as i64 * fact(p as i64) * fact(q as i64)));
                assert_eq!(tab.get(0, p, 0, q).unwrap().polynomial_part(), want, "p={p} q={q}");
            }
        }
        let f = hierarchy_flow(&ch, 0, 1).unwrap();
        assert_eq!(f.a[0][0].polynomial_part(), MultiPoly::var(1, 0));
    }

    #[test]
    fn flat_chart_table() {
        // Cubic-free potential: Φ₀ = I, so Ω vanishes beyond the quadratic data.
        let eta = QMatrix::from_i64(&[vec![0, 1], vec![1, 0]]).unwrap();
        let f = MultiPoly::var(2, 0).pow(2).scale(&rat(1, 2));
        let f = &f * &MultiPoly::var(2, 1);
        let e = EulerField::new(QMatrix::from_i64(&[vec![1, 0], vec![0, 1]]).unwrap(), vec![int(0), int(0)]).unwrap();
        let ch = FMChart::new(eta, ExpSeries::from_poly(f), e, int(0), 0).unwrap();
        let tab = omega_table(&ch, 2).unwrap();
        assert!(tab.is_symmetric());
        let id = hierarchy_flow(&ch, 0, 0).unwrap();
        assert!(id.is_identity());
    }

    #[test]
    fn first_flows_are_multiplication() {
        let ch = build_an_chart(3).unwrap();
        let c_up = &ch.structure().upper;
        for a in 0..3 {
            let f = hierarchy_flow(&ch, a, 0).unwrap();
            for g in 0..3 {
                for e in 0..3 {
                    assert_eq!(f.a[g][e], c_up[a][e][g]);
                }
            }
        }
        assert!(hierarchy_flow(&ch, ch.unity(), 0).unwrap().is_identity());
    }

    #[test]
    fn a2_flows_commute() {
        let ch = build_an_chart(2).unwrap();
        let d = deformed_flat_coordinates(&ch, 3).unwrap();
        let f1 = hierarchy_flow_from(&ch, &d, 1, 1).unwrap();
        let f2 = hierarchy_flow_from(&ch, &d, 0, 2).unwrap();
        assert!(flow_commutator(&ch, &f1, &f2).unwrap().iter().all(ExpSeries::is_zero));
        let t = [c(0.3), c(-0.4)];
        let r = flow_commutator_at(&ch, &f1, &f2, &t, &[c(1.0), c(2.0)], &[c(-0.5), c(0.7)]).unwrap();
        assert!(r < 1e-12);
    }

    #[test]
    fn non_commuting_fields_are_detected() {
        let ch = build_an_chart(2).unwrap();
        let d = deformed_flat_coordinates(&ch, 2).unwrap();
        let f1 = hierarchy_flow_from(&ch, &d, 1, 1).unwrap();
        let mut bent = hierarchy_flow_from(&ch, &d, 0, 1).unwrap();
        bent.a[0][0] = &bent.a[0][0] + &ExpSeries::from_poly(MultiPoly::var(2, 1).pow(2));
        assert!(!flow_commutator(&ch, &f1, &bent).unwrap().iter().all(ExpSeries::is_zero));
    }

    #[test]
    fn genus_one_unity_direction() {
        let ch = build_an_chart(3).unwrap();
        let base = vec![c(0.2), c(1.3), c(0.5)];
        let t = vec![c(0.3), c(1.2), c(0.55)];
        let e = vec![c(1.0), c(0.0), c(0.0)];
        let v = genus1_restricted(&ch, &base, &t, &e, 1e-11).unwrap();
        let det_eta = Complex64::new(-1.0, 0.0);
        assert!((v.log_det_m - det_eta.ln()).norm() < 1e-12);
        let w = genus1_restricted(&ch, &base, &t, &[c(0.3), c(1.2), c(-0.4)], 1e-11).unwrap();
        let scaled: Vec<Complex64> = w.tdot.iter().map(|x| x * 2.0).collect();
        let w2 = genus1_restricted(&ch, &base, &t, &scaled, 1e-11).unwrap();
        let shift = w2.value - w.value - c(3.0 * 2f64.ln() / 24.0);
        // Up to the branch of log det.
        let k = (shift.im / (2.0 * std::f64::consts::PI / 24.0)).round();
        assert!((shift - Complex64::new(0.0, k * 2.0 * std::f64::consts::PI / 24.0)).norm() < 1e-10);
    }

    #[test]
    fn genus_one_cubic() {
        let ch = FMChart::one_dimensional();
        let v = genus1_restricted(&ch, &[c(1.0)], &[c(2.0)], &[c(3.0)], 1e-11).unwrap();
        assert!((v.m[0][0] - c(3.0)).norm() < 1e-15);
        assert!((v.value - c(3f64.ln() / 24.0)).norm() < 1e-12);
    }
}
