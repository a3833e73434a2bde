//! Isomonodromic flows `∂_i V = [V_i, V]`, the tau-function quadrature and
//! the G-function of a semisimple chart.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::frame::{canonical_frame, check_margin, vi_matrices_from, CMatrix, CanonicalFrame};
use crate::frobenius::chart::qmatrix_to_complex;
use crate::frobenius::FMChart;
use crate::numeric::{dopri5, integrate_adaptive, OdeStats};

fn cz() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `(u, V)` with `V` skew, stored as its strict upper triangle (row major).
#[derive(Clone, Debug, PartialEq)]
pub struct IsomonodromyState {
    pub u: Vec<Complex64>,
    pub upper: Vec<Complex64>,
}

pub fn upper_len(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn upper_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

impl IsomonodromyState {
    pub fn new(u: Vec<Complex64>, upper: Vec<Complex64>) -> Result<Self> {
        if upper.len() != upper_len(u.len()) {
            return Err(Error::Invalid(format!(
                "expected {} upper-triangle entries for n = {}, got {}",
                upper_len(u.len()),
                u.len(),
                upper.len()
            )));
        }
        Ok(IsomonodromyState { u, upper })
    }

    /// Reads the strict upper triangle of `v`.
    pub fn from_matrix(u: Vec<Complex64>, v: &CMatrix) -> Result<Self> {
        let n = u.len();
        if v.nrows() != n || v.ncols() != n {
            return Err(Error::Invalid("V has the wrong shape".into()));
        }
        let mut upper = Vec::with_capacity(upper_len(n));
        for i in 0..n {
            for j in i + 1..n {
                upper.push(v[(i, j)]);
            }
        }
        Ok(IsomonodromyState { u, upper })
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn v(&self) -> CMatrix {
        matrix_from_upper(self.dim(), &self.upper)
    }
}

pub fn matrix_from_upper(n: usize, upper: &[Complex64]) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let x = upper[upper_index(n, i, j)];
            m[(i, j)] = x;
            m[(j, i)] = -x;
        }
    }
    m
}

fn distinct(u: &[Complex64]) -> Result<()> {
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            if u[i] == u[j] {
                return Err(Error::CoincidentCoordinates);
            }
        }
    }
    Ok(())
}

/// `H_i = ½ Σ_{j≠i} V_{ij}² / (u_i − u_j)`.
pub fn hamiltonians(state: &IsomonodromyState) -> Result<Vec<Complex64>> {
    hamiltonians_of(&state.u, &state.v())
}

pub fn hamiltonians_of(u: &[Complex64], v: &CMatrix) -> Result<Vec<Complex64>> {
    distinct(u)?;
    let n = u.len();
    Ok((0..n)
        .map(|i| {
            (0..n).filter(|&j| j != i).map(|j| v[(i, j)] * v[(i, j)] / (u[i] - u[j])).sum::<Complex64>() * 0.5
        })
        .collect())
}

/// `∂_i V = [V_i, V]`.
pub fn flow_rhs(i: usize, state: &IsomonodromyState) -> Result<CMatrix> {
    if i >= state.dim() {
        return Err(Error::IndexOutOfRange { index: i, arity: state.dim() });
    }
    let v = state.v();
    let vi = vi_matrices_from(&state.u, &v)?;
    Ok(&vi.v[i] * &v - &v * &vi.v[i])
}

/// Skew matrix of partials `∂H_i/∂V_{jk}`, `j < k`, by unit-step central
/// differences (exact for the quadratic `H_i`).
pub fn hamiltonian_gradient(i: usize, state: &IsomonodromyState) -> Result<CMatrix> {
    let n = state.dim();
    let mut g = vec![cz(); upper_len(n)];
    for (k, slot) in g.iter_mut().enumerate() {
        let mut plus = state.clone();
        let mut minus = state.clone();
        plus.upper[k] += 1.0;
        minus.upper[k] -= 1.0;
        *slot = (hamiltonians(&plus)?[i] - hamiltonians(&minus)?[i]) * 0.5;
    }
    Ok(matrix_from_upper(n, &g))
}

/// `{V, H_i} = [∇H_i, V]` for the linear Poisson structure on skew matrices.
pub fn poisson_flow(i: usize, state: &IsomonodromyState) -> Result<CMatrix> {
    let g = hamiltonian_gradient(i, state)?;
    let v = state.v();
    Ok(&g * &v - &v * &g)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectorySample {
    /// Segment index plus the position inside the segment.
    pub param: f64,
    pub u: Vec<Complex64>,
    pub upper: Vec<Complex64>,
    pub h: Vec<Complex64>,
    pub log_tau: Complex64,
}

#[derive(Clone, Debug)]
pub struct IsomonodromyTrajectory {
    pub samples: Vec<TrajectorySample>,
    pub stats: OdeStats,
    pub tol: f64,
}

impl IsomonodromyTrajectory {
    pub fn last(&self) -> &TrajectorySample {
        self.samples.last().expect("trajectory has the initial sample")
    }

    pub fn final_state(&self) -> IsomonodromyState {
        let s = self.last();
        IsomonodromyState { u: s.u.clone(), upper: s.upper.clone() }
    }

    pub fn to_csv(&self) -> String {
        let n = self.samples.first().map_or(0, |s| s.u.len());
        let mut head = vec!["param".to_string()];
        for i in 1..=n {
            head.push(format!("u{i}_re"));
            head.push(format!("u{i}_im"));
        }
        for i in 1..=n {
            for j in i + 1..=n {
                head.push(format!("v{i}{j}_re"));
                head.push(format!("v{i}{j}_im"));
            }
        }
        for i in 1..=n {
            head.push(format!("h{i}_re"));
            head.push(format!("h{i}_im"));
        }
        head.push("log_tau_re".into());
        head.push("log_tau_im".into());
        let mut out = head.join(",");
        out.push('\n');
        for s in &self.samples {
            let mut row = vec![format!("{:.17e}", s.param)];
            for z in s.u.iter().chain(&s.upper).chain(&s.h).chain(std::iter::once(&s.log_tau)) {
                row.push(format!("{:.17e}", z.re));
                row.push(format!("{:.17e}", z.im));
            }
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

fn segment_rhs(
    n: usize,
    ua: &[Complex64],
    du: &[Complex64],
    s: f64,
    y: &[Complex64],
) -> Result<Vec<Complex64>> {
    let u: Vec<Complex64> = ua.iter().zip(du).map(|(a, d)| a + d * s).collect();
    let m = upper_len(n);
    let v = matrix_from_upper(n, &y[..m]);
    let vi = vi_matrices_from(&u, &v)?;
    let mut dv = CMatrix::zeros(n, n);
    for (i, d) in du.iter().enumerate() {
        if d.norm() != 0.0 {
            dv += (&vi.v[i] * &v - &v * &vi.v[i]) * *d;
        }
    }
    let h = hamiltonians_of(&u, &v)?;
    let dtau: Complex64 = h.iter().zip(du).map(|(a, b)| a * b).sum();
    let mut out = Vec::with_capacity(m + 1);
    for i in 0..n {
        for j in i + 1..n {
            out.push(dv[(i, j)]);
        }
    }
    out.push(dtau);
    Ok(out)
}

/// Integrates `dV = Σ_i [V_i, V] du_i` and `d log τ = Σ_i H_i du_i` along
/// straight segments joining the waypoints; the first waypoint must be the
/// initial `u`.
pub fn integrate(state0: &IsomonodromyState, path: &[Vec<Complex64>], tol: f64) -> Result<IsomonodromyTrajectory> {
    let n = state0.dim();
    if path.is_empty() {
        return Err(Error::Invalid("path needs at least one waypoint".into()));
    }
    if path.iter().any(|w| w.len() != n) {
        return Err(Error::Invalid(format!("every waypoint needs {n} coordinates")));
    }
    let start_err: f64 = path[0].iter().zip(&state0.u).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    if start_err > 1e-12 * (1.0 + state0.u.iter().map(|z| z.norm()).fold(0.0, f64::max)) {
        return Err(Error::Invalid("first waypoint differs from the initial u".into()));
    }
    check_margin(&state0.u)?;
    let m = upper_len(n);
    let mut y: Vec<Complex64> = state0.upper.clone();
    y.push(cz());
    let h0 = hamiltonians(state0)?;
    let mut samples = vec![TrajectorySample { param: 0.0, u: state0.u.clone(), upper: state0.upper.clone(), h: h0, log_tau: cz() }];
    let mut stats = OdeStats::default();
    for (seg, w) in path.windows(2).enumerate() {
        let ua = w[0].clone();
        let du: Vec<Complex64> = w[1].iter().zip(&w[0]).map(|(b, a)| b - a).collect();
        let at = |s: f64| -> Vec<Complex64> { ua.iter().zip(&du).map(|(a, d)| a + d * s).collect() };
        check_margin(&at(1.0))?;
        let mut pending = Vec::new();
        let (y_end, st) = dopri5(
            |s, y| segment_rhs(n, &ua, &du, s, y),
            |s| check_margin(&at(s)).is_ok(),
            &y,
            0.0,
            1.0,
            tol,
            |s, y| pending.push((s, y.to_vec())),
        )?;
        stats.steps += st.steps;
        stats.rejected += st.rejected;
        for (s, ys) in pending {
            let u = at(s);
            let v = matrix_from_upper(n, &ys[..m]);
            let h = hamiltonians_of(&u, &v)?;
            samples.push(TrajectorySample { param: seg as f64 + s, u, upper: ys[..m].to_vec(), h, log_tau: ys[m] });
        }
        y = y_end;
    }
    Ok(IsomonodromyTrajectory { samples, stats, tol })
}

/// A path in flat coordinates parametrized by `s ∈ [0, 1]`.
#[derive(Clone, Debug)]
pub enum FlatPath {
    Segment { from: Vec<Complex64>, to: Vec<Complex64> },
    /// The flow of `E` for time `duration`, starting at `start`.
    Euler { start: Vec<Complex64>, duration: f64, generator: CMatrix },
}

impl FlatPath {
    pub fn segment(from: &[Complex64], to: &[Complex64]) -> Self {
        FlatPath::Segment { from: from.to_vec(), to: to.to_vec() }
    }

    pub fn euler(chart: &FMChart, start: &[Complex64], duration: f64) -> Self {
        let n = chart.dim();
        let l = qmatrix_to_complex(&chart.euler().linear);
        let mut g = CMatrix::zeros(n + 1, n + 1);
        g.view_mut((0, 0), (n, n)).copy_from(&l);
        for a in 0..n {
            g[(a, n)] = Complex64::new(crate::algebra::rational::to_f64(&chart.euler().constant[a]), 0.0);
        }
        FlatPath::Euler { start: start.to_vec(), duration, generator: g }
    }

    /// Position and velocity at `s`.
    pub fn at(&self, s: f64) -> (Vec<Complex64>, Vec<Complex64>) {
        match self {
            FlatPath::Segment { from, to } => {
                let d: Vec<Complex64> = to.iter().zip(from).map(|(b, a)| b - a).collect();
                (from.iter().zip(&d).map(|(a, x)| a + x * s).collect(), d)
            }
            FlatPath::Euler { start, duration, generator } => {
                let n = start.len();
                let mut x = nalgebra::DVector::from_element(n + 1, Complex64::new(1.0, 0.0));
                for a in 0..n {
                    x[a] = start[a];
                }
                let e: DMatrix<Complex64> = (generator * Complex64::new(s * duration, 0.0)).exp();
                let y = e * x;
                let dy = generator * &y * Complex64::new(*duration, 0.0);
                ((0..n).map(|a| y[a]).collect(), (0..n).map(|a| dy[a]).collect())
            }
        }
    }

    pub fn start(&self) -> Vec<Complex64> {
        self.at(0.0).0
    }

    pub fn end(&self) -> Vec<Complex64> {
        self.at(1.0).0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GValue {
    pub base: Vec<Complex64>,
    pub target: Vec<Complex64>,
    pub delta_g: Complex64,
    pub delta_log_tau: Complex64,
    pub delta_log_j: Complex64,
}

/// `Σ H_i du_i/ds` along the path, from the chart's own frames.
fn tau_integrand(chart: &FMChart, path: &FlatPath, s: f64) -> Result<Complex64> {
    let (t, tdot) = path.at(s);
    let frame = canonical_frame(chart, &t)?;
    let du = frame.canonical_velocity(&tdot)?;
    let h = hamiltonians_of(&frame.u, &frame.v)?;
    Ok(h.iter().zip(&du).map(|(a, b)| a * b).sum())
}

/// Reorders the columns of `p` so its canonical coordinates follow `prev`
/// by nearest matching.
fn track(prev: &[Complex64], frame: &CanonicalFrame) -> Result<(Vec<Complex64>, Complex64)> {
    let n = prev.len();
    let mut used = vec![false; n];
    let mut perm = vec![0; n];
    for (i, p) in prev.iter().enumerate() {
        let j = (0..n)
            .filter(|&j| !used[j])
            .min_by(|&a, &b| (frame.u[a] - p).norm().total_cmp(&(frame.u[b] - p).norm()))
            .expect("nonempty");
        used[j] = true;
        perm[i] = j;
    }
    let mut cols = CMatrix::zeros(n, n);
    for (i, &j) in perm.iter().enumerate() {
        cols.set_column(i, &frame.idempotents.column(j));
    }
    Ok((perm.iter().map(|&j| frame.u[j]).collect(), cols.determinant()))
}

fn log_j_change(chart: &FMChart, path: &FlatPath) -> Result<Complex64> {
    fn go(
        chart: &FMChart,
        path: &FlatPath,
        s0: f64,
        s1: f64,
        u0: &[Complex64],
        j0: Complex64,
        depth: u32,
    ) -> Result<(Complex64, Vec<Complex64>, Complex64)> {
        let f1 = canonical_frame(chart, &path.at(s1).0)?;
        let (u1, j1) = track(u0, &f1)?;
        let r = (j1 / j0).ln();
        let moved = u1.iter().zip(u0).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let gap = u0
            .iter()
            .enumerate()
            .flat_map(|(i, a)| u0.iter().skip(i + 1).map(move |b| (a - b).norm()))
            .fold(f64::INFINITY, f64::min);
        if r.im.abs() < 0.3 && moved < 0.25 * gap {
            return Ok((r, u1, j1));
        }
        if depth > 30 {
            return Err(Error::BranchTracking(format!("Jacobian phase jumps near s = {s0:.6}")));
        }
        let mid = 0.5 * (s0 + s1);
        let (ra, ua, ja) = go(chart, path, s0, mid, u0, j0, depth + 1)?;
        let (rb, ub, jb) = go(chart, path, mid, s1, &ua, ja, depth + 1)?;
        Ok((ra + rb, ub, jb))
    }
    let f0 = canonical_frame(chart, &path.start())?;
    let u0 = f0.u.clone();
    let j0 = f0.jacobian_det();
    let steps = 32;
    let mut acc = cz();
    let (mut u, mut j) = (u0, j0);
    for k in 0..steps {
        let (r, u1, j1) = go(chart, path, k as f64 / steps as f64, (k + 1) as f64 / steps as f64, &u, j, 0)?;
        acc += r;
        u = u1;
        j = j1;
    }
    Ok(acc)
}

/// `ΔG = Δ log τ − Δ log J / 24` along a sequence of paths.
pub fn g_function_paths(chart: &FMChart, paths: &[FlatPath], tol: f64) -> Result<GValue> {
    if !(tol > 0.0) {
        return Err(Error::Tolerance(tol));
    }
    let first = paths.first().ok_or_else(|| Error::Invalid("empty path".into()))?;
    let mut dtau = cz();
    let mut dj = cz();
    for p in paths {
        // Sample for semisimplicity before integrating.
        for k in 0..=16 {
            canonical_frame(chart, &p.at(k as f64 / 16.0).0)?;
        }
        dtau += integrate_adaptive(|s| tau_integrand(chart, p, s), 0.0, 1.0, tol)?;
        dj += log_j_change(chart, p)?;
    }
    Ok(GValue {
        base: first.start(),
        target: paths.last().expect("nonempty").end(),
        delta_g: dtau - dj / 24.0,
        delta_log_tau: dtau,
        delta_log_j: dj,
    })
}

/// `ΔG` along the straight segment from `t0` to `t1`.
pub fn g_function(chart: &FMChart, t0: &[Complex64], t1: &[Complex64], tol: f64) -> Result<GValue> {
    if t0 == t1 {
        canonical_frame(chart, t0)?;
        return Ok(GValue { base: t0.to_vec(), target: t1.to_vec(), delta_g: cz(), delta_log_tau: cz(), delta_log_j: cz() });
    }
    g_function_paths(chart, &[FlatPath::segment(t0, t1)], tol)
}

/// `ΔG` along the polyline through `points`.
pub fn g_function_polyline(chart: &FMChart, points: &[Vec<Complex64>], tol: f64) -> Result<GValue> {
    let paths: Vec<FlatPath> = points.windows(2).map(|w| FlatPath::segment(&w[0], &w[1])).collect();
    g_function_paths(chart, &paths, tol)
}

/// `Lie_E G` measured as `ΔG / duration` along the Euler flow from `t0`.
pub fn lie_euler_g(chart: &FMChart, t0: &[Complex64], duration: f64, tol: f64) -> Result<Complex64> {
    let g = g_function_paths(chart, &[FlatPath::euler(chart, t0, duration)], tol)?;
    Ok(g.delta_g / duration)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn two_by_two_hamiltonians() {
        let s = IsomonodromyState::new(vec![c(1.0), c(4.0)], vec![c(0.5)]).unwrap();
        let h = hamiltonians(&s).unwrap();
        assert!((h[0] - c(0.25 / (2.0 * -3.0))).norm() < 1e-15);
        assert!((h[0] + h[1]).norm() < 1e-15);
        assert!(flow_rhs(0, &s).unwrap().norm() < 1e-15);
    }

    #[test]
    fn three_by_three_rhs() {
        // V_12 = 1 only, u = (0, 1, 2).
        let s = IsomonodromyState::new(vec![c(0.0), c(1.0), c(2.0)], vec![c(1.0), c(0.0), c(0.0)]).unwrap();
        let r = flow_rhs(0, &s).unwrap();
        // V_1 has (1,2) entry V_12/(u_1 − u_2) = −1 and its negative at (2,1);
        // [V_1, V] = 0 because both live in the same so(2) block.
        assert!(r.norm() < 1e-15);
        let g = hamiltonian_gradient(0, &s).unwrap();
        let vi = vi_matrices_from(&s.u, &s.v()).unwrap();
        assert!((g - &vi.v[0]).norm() < 1e-12);
    }

    #[test]
    fn n2_tau_closed_form() {
        let v = c(0.8);
        let s = IsomonodromyState::new(vec![c(0.0), c(1.0)], vec![v]).unwrap();
        let path = vec![vec![c(0.0), c(1.0)], vec![c(0.5), c(3.0)], vec![c(-1.0), c(4.0)]];
        let tr = integrate(&s, &path, 1e-11).unwrap();
        let expected = v * v / 2.0 * ((c(-1.0) - c(4.0)) / (c(0.0) - c(1.0))).ln();
        assert!((tr.last().log_tau - expected).norm() < 1e-9);
        assert!((tr.last().upper[0] - v).norm() < 1e-12);
    }

    #[test]
    fn zero_v_is_static() {
        let s = IsomonodromyState::new(vec![c(0.0), c(1.0), c(3.0)], vec![cz(); 3]).unwrap();
        let path = vec![s.u.clone(), vec![c(0.5), c(2.0), c(5.0)]];
        let tr = integrate(&s, &path, 1e-10).unwrap();
        assert!(tr.last().log_tau.norm() < 1e-15);
        assert!(tr.last().upper.iter().all(|z| z.norm() < 1e-15));
        assert!(tr.to_csv().lines().count() == tr.samples.len() + 1);
    }

    #[test]
    fn a2_g_is_constant() {
        let ch = crate::singularity::build_an_chart(2).unwrap();
        let t0 = vec![c(0.3), c(1.0)];
        let t1 = vec![c(-0.7), c(0.1)];
        let g = g_function(&ch, &t0, &t1, 1e-12).unwrap();
        assert!(g.delta_log_tau.norm() > 1e-2);
        assert!(g.delta_g.norm() < 1e-10);
    }

    #[test]
    fn p2_leading_genus_one_term() {
        // G = −t₂/8 + O(e^{3t₂}) near the large-radius limit.
        let ch = crate::quantum::build_p2_chart(6).unwrap();
        let t0 = vec![c(0.1), c(-2.0), c(0.3)];
        let t1 = vec![c(0.4), c(-1.5), c(0.5)];
        let g = g_function(&ch, &t0, &t1, 1e-12).unwrap();
        assert!((g.delta_g + 0.0625).norm() < 1e-8);
        let l = lie_euler_g(&ch, &t0, 0.1, 1e-12).unwrap();
        assert!((l + 0.375).norm() < 1e-9);
    }
}
