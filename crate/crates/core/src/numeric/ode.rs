use num_complex::Complex64;

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B_LOW: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

pub const MIN_STEP: f64 = 1e-14;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub steps: usize,
    pub rejected: usize,
}

/// Dormand–Prince 5(4) on complex vectors over `[s0, s1]`.
///
/// A failing right-hand side or an inadmissible stage abscissa rejects the
/// step. `on_step` sees every accepted `(s, y)`.
pub fn dopri5<F, G, O>(
    mut f: F,
    mut admissible: G,
    y0: &[Complex64],
    s0: f64,
    s1: f64,
    tol: f64,
    mut on_step: O,
) -> Result<(Vec<Complex64>, OdeStats)>
where
    F: FnMut(f64, &[Complex64]) -> Result<Vec<Complex64>>,
    G: FnMut(f64) -> bool,
    O: FnMut(f64, &[Complex64]),
{
    if !(tol > 1e-15) || !tol.is_finite() {
        return Err(Error::Tolerance(tol));
    }
    let dim = y0.len();
    let mut y = y0.to_vec();
    let mut s = s0;
    let span = s1 - s0;
    let mut h = (span * 1e-2).max(MIN_STEP);
    let mut stats = OdeStats::default();
    if span <= 0.0 {
        return Ok((y, stats));
    }
    let mut k: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); dim]; 7];
    while s < s1 {
        if s + h > s1 {
            h = s1 - s;
        }
        if h < MIN_STEP && s1 - s > MIN_STEP {
            return Err(Error::StepUnderflow(s));
        }
        let mut ok = true;
        for st in 0..7 {
            let sa = s + C[st] * h;
            if !admissible(sa) {
                ok = false;
                break;
            }
            let mut ys = y.clone();
            for (j, kj) in k.iter().enumerate().take(st) {
                let a = A[st][j];
                if a != 0.0 {
                    for (yi, ki) in ys.iter_mut().zip(kj) {
                        *yi += ki * (a * h);
                    }
                }
            }
            match f(sa, &ys) {
                Ok(v) => k[st] = v,
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            stats.rejected += 1;
            h *= 0.25;
            continue;
        }
        let mut y_new = y.clone();
        let mut err: f64 = 0.0;
        for i in 0..dim {
            let mut incr = Complex64::new(0.0, 0.0);
            let mut e = Complex64::new(0.0, 0.0);
            for st in 0..7 {
                incr += k[st][i] * B[st];
                e += k[st][i] * (B[st] - B_LOW[st]);
            }
            y_new[i] += incr * h;
            let scale = tol + tol * y[i].norm().max(y_new[i].norm());
            err = err.max((e * h).norm() / scale);
        }
        if err <= 1.0 {
            s += h;
            y = y_new;
            stats.steps += 1;
            on_step(s, &y);
        } else {
            stats.rejected += 1;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    Ok((y, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotates() {
        // y' = i y, y(0) = 1 over [0, π]
        let (y, stats) = dopri5(
            |_, y| Ok(vec![y[0] * Complex64::new(0.0, 1.0)]),
            |_| true,
            &[Complex64::new(1.0, 0.0)],
            0.0,
            std::f64::consts::PI,
            1e-12,
            |_, _| {},
        )
        .unwrap();
        assert!((y[0] + 1.0).norm() < 1e-10);
        assert!(stats.steps > 0);
    }

    #[test]
    fn rejects_bad_tolerance() {
        let r = dopri5(|_, y| Ok(y.to_vec()), |_| true, &[Complex64::new(1.0, 0.0)], 0.0, 1.0, 0.0, |_, _| {});
        assert!(matches!(r, Err(Error::Tolerance(_))));
    }
}
