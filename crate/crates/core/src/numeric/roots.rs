use num_complex::Complex64;

use crate::error::{Error, Result};

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// `‖c‖₁ max(1, |z|)^deg`, the scale of the norm-wise backward-error test.
fn abs_scale(coeffs: &[Complex64], z: Complex64) -> f64 {
    let norm: f64 = coeffs.iter().map(|c| c.norm()).sum();
    norm * z.norm().max(1.0).powi(coeffs.len() as i32 - 1)
}

/// All complex roots (with multiplicity) of `Σ coeffs[j] z^j`, by
/// Aberth–Ehrlich iteration. `tol` bounds the relative backward error.
pub fn polynomial_roots(coeffs: &[Complex64], tol: f64) -> Result<Vec<Complex64>> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|v| v.norm() == 0.0) {
        c.pop();
    }
    let deg = c.len().saturating_sub(1);
    if c.is_empty() {
        return Err(Error::Invalid("zero polynomial has no isolated roots".into()));
    }
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = c[deg];
    let c: Vec<Complex64> = c.iter().map(|v| v / lead).collect();
    // Cauchy bound for the initial circle.
    let radius = 1.0 + c[..deg].iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(radius * 0.5 + 0.1, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / deg as f64 + 0.4))
        .collect();
    let mut converged = vec![false; deg];
    for _ in 0..500 {
        let mut all = true;
        for i in 0..deg {
            if converged[i] {
                continue;
            }
            let (p, dp) = horner(&c, z[i]);
            if p.norm() <= tol * abs_scale(&c, z[i]) {
                converged[i] = true;
                continue;
            }
            all = false;
            let ratio = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..deg {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() > 0.0 {
                        s += Complex64::new(1.0, 0.0) / d;
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - ratio * s;
            let step = if denom.norm() > 0.0 && dp.norm() > 0.0 { ratio / denom } else { Complex64::new(tol.max(1e-8), 0.0) };
            z[i] -= step;
        }
        if all {
            break;
        }
    }
    // Newton polishing, kept only where it lowers the residual.
    for zi in z.iter_mut() {
        for _ in 0..4 {
            let (p, dp) = horner(&c, *zi);
            if p.norm() == 0.0 || dp.norm() == 0.0 {
                break;
            }
            let cand = *zi - p / dp;
            if horner(&c, cand).0.norm() < p.norm() {
                *zi = cand;
            } else {
                break;
            }
        }
    }
    let worst = z
        .iter()
        .map(|&zi| {
            let (p, _) = horner(&c, zi);
            p.norm() / abs_scale(&c, zi).max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max);
    if !(worst <= tol.max(64.0 * f64::EPSILON)) {
        return Err(Error::NoConvergence(tol));
    }
    Ok(z)
}

/// Matches two multisets of complex numbers greedily and returns the largest
/// pairing distance (infinite when the sizes differ).
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("same length");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn cubic_roots() {
        // (z-1)(z-2)(z+3) = z^3 - 7z + 6
        let r = polynomial_roots(&[c(6.0), c(-7.0), c(0.0), c(1.0)], 1e-14).unwrap();
        let expected = [c(1.0), c(2.0), c(-3.0)];
        assert!(multiset_distance(&r, &expected) < 1e-10);
    }

    #[test]
    fn double_root() {
        let r = polynomial_roots(&[c(0.0), c(0.0), c(3.0)], 1e-12).unwrap();
        assert!(r.iter().all(|z| z.norm() < 1e-5));
    }
}
