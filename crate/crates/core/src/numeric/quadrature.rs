use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<(Complex64, f64)>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let (f1, f2) = (f(c - x)?, f(c + x)?);
        kron += (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    Ok((kron * h, ((kron - gauss) * h).norm()))
}

/// Adaptive Gauss–Kronrod (7, 15) quadrature of a complex integrand on
/// `[a, b]` with absolute tolerance `tol`.
pub fn integrate_adaptive<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<Complex64>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let mut total = Complex64::new(0.0, 0.0);
    let mut stack = vec![(a, b, tol, 0u32)];
    while let Some((lo, hi, eps, depth)) = stack.pop() {
        let (v, err) = gk15(&mut f, lo, hi)?;
        if err <= eps.max(1e-15 * v.norm()) || depth >= 40 {
            if depth >= 40 && err > eps {
                return Err(Error::Tolerance(tol));
            }
            total += v;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, eps / 2.0, depth + 1));
            stack.push((mid, hi, eps / 2.0, depth + 1));
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_exponential() {
        let v = integrate_adaptive(|x| Ok(Complex64::new(0.0, x).exp()), 0.0, std::f64::consts::PI, 1e-13).unwrap();
        assert!((v - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn integrates_log_singularity_nearby() {
        let v = integrate_adaptive(|x| Ok(Complex64::new(1.0 / (x + 1e-3), 0.0)), 0.0, 1.0, 1e-10).unwrap();
        assert!((v.re - (1.001f64 / 1e-3).ln()).abs() < 1e-9);
    }
}
