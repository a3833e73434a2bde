use num_traits::{One, Zero};

use crate::algebra::rational::{self, Rational};
use crate::algebra::ExpSeries;

use super::chart::FMChart;

pub type Tensor3 = Vec<Vec<Vec<ExpSeries>>>;

#[derive(Clone, Debug)]
pub struct StructureConstants {
    /// `F_{αβγ} = ∂α∂β∂γ F`.
    pub lower: Tensor3,
    /// `c_{αβ}^γ = η^{γε} F_{εαβ}`, indexed `[α][β][γ]`.
    pub upper: Tensor3,
}

pub(crate) fn compute_structure_constants(chart: &FMChart) -> StructureConstants {
    let n = chart.dim();
    let f = chart.potential();
    let d1: Vec<ExpSeries> = (0..n).map(|a| f.derivative(a).expect("index in range")).collect();
    let zero = chart.zero_series();
    let mut lower = vec![vec![vec![zero.clone(); n]; n]; n];
    for a in 0..n {
        for b in a..n {
            let dab = d1[a].derivative(b).expect("index in range");
            for c in b..n {
                let v = dab.derivative(c).expect("index in range");
                for (i, j, k) in permutations(a, b, c) {
                    lower[i][j][k] = v.clone();
                }
            }
        }
    }
    let eta_inv = chart.eta_inv();
    let mut upper = vec![vec![vec![zero.clone(); n]; n]; n];
    for a in 0..n {
        for b in a..n {
            for g in 0..n {
                let mut acc = zero.clone();
                for e in 0..n {
                    let w = &eta_inv[(g, e)];
                    if !w.is_zero() && !lower[e][a][b].is_zero() {
                        acc = &acc + &lower[e][a][b].scale(w);
                    }
                }
                upper[a][b][g] = acc.clone();
                upper[b][a][g] = acc;
            }
        }
    }
    StructureConstants { lower, upper }
}

fn permutations(a: usize, b: usize, c: usize) -> [(usize, usize, usize); 6] {
    [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]
}

/// Structure constants `c_{αβ}^γ(t)` of the chart.
pub fn structure_constants(chart: &FMChart) -> Tensor3 {
    chart.structure().upper.clone()
}

#[derive(Clone, Debug)]
pub struct WdvvResidual {
    pub indices: [usize; 4],
    pub value: ExpSeries,
}

#[derive(Clone, Debug)]
pub struct WdvvReport {
    /// Number of index tuples checked.
    pub checked: usize,
    /// Residuals that are not identically zero (0-based indices).
    pub nonzero: Vec<WdvvResidual>,
    /// Marker truncation degree the check is exact through, if any.
    pub truncation: Option<u32>,
}

impl WdvvReport {
    pub fn passes(&self) -> bool {
        self.nonzero.is_empty()
    }
}

/// All residuals `c_{αβ}^ε c_{εγ}^δ − c_{βγ}^ε c_{εα}^δ`; those with `α = γ`
/// vanish identically and the rest are antisymmetric in `α ↔ γ`, so only
/// `α < γ` is evaluated.
pub fn check_wdvv(chart: &FMChart) -> WdvvReport {
    let n = chart.dim();
    let c = &chart.structure().upper;
    let zero = chart.zero_series();
    // prod[a][b][g][d] = Σ_e c_{ab}^e c_{eg}^d
    let mut prod = vec![vec![vec![vec![zero.clone(); n]; n]; n]; n];
    for a in 0..n {
        for b in 0..n {
            for g in 0..n {
                for d in 0..n {
                    let mut acc = zero.clone();
                    for e in 0..n {
                        if c[a][b][e].is_zero() || c[e][g][d].is_zero() {
                            continue;
                        }
                        acc = &acc + &(&c[a][b][e] * &c[e][g][d]);
                    }
                    prod[a][b][g][d] = acc;
                }
            }
        }
    }
    let mut checked = 0;
    let mut nonzero = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for g in a + 1..n {
                for d in 0..n {
                    checked += 1;
                    let r = &prod[a][b][g][d] - &prod[b][g][a][d];
                    if !r.is_zero() {
                        nonzero.push(WdvvResidual { indices: [a, b, g, d], value: r });
                    }
                }
            }
        }
    }
    WdvvReport { checked, nonzero, truncation: chart.potential().marker().map(|_| chart.potential().truncation()) }
}

#[derive(Clone, Debug)]
pub struct AxiomReport {
    /// Pairs `(α, β)` where `∂_e∂α∂β F ≠ η_{αβ}`.
    pub unity_failures: Vec<(usize, usize)>,
    /// `Lie_E F − (3 − d) F` with all terms of degree ≤ 2 removed.
    pub quasihomogeneity_residual: ExpSeries,
    /// Quadratic correction dropped from the residual.
    pub quadratic_correction: ExpSeries,
}

impl AxiomReport {
    pub fn unity_ok(&self) -> bool {
        self.unity_failures.is_empty()
    }

    pub fn quasihomogeneity_ok(&self) -> bool {
        self.quasihomogeneity_residual.is_zero()
    }

    pub fn passes(&self) -> bool {
        self.unity_ok() && self.quasihomogeneity_ok()
    }

    /// Symmetry of `c_{αβγ}` holds by construction from a potential.
    pub const SYMMETRY_NOTE: &'static str = "symmetric by construction: c is the third derivative of a potential";
}

pub fn lie_euler(chart: &FMChart, g: &ExpSeries) -> ExpSeries {
    let mut acc = chart.zero_series();
    for a in 0..chart.dim() {
        let ea = chart.euler().component(a);
        if ea.is_zero() {
            continue;
        }
        acc = &acc + &g.derivative(a).expect("index in range").mul_poly(&ea);
    }
    acc
}

pub fn check_axioms(chart: &FMChart) -> AxiomReport {
    let n = chart.dim();
    let sc = chart.structure();
    let e = chart.unity();
    let mut unity_failures = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let v = &sc.lower[e][a][b];
            let ok = v.is_polynomial_of_degree_at_most(0) && v.polynomial_part().constant_term() == chart.eta()[(a, b)];
            if !ok {
                unity_failures.push((a, b));
            }
        }
    }
    let f = chart.potential();
    let three_minus_d = rational::int(3) - chart.charge();
    let r = &lie_euler(chart, f) - &f.scale(&three_minus_d);
    let residual = r.without_low_degree(2);
    let quad = &r - &residual;
    AxiomReport { unity_failures, quasihomogeneity_residual: residual, quadratic_correction: quad }
}

/// Whether `c_{eβ}^γ = δ_β^γ` holds exactly.
pub fn unity_is_identity(chart: &FMChart) -> bool {
    let n = chart.dim();
    let c = &chart.structure().upper;
    let e = chart.unity();
    (0..n).all(|b| {
        (0..n).all(|g| {
            let v = &c[e][b][g];
            let want = if b == g { Rational::one() } else { Rational::zero() };
            v.is_polynomial_of_degree_at_most(0) && v.polynomial_part().constant_term() == want
        })
    })
}
