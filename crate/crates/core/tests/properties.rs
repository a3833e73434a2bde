use num_complex::Complex64;
use proptest::prelude::*;

use frobforge::algebra::rational::{int, rat, Rational};
use frobforge::algebra::{MultiPoly, QMatrix};
use frobforge::frame::sorted_eigenvalues;
use frobforge::isomonodromy::{hamiltonians, IsomonodromyState};
use frobforge::json;
use frobforge::monodromy::{braid_act, equal_mod_signs, monodromy_char_poly, BraidGenerator};
use frobforge::numeric::multiset_distance;
use frobforge::singularity::{build_an, DEFAULT_ROOT_PRECISION};

fn small_rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(p, q)| rat(p, q))
}

fn poly2() -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec((small_rational(), 0u32..4, 0u32..4), 0..6)
        .prop_map(|ts| MultiPoly::from_terms(2, ts.into_iter().map(|(c, a, b)| (c, vec![a, b]))).unwrap())
}

fn stokes(n: usize) -> impl Strategy<Value = QMatrix> {
    prop::collection::vec(-5i64..=5, n * (n - 1) / 2).prop_map(move |xs| {
        let mut it = xs.into_iter();
        let mut m = vec![vec![0i64; n]; n];
        for i in 0..n {
            m[i][i] = 1;
            for j in i + 1..n {
                m[i][j] = it.next().unwrap();
            }
        }
        QMatrix::from_i64(&m).unwrap()
    })
}

fn sized_stokes() -> impl Strategy<Value = QMatrix> {
    (2usize..=5).prop_flat_map(stokes)
}

fn cnum() -> impl Strategy<Value = Complex64> {
    (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| Complex64::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polynomial_ring_laws(a in poly2(), b in poly2(), c in poly2()) {
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn derivative_undoes_integration(a in poly2(), v in 0usize..2) {
        prop_assert_eq!(a.integrate(v).unwrap().derivative(v).unwrap(), a);
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in poly2(), b in poly2(), x in small_rational(), y in small_rational()) {
        let pt = [x, y];
        prop_assert_eq!((&a * &b).eval(&pt), a.eval(&pt) * b.eval(&pt));
    }

    #[test]
    fn braid_generator_then_inverse_is_identity(s in sized_stokes(), pick in 0usize..4) {
        let n = s.rows();
        let i = 1 + (pick % (n - 1)) as i64;
        let (s1, _) = braid_act(&s, None, BraidGenerator(i)).unwrap();
        let (s2, _) = braid_act(&s1, None, BraidGenerator(-i)).unwrap();
        prop_assert!(equal_mod_signs(&s2, &s));
    }

    #[test]
    fn braid_moves_preserve_invariants(s in sized_stokes(), pick in 0usize..4, inverse in any::<bool>()) {
        let n = s.rows();
        let i = 1 + (pick % (n - 1)) as i64;
        let g = BraidGenerator(if inverse { -i } else { i });
        let (s1, _) = braid_act(&s, None, g).unwrap();
        prop_assert!(s1.is_unit_upper_triangular());
        prop_assert_eq!(s1.det().unwrap(), int(1));
        prop_assert_eq!(monodromy_char_poly(&s1).unwrap(), monodromy_char_poly(&s).unwrap());
    }

    #[test]
    fn rational_matrices_round_trip(s in sized_stokes(), k in small_rational()) {
        let m = s.scale(&k);
        let text = json::to_pretty(&json::qmatrix_to_json(&m));
        prop_assert_eq!(json::qmatrix_from_json(&json::parse(&text).unwrap()).unwrap(), m);
    }

    #[test]
    fn complex_values_round_trip(re in any::<f64>(), im in any::<f64>()) {
        prop_assume!(re.is_finite() && im.is_finite());
        let z = Complex64::new(re, im);
        let text = json::to_pretty(&json::complex_to_json(z));
        prop_assert_eq!(json::complex_from_json(&json::parse(&text).unwrap()).unwrap(), z);
    }

    #[test]
    fn hamiltonians_sum_to_zero(u in prop::collection::vec(cnum(), 3), upper in prop::collection::vec(cnum(), 3)) {
        prop_assume!((0..3).all(|i| (0..i).all(|j| (u[i] - u[j]).norm() > 0.1)));
        let state = IsomonodromyState::new(u.clone(), upper).unwrap();
        let h = hamiltonians(&state).unwrap();
        let total: Complex64 = h.iter().sum();
        let weighted: Complex64 = h.iter().zip(&u).map(|(h, u)| h * u).sum();
        let v = state.v();
        let quarter_trace = -(&v * &v).trace() / 4.0;
        prop_assert!(total.norm() < 1e-9 * (1.0 + h.iter().map(|x| x.norm()).sum::<f64>()));
        prop_assert!((weighted - quarter_trace).norm() < 1e-9 * (1.0 + quarter_trace.norm()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn a2_euler_spectrum_is_critical_values(t1 in small_rational(), t2 in small_rational()) {
        let a2 = build_an(2).unwrap();
        let t = vec![t1, t2];
        let s = a2.flat.s_at(&t);
        let disc = -int(4) * &s[0] * &s[0] * &s[0] - int(27) * &s[1] * &s[1];
        prop_assume!(disc != int(0));
        let crit = a2.unfolding.critical_values_rational(&s, DEFAULT_ROOT_PRECISION).unwrap();
        let tc: Vec<Complex64> = t.iter().map(|x| Complex64::new(frobforge::algebra::rational::to_f64(x), 0.0)).collect();
        let eig = sorted_eigenvalues(&a2.chart.euler_multiplication_at(&tc)).unwrap();
        let scale = crit.iter().map(|z| z.norm()).fold(1.0, f64::max);
        prop_assert!(multiset_distance(&eig, &crit) < 1e-9 * scale);
    }
}
