use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use wmgrit::{build_adv1d_upwind, build_heat1d, factor_step, stability_eigenvalue, Scheme};

/// Runge-Kutta step on a dense operator, stage by stage.
fn dense_rk_step(g: &DMatrix<f64>, dt: f64, scheme: Scheme, u: &DVector<f64>) -> DVector<f64> {
    let t = scheme.tableau();
    let n = u.len();
    let mut ks: Vec<DVector<f64>> = Vec::new();
    for i in 0..t.stages() {
        let mut arg = u.clone();
        for (j, k) in ks.iter().enumerate() {
            arg += dt * t.a[i][j] * k;
        }
        let lhs = DMatrix::identity(n, n) - dt * t.a[i][i] * g;
        ks.push(lhs.lu().solve(&(g * arg)).unwrap());
    }
    let mut out = u.clone();
    for (k, b) in ks.iter().zip(&t.b) {
        out += dt * b * k;
    }
    out
}

#[test]
fn steps_match_dense_runge_kutta() {
    for p in [build_heat1d(12, 9).unwrap(), build_adv1d_upwind(11, 5).unwrap()] {
        let n = p.unknowns();
        let g = DMatrix::from_row_slice(n, n, &p.spatial_op.to_dense());
        let u: Vec<f64> = (0..n).map(|i| ((i * 7 + 3) % 5) as f64 - 1.5).collect();
        for scheme in Scheme::ALL {
            let step = factor_step(Arc::clone(&p.spatial_op), p.dt, &scheme.tableau()).unwrap();
            let ours = step.step(&u, &vec![0.0; n]).unwrap();
            let want = dense_rk_step(&g, p.dt, scheme, &DVector::from_vec(u.clone()));
            for (a, b) in ours.iter().zip(want.iter()) {
                assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "{scheme:?}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn repeated_steps_reuse_factorization() {
    let p = build_heat1d(20, 9).unwrap();
    let step = factor_step(Arc::clone(&p.spatial_op), p.dt, &Scheme::Sdirk33.tableau()).unwrap();
    assert_eq!(step.factorization_count(), 1);
    let u = p.initial_condition.clone();
    let zero = vec![0.0; u.len()];
    let a = step.step(&u, &zero).unwrap();
    let b = step.step(&u, &zero).unwrap();
    assert_eq!(a, b);
}

fn complex_in(radius: f64) -> impl Strategy<Value = Complex64> {
    (-radius..radius, -radius..radius).prop_map(|(re, im)| Complex64::new(re, im))
}

proptest! {
    #[test]
    fn backward_euler_is_resolvent(z in complex_in(50.0)) {
        prop_assume!((Complex64::new(1.0, 0.0) - z).norm() > 1e-3);
        let got = stability_eigenvalue(&Scheme::BackwardEuler.tableau(), z).unwrap();
        let want = Complex64::new(1.0, 0.0) / (Complex64::new(1.0, 0.0) - z);
        prop_assert!((got - want).norm() <= 1e-12 * want.norm().max(1.0));
    }

    #[test]
    fn stability_function_commutes_with_conjugation(z in complex_in(20.0), s in 0usize..4) {
        let t = Scheme::ALL[s].tableau();
        if let (Ok(a), Ok(b)) = (stability_eigenvalue(&t, z), stability_eigenvalue(&t, z.conj())) {
            prop_assert!((a.conj() - b).norm() <= 1e-12 * a.norm().max(1.0));
        }
    }

    #[test]
    fn step_is_affine(
        u in prop::collection::vec(-1.0f64..1.0, 6),
        v in prop::collection::vec(-1.0f64..1.0, 6),
        a in -2.0f64..2.0,
        s in 0usize..4,
    ) {
        let p = build_heat1d(8, 5).unwrap();
        let step = factor_step(Arc::clone(&p.spatial_op), p.dt, &Scheme::ALL[s].tableau()).unwrap();
        let zero = vec![0.0; 6];
        let combo: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + y).collect();
        let lhs = step.step(&combo, &zero).unwrap();
        let pu = step.step(&u, &zero).unwrap();
        let pv = step.step(&v, &zero).unwrap();
        for i in 0..6 {
            prop_assert!((lhs[i] - (a * pu[i] + pv[i])).abs() <= 1e-12);
        }
        let g = vec![0.25; 6];
        let shifted = step.step(&u, &g).unwrap();
        for i in 0..6 {
            prop_assert!((shifted[i] - pu[i] - 0.25).abs() <= 1e-14);
        }
    }
}
