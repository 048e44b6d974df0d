use std::sync::Arc;

use nalgebra::DMatrix;
use wmgrit::{
    build_adv1d_central, build_adv1d_upwind, build_heat1d, factor_step, sequential_solve,
    ProblemKind, ProblemSetup, Scheme,
};

fn dense(p: &ProblemSetup) -> DMatrix<f64> {
    let n = p.unknowns();
    DMatrix::from_row_slice(n, n, &p.spatial_op.to_dense())
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn assert_close(a: &[f64], b: &[f64], tol: f64) {
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        assert!((x - y).abs() <= tol * (1.0 + y.abs()), "{x} vs {y}");
    }
}

#[test]
fn heat_spectrum_matches_dense_eigensolve() {
    for nx in [3, 5, 12, 18] {
        let p = build_heat1d(nx, 5).unwrap();
        let want = sorted(dense(&p).symmetric_eigen().eigenvalues.iter().copied().collect());
        let got = sorted(p.spatial_spectrum().iter().map(|z| z.re).collect());
        assert_close(&got, &want, 1e-12);
        assert!(p.spatial_spectrum().iter().all(|z| z.im == 0.0));
    }
}

#[test]
fn central_spectrum_matches_dense_eigensolve() {
    for nx in [5, 9, 17] {
        let p = build_adv1d_central(nx, 5).unwrap();
        let eig = dense(&p).complex_eigenvalues();
        let want = sorted(eig.iter().map(|z| z.im).collect());
        let got = sorted(p.spatial_spectrum().iter().map(|z| z.im).collect());
        assert_close(&got, &want, 1e-10);
        assert!(eig.iter().all(|z| z.re.abs() < 1e-10));
    }
}

#[test]
fn upwind_spectrum_imaginary_part_matches_dense_eigensolve() {
    for nx in [5, 9, 17] {
        let p = build_adv1d_upwind(nx, 5).unwrap();
        let eig = dense(&p).complex_eigenvalues();
        let want = sorted(eig.iter().map(|z| z.im).collect());
        let got = sorted(p.spatial_spectrum().iter().map(|z| z.im).collect());
        assert_close(&got, &want, 1e-10);
        assert!(eig.iter().all(|z| z.re <= 1e-10));
        assert!(p.spatial_spectrum().iter().all(|z| z.re <= 0.0));
    }
}

fn final_error(nx: usize, nt: usize) -> f64 {
    let p = build_heat1d(nx, nt).unwrap();
    let u = sequential_solve(&p, &Scheme::BackwardEuler.tableau()).unwrap();
    let t = p.final_time;
    u.row(nt - 1)
        .iter()
        .zip(&p.grid)
        .map(|(v, &x)| (v - p.exact_solution(x, t).unwrap()).abs())
        .fold(0.0, f64::max)
}

#[test]
fn sequential_heat_converges_to_exact_solution() {
    // dt and h^2 halve together
    let sizes = [(9, 17), (17, 65), (33, 257)];
    let errs: Vec<f64> = sizes.iter().map(|&(nx, nt)| final_error(nx, nt)).collect();
    for w in errs.windows(2) {
        assert!(w[0] / w[1] >= 1.8, "{errs:?}");
    }
}

#[test]
fn one_forced_step_has_small_local_error() {
    let local = |nx: usize, nt: usize| {
        let p = build_heat1d(nx, nt).unwrap();
        let step = factor_step(Arc::clone(&p.spatial_op), p.dt, &Scheme::BackwardEuler.tableau()).unwrap();
        let exact = |t: f64| -> Vec<f64> { p.grid.iter().map(|&x| p.exact_solution(x, t).unwrap()).collect() };
        let j = (nt - 1) / 2;
        let next = step.step(&exact(p.time(j - 1)), &p.forcing(&step, j)).unwrap();
        let err = next.iter().zip(exact(p.time(j))).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err <= 10.0 * p.dt * p.dt, "local error {err} at dt {}", p.dt);
        err
    };
    let coarse = local(9, 17);
    let fine = local(17, 65);
    assert!(coarse / fine >= 1.8, "{coarse} vs {fine}");
}

#[test]
fn kinds_round_trip_through_ids() {
    for k in ProblemKind::ALL {
        assert_eq!(k.id().parse::<ProblemKind>().unwrap(), k);
        let p = k.build(9, 9).unwrap();
        assert_eq!(p.kind, k);
        assert_eq!(p.initial_condition.len(), p.unknowns());
    }
}
