mod common;

use num_complex::Complex64;
use rand::Rng;
use wmgrit::oracle::{assemble_fcf_from_factors, assemble_fcf_propagator, dense_two_level_error_op, spectral_norm, DenseMatrix};
use wmgrit::{build_adv1d_central, build_heat1d, Error, RelaxationSpec, Scheme};

use common::*;

#[test]
fn power_iteration_matches_svd_on_random_matrices() {
    let mut r = rng(5);
    for _ in 0..5 {
        let vals: Vec<Complex64> = (0..2500)
            .map(|_| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
            .collect();
        let a = DenseMatrix::from_fn(50, 50, |i, j| vals[i * 50 + j]);
        let got = spectral_norm(&a).unwrap();
        let want = svd_norm(&a);
        assert!((got - want).abs() <= 1e-8 * want, "{got} vs {want}");
    }
}

#[test]
fn toeplitz_assembly_matches_factor_product() {
    let mut r = rng(8);
    for _ in 0..10 {
        let (l, mu) = (disk_point(&mut r, 0.99), disk_point(&mut r, 0.99));
        let w = r.random_range(0.3..2.3);
        let a = assemble_fcf_propagator(l, mu, 3, w, 24);
        let b = assemble_fcf_from_factors(l, mu, 3, w, 24);
        let diff = (0..24)
            .flat_map(|i| (0..24).map(move |j| (i, j)))
            .map(|(i, j)| (a[(i, j)] - b[(i, j)]).norm())
            .fold(0.0, f64::max);
        assert!(diff <= 1e-13);
    }
}

#[test]
fn dense_error_operator_norm_agrees_across_methods() {
    let be = Scheme::BackwardEuler.tableau();
    let p = build_adv1d_central(6, 17).unwrap();
    let op = dense_two_level_error_op(&p, &be, 2, &RelaxationSpec::fcf(1.5).unwrap()).unwrap();
    assert_eq!(op.rows(), p.unknowns() * p.nt);
    let want = svd_norm(&op);
    let got = spectral_norm(&op).unwrap();
    assert!((got - want).abs() <= 1e-8 * want);
}

#[test]
fn dense_error_operator_rejects_bad_sizes() {
    let be = Scheme::BackwardEuler.tableau();
    let big = build_heat1d(200, 33).unwrap();
    let spec = RelaxationSpec::fcf(1.0).unwrap();
    assert!(matches!(dense_two_level_error_op(&big, &be, 2, &spec), Err(Error::TooLarge { .. })));
    let odd = build_heat1d(5, 10).unwrap();
    assert!(dense_two_level_error_op(&odd, &be, 2, &spec).is_err());
}
