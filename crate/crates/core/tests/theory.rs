mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use wmgrit::oracle::{assemble_fcf_propagator, assemble_fcfcf_propagator, dense_two_level_error_op, spectral_norm};
use wmgrit::theory::{
    dense_scan, fcf_bound_approx, fcfcf_bound_approx, heatmap_scan, max_bound_over_modes, mode_pairs,
    GridRange,
};
use wmgrit::{
    build_heat1d, fcf_bound_exact, fcfcf_bound_numeric, problem_bound, stability_eigenvalue, BoundQuery,
    Error, RelaxationSpec, Scheme,
};

use common::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn closed_form_matches_scan_at_reference_point() {
    let q = BoundQuery::fcf(c(0.5, 0.0), c(0.25, 0.1), 2, 1.3);
    let r = fcf_bound_exact(&q).unwrap();
    assert!((r.value - dense_scan(&q, 4096)).abs() <= 1e-8);
    assert!((q.integrand(r.argmax_x) - r.value).abs() <= 1e-10);
}

#[test]
fn fcfcf_bound_dominates_dense_norm() {
    let (l, mu) = (c(0.6, 0.0), c(0.3, 0.0));
    let bound = fcfcf_bound_numeric(&BoundQuery::fcfcf(l, mu, 2, 1.7, 0.9)).unwrap().value;
    let m = assemble_fcfcf_propagator(l, mu, 2, 1.7, 0.9, 128);
    assert!(bound + 1e-8 >= spectral_norm(&m).unwrap());
    assert!(bound + 1e-8 >= svd_norm(&m));
}

#[test]
fn dense_norm_grows_with_time_grid_toward_bound() {
    let mut r = rng(11);
    for _ in 0..10 {
        let (l, mu) = (disk_point(&mut r, 0.95), disk_point(&mut r, 0.95));
        let bound = fcf_bound_exact(&BoundQuery::fcf(l, mu, 2, 1.4)).unwrap().value;
        let norms: Vec<f64> = [16, 64, 128]
            .iter()
            .map(|&n| svd_norm(&assemble_fcf_propagator(l, mu, 2, 1.4, n)))
            .collect();
        assert!(norms.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{norms:?}");
        assert!(norms[2] <= bound + 1e-8);
    }
}

#[test]
fn exact_coarse_eigenvalue_gives_zero_bound() {
    let mut r = rng(3);
    for m in [2, 4, 8] {
        let l = disk_point(&mut r, 0.9);
        for w in [0.5, 1.0, 1.9] {
            let q = BoundQuery::fcf(l, l.powu(m as u32), m, w);
            assert!(fcf_bound_exact(&q).unwrap().value <= 1e-14);
        }
    }
}

#[test]
fn backward_euler_bound_below_one_on_negative_axis() {
    let be = Scheme::BackwardEuler.tableau();
    for k in 0..=400 {
        let z = c(-(10f64.powf(-6.0 + 12.0 * k as f64 / 400.0)), 0.0);
        let lambda = stability_eigenvalue(&be, z).unwrap();
        let mu = stability_eigenvalue(&be, 2.0 * z).unwrap();
        let v = fcf_bound_exact(&BoundQuery::fcf(lambda, mu, 2, 1.0)).unwrap().value;
        assert!(v < 1.0, "z = {z}: {v}");
    }
}

#[test]
fn sdirk22_heatmap_is_finite_everywhere() {
    let re = GridRange::new(-10.0, 0.0, 41).unwrap();
    let im = GridRange::new(0.0, 10.0, 41).unwrap();
    let g = heatmap_scan(&Scheme::Sdirk22.tableau(), 2, 1.0, re, im);
    let cells: Vec<f64> = g.values.iter().flatten().copied().collect();
    // the origin has |lambda| = 1 and sits outside the hypothesis
    assert_eq!(cells.iter().filter(|v| v.is_nan()).count(), 1);
    assert!(g.values[0][40].is_nan());
    assert!(cells.iter().filter(|v| !v.is_nan()).all(|v| v.is_finite() && *v >= 0.0));
}

#[test]
fn heatmap_is_symmetric_under_conjugation() {
    let re = GridRange::new(-8.0, -0.5, 16).unwrap();
    let im = GridRange::new(-6.0, 6.0, 25).unwrap();
    for scheme in [Scheme::Sdirk23, Scheme::Sdirk33] {
        let g = heatmap_scan(&scheme.tableau(), 2, 1.2, re, im);
        let n = g.values.len();
        for i in 0..n {
            for (a, b) in g.values[i].iter().zip(&g.values[n - 1 - i]) {
                assert!((a - b).abs() <= 1e-12 || (a.is_nan() && b.is_nan()));
            }
        }
    }
}

#[test]
fn problem_bound_dominates_dense_two_level_operator() {
    let be = Scheme::BackwardEuler.tableau();
    let p = build_heat1d(7, 33).unwrap();
    for w in [0.8, 1.0, 1.3, 1.6] {
        let spec = RelaxationSpec::fcf(w).unwrap();
        let bound = problem_bound(&p, &be, p.dt, 2, &spec).unwrap();
        let op = dense_two_level_error_op(&p, &be, 2, &spec).unwrap();
        // C-point rows and columns of the fine operator
        let n = p.unknowns();
        let c_index: Vec<usize> = (0..p.nt).step_by(2).flat_map(|j| (0..n).map(move |i| j * n + i)).collect();
        let cc = wmgrit::oracle::DenseMatrix::from_fn(c_index.len(), c_index.len(), |a, b| op[(c_index[a], c_index[b])]);
        let sigma = svd_norm(&cc);
        assert!(sigma <= bound + 1e-10, "w={w}: {sigma} > {bound}");
    }
}

#[test]
fn mode_hypothesis_failure_names_the_mode() {
    let pairs = vec![(c(0.5, 0.0), c(0.2, 0.0)), (c(0.5, 0.0), c(1.0, 0.0))];
    let err = max_bound_over_modes(&pairs, 2, &RelaxationSpec::fcf(1.0).unwrap()).unwrap_err();
    assert!(matches!(err, Error::ModeHypothesis { gamma: 2, .. }), "{err:?}");
}

#[test]
fn heat_modes_lie_in_unit_disk() {
    let p = build_heat1d(33, 65).unwrap();
    let pairs = mode_pairs(&Scheme::Sdirk33.tableau(), p.dt, 2, &p.spatial_spectrum()).unwrap();
    assert_eq!(pairs.len(), p.unknowns());
    assert!(pairs.iter().all(|(l, mu)| l.norm() < 1.0 && mu.norm() < 1.0));
}

proptest! {
    #[test]
    fn closed_form_is_the_maximum(
        lr in 0.0f64..0.9, lt in 0.0f64..6.28, mr in 0.0f64..0.9, mt in 0.0f64..6.28,
        m in prop::sample::select(vec![2usize, 3, 4, 8]), w in 0.1f64..2.3,
    ) {
        let q = BoundQuery::fcf(Complex64::from_polar(lr, lt), Complex64::from_polar(mr, mt), m, w);
        let r = fcf_bound_exact(&q).unwrap();
        prop_assert!(r.value + 1e-12 >= dense_scan(&q, 1 << 14));
        prop_assert!((q.integrand(r.argmax_x) - r.value).abs() <= 1e-10 * r.value.max(1.0));
    }

    #[test]
    fn approximations_are_exact_on_positive_axis_for_under_relaxation(
        l in 0.01f64..0.99, mu in 0.01f64..0.99, m in 2usize..5, wc in 0.05f64..1.0, wcc in 0.05f64..1.0,
    ) {
        let q = BoundQuery::fcf(c(l, 0.0), c(mu, 0.0), m, wc);
        prop_assert!((fcf_bound_approx(&q).unwrap() - fcf_bound_exact(&q).unwrap().value).abs() <= 1e-8);
        let q2 = BoundQuery::fcfcf(c(l, 0.0), c(mu, 0.0), m, wc, wcc);
        prop_assert!((fcfcf_bound_approx(&q2).unwrap() - fcfcf_bound_numeric(&q2).unwrap().value).abs() <= 1e-6);
    }
}
