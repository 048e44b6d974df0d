//! Reference code shared by the integration tests. Nothing here calls the
//! solver's relaxation or cycling routines.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wmgrit::oracle::DenseMatrix;
use wmgrit::{SpaceTimeState, StepOperator};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point in the disk of the given radius.
pub fn disk_point(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    let r = radius * rng.random::<f64>().sqrt();
    Complex64::from_polar(r, rng.random::<f64>() * std::f64::consts::TAU)
}

fn step_row(phi: &StepOperator, prev: &[f64], g: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; prev.len()];
    phi.apply_into(prev, &mut out);
    for (o, gi) in out.iter_mut().zip(g) {
        *o += gi;
    }
    out
}

/// Classic unweighted two-level FCF cycle on plain row vectors.
pub fn classic_two_level_cycle(
    fine: &StepOperator,
    coarse: &StepOperator,
    m: usize,
    u: &mut [Vec<f64>],
    g: &[Vec<f64>],
) {
    let nt = u.len();
    let f_sweep = |u: &mut [Vec<f64>]| {
        for j in 1..nt {
            if j % m != 0 {
                u[j] = step_row(fine, &u[j - 1], &g[j]);
            }
        }
    };
    f_sweep(u);
    for j in (m..nt).step_by(m) {
        u[j] = step_row(fine, &u[j - 1], &g[j]);
    }
    f_sweep(u);
    let nc = (nt - 1) / m + 1;
    // coarse equation: v_k - Phi_c v_{k-1} = r_{km} + u_{km} - Phi_c u_{(k-1)m}
    let mut v: Vec<Vec<f64>> = Vec::with_capacity(nc);
    v.push(u[0].clone());
    for k in 1..nc {
        let j = k * m;
        let fine_pred = step_row(fine, &u[j - 1], &g[j]);
        let mut rhs: Vec<f64> = fine_pred.iter().zip(&u[j]).map(|(a, b)| a - b).collect();
        let mut pc = vec![0.0; rhs.len()];
        coarse.apply_into(&u[j - m], &mut pc);
        for ((r, ui), p) in rhs.iter_mut().zip(&u[j]).zip(&pc) {
            *r += ui - p;
        }
        let next = step_row(coarse, &v[k - 1], &rhs);
        v.push(next);
    }
    for (k, vk) in v.into_iter().enumerate() {
        u[k * m] = vk;
    }
    f_sweep(u);
}

pub fn to_rows(s: &SpaceTimeState) -> Vec<Vec<f64>> {
    (0..s.nt()).map(|j| s.row(j).to_vec()).collect()
}

pub fn rows_max_diff(a: &[Vec<f64>], b: &SpaceTimeState) -> f64 {
    a.iter()
        .enumerate()
        .flat_map(|(j, r)| r.iter().zip(b.row(j)).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max)
}

/// Largest singular value from a full SVD.
pub fn svd_norm(m: &DenseMatrix) -> f64 {
    let a = nalgebra::DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice());
    a.singular_values().max()
}
