//! Brute-force reference operators: dense scalar Toeplitz error propagators,
//! spectral norms, and explicitly assembled two-level space-time operators.

use std::ops::{Index, IndexMut};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mgrit::{RelaxPattern, RelaxationSpec};
use crate::problems::ProblemSetup;
use crate::timestepping::{factor_step, ButcherTableau, StepOperator};

/// Largest `unknowns * N_t` accepted by [`dense_two_level_error_op`].
pub const DENSE_LIMIT: usize = 2000;

/// Row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `M^* M`.
    pub fn gram(&self) -> DenseMatrix {
        let mut g = DenseMatrix::zeros(self.cols, self.cols);
        for k in 0..self.rows {
            let row = &self.data[k * self.cols..(k + 1) * self.cols];
            for i in 0..self.cols {
                let a = row[i].conj();
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let dst = &mut g.data[i * self.cols..(i + 1) * self.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        g
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Lower-triangular Toeplitz matrix from its subdiagonal coefficients
/// (`coef[k]` sits on the `k`-th subdiagonal).
fn toeplitz_lower(n: usize, coef: impl Fn(usize) -> Complex64) -> DenseMatrix {
    DenseMatrix::from_fn(n, n, |i, j| if i >= j { coef(i - j) } else { Complex64::new(0.0, 0.0) })
}

/// The scalar weighted-FCF error propagator on `n_t` coarse points.
pub fn assemble_fcf_propagator(
    lambda: Complex64,
    mu: Complex64,
    m: usize,
    wc: f64,
    n_t: usize,
) -> DenseMatrix {
    let l = lambda.powu(m as u32);
    let gap = l - mu;
    toeplitz_lower(n_t, |k| match k {
        0 => Complex64::new(0.0, 0.0),
        1 => (1.0 - wc) * gap,
        _ => (1.0 - wc) * mu.powu(k as u32 - 1) * gap + wc * mu.powu(k as u32 - 2) * gap * l,
    })
}

/// `I - B^{-1} A`, `I - w A` with `A = I - L S`, `B = I - mu S`.
fn scalar_factors(l: Complex64, mu: Complex64, n_t: usize) -> (DenseMatrix, impl Fn(f64) -> DenseMatrix) {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let a = toeplitz_lower(n_t, move |k| match k {
        0 => one,
        1 => -l,
        _ => zero,
    });
    // B^{-1} = sum_k mu^k S^k
    let b_inv = toeplitz_lower(n_t, move |k| mu.powu(k as u32));
    let ba = b_inv.mul(&a);
    let coarse = DenseMatrix::from_fn(n_t, n_t, |i, j| {
        if i == j {
            one - ba[(i, j)]
        } else {
            -ba[(i, j)]
        }
    });
    let relax = move |w: f64| {
        DenseMatrix::from_fn(n_t, n_t, |i, j| if i == j { one - w * a[(i, j)] } else { -w * a[(i, j)] })
    };
    (coarse, relax)
}

/// `(I - B^{-1} A)(I - wcc A)(I - wc A)` assembled from its factors.
pub fn assemble_fcfcf_propagator(
    lambda: Complex64,
    mu: Complex64,
    m: usize,
    wc: f64,
    wcc: f64,
    n_t: usize,
) -> DenseMatrix {
    let (coarse, relax) = scalar_factors(lambda.powu(m as u32), mu, n_t);
    coarse.mul(&relax(wcc)).mul(&relax(wc))
}

/// `(I - B^{-1} A)(I - wc A)` assembled from its factors.
pub fn assemble_fcf_from_factors(
    lambda: Complex64,
    mu: Complex64,
    m: usize,
    wc: f64,
    n_t: usize,
) -> DenseMatrix {
    let (coarse, relax) = scalar_factors(lambda.powu(m as u32), mu, n_t);
    coarse.mul(&relax(wc))
}

const POWER_TOL: f64 = 1e-10;
const POWER_MAX_ITERS: usize = 100_000;

/// Largest singular value by power iteration on `M^* M`.
pub fn spectral_norm(m: &DenseMatrix) -> Result<f64> {
    let g = m.gram();
    let n = g.rows();
    if n == 0 {
        return Ok(0.0);
    }
    if g.max_abs() == 0.0 {
        return Ok(0.0);
    }
    // deterministic start with components in every direction
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + 0.5 * ((i as f64) * 0.7).sin(), 0.25 * ((i as f64) * 1.3).cos()))
        .collect();
    let mut estimate = 0.0;
    for it in 0..POWER_MAX_ITERS {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v {
            *z /= norm;
        }
        let w = g.mul_vec(&v);
        let rq: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
        if it > 0 && (rq - estimate).abs() <= POWER_TOL * rq.abs() {
            return Ok(rq.max(0.0).sqrt());
        }
        estimate = rq;
        v = w;
    }
    Err(Error::NoConvergence {
        iterations: POWER_MAX_ITERS,
        estimate: estimate.max(0.0).sqrt(),
    })
}

/// Dense matrix of a step operator, built by stepping unit vectors.
fn dense_step(step: &StepOperator) -> Vec<Vec<f64>> {
    let n = step.dim();
    let mut cols = vec![vec![0.0; n]; n];
    let mut e = vec![0.0; n];
    for (j, col) in cols.iter_mut().enumerate() {
        e.fill(0.0);
        e[j] = 1.0;
        step.apply_into(&e, col);
    }
    // transpose into rows
    (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect()
}

fn matvec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter().map(|r| r.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = b[0].len();
    a.iter()
        .map(|r| (0..n).map(|j| r.iter().zip(b).map(|(p, row)| p * row[j]).sum()).collect())
        .collect()
}

/// Two-level error propagator `P (I - B^{-1} A_c) prod_k (I - w_k A_c) R`
/// as a dense space-time matrix acting on fine errors (time-major ordering).
/// `A_c` uses `Phi^m`, `B` the rediscretized coarse step, `P` ideal
/// interpolation and `R` injection.
pub fn dense_two_level_error_op(
    p: &ProblemSetup,
    tableau: &ButcherTableau,
    m: usize,
    spec: &RelaxationSpec,
) -> Result<DenseMatrix> {
    let n = p.unknowns();
    let size = n * p.nt;
    if size > DENSE_LIMIT {
        return Err(Error::TooLarge {
            size,
            limit: DENSE_LIMIT,
        });
    }
    if m < 2 || (p.nt - 1) % m != 0 {
        return Err(Error::InvalidArgument(format!(
            "N_t - 1 = {} must be divisible by m = {m}",
            p.nt - 1
        )));
    }
    let phi = dense_step(&factor_step(p.spatial_op.clone(), p.dt, tableau)?);
    let phi_c = dense_step(&factor_step(Arc::clone(&p.spatial_op), p.dt * m as f64, tableau)?);
    let mut powers = vec![identity(n)];
    for i in 1..=m {
        powers.push(matmul(&phi, &powers[i - 1]));
    }
    let phi_m = &powers[m];
    let nc = (p.nt - 1) / m + 1;
    let weights: Vec<f64> = match spec.pattern {
        RelaxPattern::F => vec![],
        RelaxPattern::Fcf => vec![spec.wc_at(0)],
        RelaxPattern::Fcfcf => vec![spec.wc_at(0), spec.wcc_at(0)],
    };
    // coarse A applied blockwise: (A x)_k = x_k - Phi^m x_{k-1}
    let apply_a = |x: &[Vec<f64>], phi: &[Vec<f64>]| -> Vec<Vec<f64>> {
        (0..nc)
            .map(|k| {
                if k == 0 {
                    x[0].clone()
                } else {
                    let t = matvec(phi, &x[k - 1]);
                    x[k].iter().zip(&t).map(|(a, b)| a - b).collect()
                }
            })
            .collect()
    };
    let b_inv = |y: &[Vec<f64>]| -> Vec<Vec<f64>> {
        let mut z: Vec<Vec<f64>> = Vec::with_capacity(nc);
        for k in 0..nc {
            let mut row = y[k].clone();
            if k > 0 {
                let t = matvec(&phi_c, &z[k - 1]);
                for (r, v) in row.iter_mut().zip(&t) {
                    *r += v;
                }
            }
            z.push(row);
        }
        z
    };
    let mut out = DenseMatrix::zeros(size, size);
    for k0 in 0..nc {
        for i0 in 0..n {
            let mut x = vec![vec![0.0; n]; nc];
            x[k0][i0] = 1.0;
            for &w in &weights {
                let ax = apply_a(&x, phi_m);
                for (xr, ar) in x.iter_mut().zip(&ax) {
                    for (a, b) in xr.iter_mut().zip(ar) {
                        *a -= w * b;
                    }
                }
            }
            let corr = b_inv(&apply_a(&x, phi_m));
            for (xr, cr) in x.iter_mut().zip(&corr) {
                for (a, b) in xr.iter_mut().zip(cr) {
                    *a -= b;
                }
            }
            let col = k0 * m * n + i0;
            for k in 0..nc {
                for (s, pw) in powers.iter().enumerate().take(m) {
                    let j = k * m + s;
                    if j >= p.nt {
                        break;
                    }
                    let v = matvec(pw, &x[k]);
                    for (r, val) in v.iter().enumerate() {
                        out[(j * n + r, col)] = Complex64::new(*val, 0.0);
                    }
                }
            }
        }
    }
    Ok(out)
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn hand_evaluated_entry() {
        let e = assemble_fcf_propagator(c(0.5), c(0.3), 2, 1.3, 3);
        assert!((e[(2, 0)].re + 0.01175).abs() < 1e-15);
        assert!((e[(1, 0)].re - (-0.3) * (-0.05)).abs() < 1e-15);
        assert_eq!(e[(0, 0)], c(0.0));
    }

    #[test]
    fn toeplitz_formula_matches_factor_product() {
        let (l, mu) = (Complex64::new(0.4, 0.5), Complex64::new(-0.2, 0.6));
        let a = assemble_fcf_propagator(l, mu, 2, 1.7, 12);
        let b = assemble_fcf_from_factors(l, mu, 2, 1.7, 12);
        for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn exact_coarse_gives_zero_matrix() {
        let l = Complex64::new(0.3, 0.2);
        let a = assemble_fcf_propagator(l, l * l, 2, 0.7, 6);
        assert_eq!(a.max_abs(), 0.0);
    }

    #[test]
    fn spectral_norm_basics() {
        assert!((spectral_norm(&DenseMatrix::identity(5)).unwrap() - 1.0).abs() < 1e-12);
        let u = [1.0, 2.0, -1.0];
        let v = [0.5, 0.0, 3.0, 1.0];
        let m = DenseMatrix::from_fn(3, 4, |i, j| c(u[i] * v[j]));
        let expect = (6f64).sqrt() * (10.25f64).sqrt();
        assert!((spectral_norm(&m).unwrap() - expect).abs() < 1e-10);
    }
}
