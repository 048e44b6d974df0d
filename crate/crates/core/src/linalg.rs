//! Banded direct solvers used by the implicit stage systems.
//!
//! Tridiagonal systems use the Thomas algorithm, periodic (cyclic) tridiagonal
//! systems a Sherman-Morrison rank-one correction of it, and anything wider
//! falls back to a dense LU factorization with partial pivoting.

use crate::error::Error;

const PIVOT_EPS: f64 = 1e-300;

/// Pre-factored Thomas solver for `sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = d[i]`.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    sub: Vec<f64>,
    w: Vec<f64>,
    inv_pivot: Vec<f64>,
}

impl Tridiagonal {
    /// `sub[0]` and `sup[n-1]` are ignored.
    pub fn factor(sub: &[f64], diag: &[f64], sup: &[f64]) -> Option<Self> {
        let n = diag.len();
        assert!(n >= 1 && sub.len() == n && sup.len() == n);
        let mut w = vec![0.0; n];
        let mut inv_pivot = vec![0.0; n];
        let mut prev_w = 0.0;
        for i in 0..n {
            let a = if i == 0 { 0.0 } else { sub[i] };
            let pivot = diag[i] - a * prev_w;
            if !pivot.is_finite() || pivot.abs() < PIVOT_EPS {
                return None;
            }
            inv_pivot[i] = 1.0 / pivot;
            w[i] = if i + 1 < n { sup[i] * inv_pivot[i] } else { 0.0 };
            prev_w = w[i];
        }
        Some(Self {
            sub: sub.to_vec(),
            w,
            inv_pivot,
        })
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn solve_in_place(&self, d: &mut [f64]) {
        let n = self.len();
        debug_assert_eq!(d.len(), n);
        d[0] *= self.inv_pivot[0];
        for i in 1..n {
            d[i] = (d[i] - self.sub[i] * d[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            d[i] -= self.w[i] * d[i + 1];
        }
    }
}

/// Periodic tridiagonal solver. `corner_low` couples row `n-1` to `x[0]`,
/// `corner_high` couples row `0` to `x[n-1]`.
#[derive(Debug, Clone)]
pub struct CyclicTridiagonal {
    inner: Tridiagonal,
    z: Vec<f64>,
    v_last: f64,
    denom: f64,
}

impl CyclicTridiagonal {
    pub fn factor(
        sub: &[f64],
        diag: &[f64],
        sup: &[f64],
        corner_low: f64,
        corner_high: f64,
    ) -> Option<Self> {
        let n = diag.len();
        assert!(n >= 3, "cyclic solver needs at least three unknowns");
        // A = B + u v^T with u = [s, 0, .., corner_low], v = [1, 0, .., corner_high / s]
        let s = if diag[0] != 0.0 { -diag[0] } else { -1.0 };
        let mut modified = diag.to_vec();
        modified[0] -= s;
        modified[n - 1] -= corner_low * corner_high / s;
        let inner = Tridiagonal::factor(sub, &modified, sup)?;
        let mut z = vec![0.0; n];
        z[0] = s;
        z[n - 1] = corner_low;
        inner.solve_in_place(&mut z);
        let v_last = corner_high / s;
        let denom = 1.0 + z[0] + v_last * z[n - 1];
        if !denom.is_finite() || denom.abs() < PIVOT_EPS {
            return None;
        }
        Some(Self {
            inner,
            z,
            v_last,
            denom,
        })
    }

    pub fn solve_in_place(&self, d: &mut [f64]) {
        let n = d.len();
        self.inner.solve_in_place(d);
        let factor = (d[0] + self.v_last * d[n - 1]) / self.denom;
        for (x, z) in d.iter_mut().zip(&self.z) {
            *x -= factor * z;
        }
    }
}

/// Dense LU with partial pivoting, row-major.
#[derive(Debug, Clone)]
pub struct DenseLu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl DenseLu {
    pub fn factor(n: usize, mut a: Vec<f64>) -> Option<Self> {
        assert_eq!(a.len(), n * n);
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
                .unwrap();
            if a[p * n + k].abs() < PIVOT_EPS || !a[p * n + k].is_finite() {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                let l = a[i * n + k] / pivot;
                a[i * n + k] = l;
                for j in k + 1..n {
                    a[i * n + j] -= l * a[k * n + j];
                }
            }
        }
        Some(Self { n, lu: a, perm })
    }

    pub fn solve_in_place(&self, d: &mut [f64]) {
        let n = self.n;
        let b: Vec<f64> = self.perm.iter().map(|&p| d[p]).collect();
        d.copy_from_slice(&b);
        for i in 0..n {
            let mut s = d[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * d[j];
            }
            d[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = d[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * d[j];
            }
            d[i] = s / self.lu[i * n + i];
        }
    }
}

/// One factored stage matrix.
#[derive(Debug, Clone)]
pub enum Factorization {
    Tridiagonal(Tridiagonal),
    Cyclic(CyclicTridiagonal),
    Dense(DenseLu),
}

impl Factorization {
    pub fn solve_in_place(&self, d: &mut [f64]) {
        match self {
            Factorization::Tridiagonal(t) => t.solve_in_place(d),
            Factorization::Cyclic(c) => c.solve_in_place(d),
            Factorization::Dense(lu) => lu.solve_in_place(d),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Factorization::Tridiagonal(_) => "tridiagonal",
            Factorization::Cyclic(_) => "cyclic-tridiagonal",
            Factorization::Dense(_) => "dense",
        }
    }
}

pub(crate) fn singular(diag: f64) -> Error {
    Error::SingularStage { diag }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_solve(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
        let lu = DenseLu::factor(n, a.to_vec()).unwrap();
        let mut x = b.to_vec();
        lu.solve_in_place(&mut x);
        x
    }

    #[test]
    fn thomas_matches_dense() {
        let n = 6;
        let sub = [0.0, -1.0, 0.3, -0.7, 1.1, -0.2];
        let diag = [4.0, 3.5, 5.0, 4.2, 3.9, 4.4];
        let sup = [1.0, -0.5, 0.8, 0.1, -1.2, 0.0];
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = diag[i];
            if i > 0 {
                a[i * n + i - 1] = sub[i];
            }
            if i + 1 < n {
                a[i * n + i + 1] = sup[i];
            }
        }
        let b = [1.0, 2.0, -1.0, 0.5, 3.0, -2.0];
        let expect = dense_solve(n, &a, &b);
        let t = Tridiagonal::factor(&sub, &diag, &sup).unwrap();
        let mut x = b.to_vec();
        t.solve_in_place(&mut x);
        for (x, e) in x.iter().zip(&expect) {
            assert!((x - e).abs() < 1e-13);
        }
    }

    #[test]
    fn cyclic_matches_dense() {
        let n = 7;
        let sub = vec![-0.9; n];
        let diag = vec![1.0; n];
        let sup = vec![0.9; n];
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = diag[i];
            a[i * n + (i + n - 1) % n] += sub[i];
            a[i * n + (i + 1) % n] += sup[i];
        }
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let expect = dense_solve(n, &a, &b);
        let c = CyclicTridiagonal::factor(&sub, &diag, &sup, sup[n - 1], sub[0]).unwrap();
        let mut x = b.clone();
        c.solve_in_place(&mut x);
        for (x, e) in x.iter().zip(&expect) {
            assert!((x - e).abs() < 1e-12, "{x} vs {e}");
        }
    }

    #[test]
    fn cyclic_with_one_sided_corner() {
        // upwind-like: no sub diagonal, wrap only from the last row
        let n = 5;
        let r = 2.0;
        let sub = vec![0.0; n];
        let diag = vec![1.0 + r; n];
        let sup = vec![-r; n];
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = 1.0 + r;
            a[i * n + (i + 1) % n] += -r;
        }
        let b = [1.0, 0.0, 0.0, 2.0, -1.0];
        let expect = dense_solve(n, &a, &b);
        let c = CyclicTridiagonal::factor(&sub, &diag, &sup, -r, 0.0).unwrap();
        let mut x = b.to_vec();
        c.solve_in_place(&mut x);
        for (x, e) in x.iter().zip(&expect) {
            assert!((x - e).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_is_reported() {
        assert!(Tridiagonal::factor(&[0.0, 1.0], &[1.0, 1.0], &[1.0, 0.0]).is_none());
        assert!(DenseLu::factor(2, vec![1.0, 2.0, 2.0, 4.0]).is_none());
    }
}
