//! One-step integrators `u_j = Phi u_{j-1} + g_j` for linear systems
//! `u' = G u + f(t)`, built from singly diagonally implicit Runge-Kutta
//! tableaux, and their scalar stability functions.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CyclicTridiagonal, DenseLu, Factorization, Tridiagonal};

/// Diagonal of the three-stage L-stable SDIRK method: the root of
/// `x^3 - 3x^2 + 3x/2 - 1/6` in (1/6, 1/2).
pub const SDIRK33_GAMMA: f64 = 0.435_866_521_508_458_999_416_019_451_193_556_8;

/// Supported integration schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    BackwardEuler,
    Sdirk22,
    Sdirk23,
    Sdirk33,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::BackwardEuler,
        Scheme::Sdirk22,
        Scheme::Sdirk23,
        Scheme::Sdirk33,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::BackwardEuler => "backward-euler",
            Scheme::Sdirk22 => "sdirk22",
            Scheme::Sdirk23 => "sdirk23",
            Scheme::Sdirk33 => "sdirk33",
        }
    }

    pub fn tableau(self) -> ButcherTableau {
        let name = self.name().to_string();
        match self {
            Scheme::BackwardEuler => ButcherTableau {
                name,
                a: vec![vec![1.0]],
                b: vec![1.0],
            },
            Scheme::Sdirk22 => {
                let g = 1.0 - 1.0 / 2f64.sqrt();
                ButcherTableau {
                    name,
                    a: vec![vec![g, 0.0], vec![1.0 - g, g]],
                    b: vec![1.0 - g, g],
                }
            }
            Scheme::Sdirk23 => {
                let g = (3.0 + 3f64.sqrt()) / 6.0;
                ButcherTableau {
                    name,
                    a: vec![vec![g, 0.0], vec![1.0 - 2.0 * g, g]],
                    b: vec![0.5, 0.5],
                }
            }
            Scheme::Sdirk33 => {
                let g = SDIRK33_GAMMA;
                let b1 = -(6.0 * g * g - 16.0 * g + 1.0) / 4.0;
                let b2 = (6.0 * g * g - 20.0 * g + 5.0) / 4.0;
                ButcherTableau {
                    name,
                    a: vec![
                        vec![g, 0.0, 0.0],
                        vec![(1.0 - g) / 2.0, g, 0.0],
                        vec![b1, b2, g],
                    ],
                    b: vec![b1, b2, g],
                }
            }
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::UnknownScheme {
                name: s.to_string(),
                valid: Scheme::ALL.map(Scheme::name).join(", "),
            })
    }
}

/// Coefficients `(A, b)` of an s-stage diagonally implicit Runge-Kutta method.
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    pub name: String,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

/// Looks up a tableau by its identifier.
pub fn make_tableau(name: &str) -> Result<ButcherTableau> {
    Ok(name.parse::<Scheme>()?.tableau())
}

impl ButcherTableau {
    pub fn stages(&self) -> usize {
        self.b.len()
    }

    /// Stage abscissae `c_i = sum_j a_ij`.
    pub fn abscissae(&self) -> Vec<f64> {
        self.a.iter().map(|row| row.iter().sum()).collect()
    }

    /// True when the update weights equal the last row of `A`, so the new
    /// value is the last stage value.
    pub fn stiffly_accurate(&self) -> bool {
        self.a.last().map(|row| row == &self.b).unwrap_or(false)
    }

    /// Checks consistency, lower-triangularity and (for s > 1) equal diagonal.
    pub fn validate(&self) -> Result<()> {
        let s = self.stages();
        if s == 0 || self.a.len() != s || self.a.iter().any(|r| r.len() != s) {
            return Err(Error::InvalidArgument(format!(
                "tableau `{}` is not square with {} stages",
                self.name, s
            )));
        }
        if (self.b.iter().sum::<f64>() - 1.0).abs() > 1e-14 {
            return Err(Error::InvalidArgument(format!(
                "tableau `{}` weights do not sum to one",
                self.name
            )));
        }
        for (i, row) in self.a.iter().enumerate() {
            if row[i + 1..].iter().any(|&v| v != 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "tableau `{}` is not lower triangular",
                    self.name
                )));
            }
            if (row[i] - self.a[0][0]).abs() > 1e-14 {
                return Err(Error::InvalidArgument(format!(
                    "tableau `{}` does not have a single diagonal value",
                    self.name
                )));
            }
        }
        Ok(())
    }

    /// The distinct diagonal entries, in stage order.
    fn distinct_diagonal(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for (i, row) in self.a.iter().enumerate() {
            if !out.contains(&row[i]) {
                out.push(row[i]);
            }
        }
        out
    }
}

/// Runge-Kutta stability function `1 + z b^T (I - z A)^{-1} 1`.
pub fn stability_eigenvalue(tableau: &ButcherTableau, z: Complex64) -> Result<Complex64> {
    let s = tableau.stages();
    let mut k = vec![Complex64::new(0.0, 0.0); s];
    for i in 0..s {
        let diag = tableau.a[i][i];
        let pivot = Complex64::new(1.0, 0.0) - z * diag;
        if pivot.norm() == 0.0 {
            return Err(Error::SingularStability {
                re: z.re,
                im: z.im,
                diag,
            });
        }
        let mut acc = Complex64::new(1.0, 0.0);
        for j in 0..i {
            acc += z * tableau.a[i][j] * k[j];
        }
        k[i] = acc / pivot;
    }
    let sum: Complex64 = tableau.b.iter().zip(&k).map(|(b, k)| *b * k).sum();
    Ok(Complex64::new(1.0, 0.0) + z * sum)
}

/// A constant-coefficient stencil operator `G` with optional periodic wrap.
#[derive(Debug, Clone)]
pub struct SpatialOperator {
    dim: usize,
    bands: Vec<(isize, f64)>,
    periodic: bool,
    eigenvalues: Vec<Complex64>,
}

impl SpatialOperator {
    pub fn new(
        dim: usize,
        bands: Vec<(isize, f64)>,
        periodic: bool,
        eigenvalues: Vec<Complex64>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("spatial dimension must be positive".into()));
        }
        if eigenvalues.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: eigenvalues.len(),
            });
        }
        if bands.iter().any(|(off, _)| off.unsigned_abs() >= dim.max(2)) {
            return Err(Error::InvalidArgument(
                "stencil offset exceeds the operator dimension".into(),
            ));
        }
        Ok(Self {
            dim,
            bands,
            periodic,
            eigenvalues,
        })
    }

    /// The zero operator, for which every step is the identity.
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            bands: Vec::new(),
            periodic: false,
            eigenvalues: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bands(&self) -> &[(isize, f64)] {
        &self.bands
    }

    pub fn periodic(&self) -> bool {
        self.periodic
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    fn column(&self, row: usize, off: isize) -> Option<usize> {
        let n = self.dim as isize;
        let j = row as isize + off;
        if self.periodic {
            Some(j.rem_euclid(n) as usize)
        } else if (0..n).contains(&j) {
            Some(j as usize)
        } else {
            None
        }
    }

    /// `y = G x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for &(off, coeff) in &self.bands {
                if let Some(j) = self.column(i, off) {
                    acc += coeff * x[j];
                }
            }
            *yi = acc;
        }
    }

    /// Row-major dense copy of `G`.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for &(off, coeff) in &self.bands {
                if let Some(j) = self.column(i, off) {
                    a[i * n + j] += coeff;
                }
            }
        }
        a
    }

    /// Factors `I - scale * G`.
    pub fn factor_shifted(&self, scale: f64, diag_entry: f64) -> Result<Factorization> {
        let n = self.dim;
        let tri = self.bands.iter().all(|(off, _)| off.abs() <= 1);
        if tri && (!self.periodic || n >= 3) {
            let coeff = |o: isize| -> f64 {
                self.bands
                    .iter()
                    .filter(|(off, _)| *off == o)
                    .map(|(_, c)| c)
                    .sum()
            };
            let sub = vec![-scale * coeff(-1); n];
            let diag = vec![1.0 - scale * coeff(0); n];
            let sup = vec![-scale * coeff(1); n];
            if self.periodic {
                return CyclicTridiagonal::factor(&sub, &diag, &sup, sup[0], sub[0])
                    .map(Factorization::Cyclic)
                    .ok_or_else(|| linalg::singular(diag_entry));
            }
            return Tridiagonal::factor(&sub, &diag, &sup)
                .map(Factorization::Tridiagonal)
                .ok_or_else(|| linalg::singular(diag_entry));
        }
        let mut a = self.to_dense();
        for (k, v) in a.iter_mut().enumerate() {
            *v *= -scale;
            if k % (n + 1) == 0 {
                *v += 1.0;
            }
        }
        DenseLu::factor(n, a)
            .map(Factorization::Dense)
            .ok_or_else(|| linalg::singular(diag_entry))
    }
}

/// The one-step propagator `Phi` for a fixed tableau, step size and operator.
/// Stage systems are factored once at construction.
#[derive(Debug, Clone)]
pub struct StepOperator {
    tableau: ButcherTableau,
    dt: f64,
    op: Arc<SpatialOperator>,
    factors: Vec<(f64, Factorization)>,
    stiffly_accurate: bool,
}

/// Factors the stage systems of one step.
pub fn factor_step(
    op: Arc<SpatialOperator>,
    dt: f64,
    tableau: &ButcherTableau,
) -> Result<StepOperator> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
    }
    tableau.validate()?;
    let factors = tableau
        .distinct_diagonal()
        .into_iter()
        .map(|d| op.factor_shifted(d * dt, d).map(|f| (d, f)))
        .collect::<Result<Vec<_>>>()?;
    Ok(StepOperator {
        stiffly_accurate: tableau.stiffly_accurate(),
        tableau: tableau.clone(),
        dt,
        op,
        factors,
    })
}

impl StepOperator {
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn tableau(&self) -> &ButcherTableau {
        &self.tableau
    }

    pub fn spatial_op(&self) -> &Arc<SpatialOperator> {
        &self.op
    }

    pub fn factorization_count(&self) -> usize {
        self.factors.len()
    }

    pub fn factorization_kinds(&self) -> Vec<&'static str> {
        self.factors.iter().map(|(_, f)| f.kind()).collect()
    }

    fn factor_for(&self, diag: f64) -> &Factorization {
        &self
            .factors
            .iter()
            .find(|(d, _)| *d == diag)
            .expect("stage diagonal was factored")
            .1
    }

    /// `out = Phi u`.
    pub fn apply_into(&self, u: &[f64], out: &mut [f64]) {
        self.advance(u, None, out);
    }

    /// `out = Phi u + g`.
    pub fn step_into(&self, u_prev: &[f64], g: &[f64], out: &mut [f64]) {
        self.apply_into(u_prev, out);
        for (o, gi) in out.iter_mut().zip(g) {
            *o += gi;
        }
    }

    /// `Phi u_prev + g_j`, checking dimensions.
    pub fn step(&self, u_prev: &[f64], g: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        for len in [u_prev.len(), g.len()] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: len,
                });
            }
        }
        let mut out = vec![0.0; n];
        self.step_into(u_prev, g, &mut out);
        Ok(out)
    }

    /// One step of `u' = G u + f(t)` from `t_prev`; `source(t, buf)` writes
    /// `f(t)` into `buf`.
    pub fn forced_step_into(
        &self,
        u: &[f64],
        t_prev: f64,
        source: &dyn Fn(f64, &mut [f64]),
        out: &mut [f64],
    ) {
        self.advance(u, Some((t_prev, source)), out);
    }

    fn advance(&self, u: &[f64], source: Option<(f64, &dyn Fn(f64, &mut [f64]))>, out: &mut [f64]) {
        let n = self.dim();
        let s = self.tableau.stages();
        let dt = self.dt;
        let c = if source.is_some() {
            self.tableau.abscissae()
        } else {
            Vec::new()
        };
        // Fast path: single-stage stiffly accurate with no source (backward Euler).
        if s == 1 && self.stiffly_accurate && source.is_none() {
            out.copy_from_slice(u);
            self.factors[0].1.solve_in_place(out);
            return;
        }
        let mut slopes: Vec<Vec<f64>> = Vec::with_capacity(s);
        let mut f_buf = vec![0.0; n];
        let mut stage = vec![0.0; n];
        for i in 0..s {
            let aii = self.tableau.a[i][i];
            stage.copy_from_slice(u);
            for (j, slope) in slopes.iter().enumerate() {
                let w = dt * self.tableau.a[i][j];
                if w != 0.0 {
                    for (y, k) in stage.iter_mut().zip(slope) {
                        *y += w * k;
                    }
                }
            }
            let mut f_i = None;
            if let Some((t0, src)) = source {
                src(t0 + c[i] * dt, &mut f_buf);
                for (y, f) in stage.iter_mut().zip(&f_buf) {
                    *y += aii * dt * f;
                }
                f_i = Some(f_buf.clone());
            }
            self.factor_for(aii).solve_in_place(&mut stage);
            if i + 1 == s && self.stiffly_accurate {
                out.copy_from_slice(&stage);
                return;
            }
            let mut k = vec![0.0; n];
            self.op.apply(&stage, &mut k);
            if let Some(f) = f_i {
                for (ki, fi) in k.iter_mut().zip(&f) {
                    *ki += fi;
                }
            }
            slopes.push(k);
        }
        out.copy_from_slice(u);
        for (bi, k) in self.tableau.b.iter().zip(&slopes) {
            let w = dt * bi;
            for (o, ki) in out.iter_mut().zip(k) {
                *o += w * ki;
            }
        }
    }
}
