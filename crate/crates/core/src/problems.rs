//! The 1D model problems: diffusion with a manufactured source, periodic
//! central-difference advection, and periodic upwinded advection.
//!
//! Grid sizes count grid points the way the experiment tables do: `N_x`
//! includes both Dirichlet boundary points for the heat problem (interior
//! unknowns `N_x - 2`, `h_x = L/(N_x - 1)`), and for the periodic problems the
//! duplicated end point (unknowns `N_x - 1`, `h_x = L/(N_x - 1)`).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spacetime::SpaceTimeState;
use crate::timestepping::{SpatialOperator, StepOperator};

/// Dissipation coefficient of the upwinded advection problem.
pub const UPWIND_EPSILON: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    Heat1d,
    Adv1dCentral,
    Adv1dUpwind,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 3] = [
        ProblemKind::Heat1d,
        ProblemKind::Adv1dCentral,
        ProblemKind::Adv1dUpwind,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ProblemKind::Heat1d => "heat1d",
            ProblemKind::Adv1dCentral => "adv1d-central",
            ProblemKind::Adv1dUpwind => "adv1d-upwind",
        }
    }

    pub fn is_advection(self) -> bool {
        !matches!(self, ProblemKind::Heat1d)
    }

    pub fn build(self, nx: usize, nt: usize) -> Result<ProblemSetup> {
        match self {
            ProblemKind::Heat1d => build_heat1d(nx, nt),
            ProblemKind::Adv1dCentral => build_adv1d_central(nx, nt),
            ProblemKind::Adv1dUpwind => build_adv1d_upwind(nx, nt),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProblemKind::ALL
            .into_iter()
            .find(|p| p.id() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown problem `{s}`; expected one of: {}",
                    ProblemKind::ALL.map(ProblemKind::id).join(", ")
                ))
            })
    }
}

type SourceFn = fn(f64, f64) -> f64;
type ExactFn = fn(f64, f64) -> f64;

/// A fully specified space-time model problem.
#[derive(Debug, Clone)]
pub struct ProblemSetup {
    pub kind: ProblemKind,
    pub spatial_op: Arc<SpatialOperator>,
    /// Grid points in space, as reported in the experiment tables.
    pub nx: usize,
    /// Time points, including `t = 0`.
    pub nt: usize,
    pub domain_length: f64,
    pub final_time: f64,
    pub hx: f64,
    pub dt: f64,
    /// Coordinates of the unknowns.
    pub grid: Vec<f64>,
    pub initial_condition: Vec<f64>,
    source: Option<SourceFn>,
    exact: Option<ExactFn>,
}

fn check_sizes(nx: usize, nt: usize, min_nx: usize) -> Result<()> {
    if nx < min_nx || nt < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid too small: need N_x >= {min_nx} and N_t >= 2, got {nx} x {nt}"
        )));
    }
    Ok(())
}

fn heat_source(x: f64, t: f64) -> f64 {
    (PI * x).sin() * (PI * PI * t.cos() - t.sin())
}

fn heat_exact(x: f64, t: f64) -> f64 {
    (PI * x).sin() * t.cos()
}

fn gaussian_pulse(x: f64) -> f64 {
    (-25.0 * (x - 0.5) * (x - 0.5)).exp()
}

/// Dirichlet heat equation on `[0, 1] x [0, 0.625]` with exact solution
/// `sin(pi x) cos(t)`, discretized with the three-point Laplacian.
pub fn build_heat1d(nx: usize, nt: usize) -> Result<ProblemSetup> {
    check_sizes(nx, nt, 3)?;
    let (length, final_time) = (1.0, 0.625);
    let n = nx - 2;
    let hx = length / (nx - 1) as f64;
    let s = 1.0 / (hx * hx);
    let eig = (1..=n)
        .map(|g| {
            let v = (g as f64 * PI / (2.0 * (n + 1) as f64)).sin();
            Complex64::new(-4.0 * s * v * v, 0.0)
        })
        .collect();
    let op = SpatialOperator::new(n, vec![(-1, s), (0, -2.0 * s), (1, s)], false, eig)?;
    let grid: Vec<f64> = (1..=n).map(|i| i as f64 * hx).collect();
    Ok(ProblemSetup {
        kind: ProblemKind::Heat1d,
        spatial_op: Arc::new(op),
        nx,
        nt,
        domain_length: length,
        final_time,
        hx,
        dt: final_time / (nt - 1) as f64,
        initial_condition: grid.iter().map(|&x| heat_exact(x, 0.0)).collect(),
        grid,
        source: Some(heat_source),
        exact: Some(heat_exact),
    })
}

fn periodic_grid(nx: usize, length: f64) -> (usize, f64, Vec<f64>) {
    let n = nx - 1;
    let hx = length / n as f64;
    (n, hx, (0..n).map(|i| i as f64 * hx).collect())
}

/// Periodic advection with central differences; spatial eigenvalues are
/// purely imaginary. The domain has length 2 so that `dt/h_x = 0.5` when
/// `N_x = N_t` on `t in [0, 1]`.
pub fn build_adv1d_central(nx: usize, nt: usize) -> Result<ProblemSetup> {
    check_sizes(nx, nt, 4)?;
    let (length, final_time) = (2.0, 1.0);
    let (n, hx, grid) = periodic_grid(nx, length);
    let eig = (1..=n)
        .map(|g| Complex64::new(0.0, (2.0 * PI * g as f64 / n as f64).sin() / hx))
        .collect();
    let half = 0.5 / hx;
    let op = SpatialOperator::new(n, vec![(-1, -half), (1, half)], true, eig)?;
    Ok(ProblemSetup {
        kind: ProblemKind::Adv1dCentral,
        spatial_op: Arc::new(op),
        nx,
        nt,
        domain_length: length,
        final_time,
        hx,
        dt: final_time / (nt - 1) as f64,
        initial_condition: grid.iter().map(|&x| gaussian_pulse(x)).collect(),
        grid,
        source: None,
        exact: None,
    })
}

/// Periodic advection with grid-dependent dissipation `eps * h_x * u_xx`,
/// `eps = 0.5`, which turns the central stencil into first-order upwinding.
/// Unit domain, so `dt/h_x = 1` when `N_x = N_t` on `t in [0, 1]`.
///
/// The reported spectrum is the closed form used for the bounds, whose
/// dissipative part uses the Dirichlet-style argument `gamma pi / (2(n+1))`;
/// it matches the assembled operator only in its imaginary part.
pub fn build_adv1d_upwind(nx: usize, nt: usize) -> Result<ProblemSetup> {
    check_sizes(nx, nt, 4)?;
    let (length, final_time) = (1.0, 1.0);
    let (n, hx, grid) = periodic_grid(nx, length);
    let eps = UPWIND_EPSILON;
    let eig = (1..=n)
        .map(|g| {
            let v = (g as f64 * PI / (2.0 * (n + 1) as f64)).sin();
            Complex64::new(
                -4.0 * eps / hx * v * v,
                (2.0 * PI * g as f64 / n as f64).sin() / hx,
            )
        })
        .collect();
    let bands = vec![
        (-1, eps / hx - 0.5 / hx),
        (0, -2.0 * eps / hx),
        (1, 0.5 / hx + eps / hx),
    ];
    let op = SpatialOperator::new(n, bands, true, eig)?;
    Ok(ProblemSetup {
        kind: ProblemKind::Adv1dUpwind,
        spatial_op: Arc::new(op),
        nx,
        nt,
        domain_length: length,
        final_time,
        hx,
        dt: final_time / (nt - 1) as f64,
        initial_condition: grid.iter().map(|&x| gaussian_pulse(x)).collect(),
        grid,
        source: None,
        exact: None,
    })
}

impl ProblemSetup {
    /// Number of spatial unknowns.
    pub fn unknowns(&self) -> usize {
        self.spatial_op.dim()
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.dt
    }

    pub fn label(&self) -> String {
        format!("{}-{}x{}", self.kind, self.nx, self.nt)
    }

    /// Closed-form eigenvalues of the spatial operator, `gamma = 1..n`.
    pub fn spatial_spectrum(&self) -> Vec<Complex64> {
        self.spatial_op.eigenvalues().to_vec()
    }

    pub fn has_source(&self) -> bool {
        self.source.is_some()
    }

    pub fn exact_solution(&self, x: f64, t: f64) -> Option<f64> {
        self.exact.map(|f| f(x, t))
    }

    /// Writes `f(x_i, t)` into `out`.
    pub fn source_at(&self, t: f64, out: &mut [f64]) {
        match self.source {
            Some(f) => {
                for (o, &x) in out.iter_mut().zip(&self.grid) {
                    *o = f(x, t);
                }
            }
            None => out.fill(0.0),
        }
    }

    /// `g_j` of the time-stepping system: `g_0 = u_0`, and for `j >= 1` the
    /// source contribution of the step from `t_{j-1}` to `t_j`.
    pub fn forcing(&self, step: &StepOperator, j: usize) -> Vec<f64> {
        if j == 0 {
            return self.initial_condition.clone();
        }
        let n = self.unknowns();
        let mut out = vec![0.0; n];
        if self.source.is_some() {
            let zero = vec![0.0; n];
            let src = |t: f64, buf: &mut [f64]| self.source_at(t, buf);
            step.forced_step_into(&zero, self.time(j - 1), &src, &mut out);
        }
        out
    }

    /// The full right-hand side `g` for the given fine-grid step operator.
    pub fn assemble_rhs(&self, step: &StepOperator) -> SpaceTimeState {
        let n = self.unknowns();
        let mut g = SpaceTimeState::zeros(n, self.nt);
        g.row_mut(0).copy_from_slice(&self.initial_condition);
        if self.source.is_some() {
            for j in 1..self.nt {
                let row = self.forcing(step, j);
                g.row_mut(j).copy_from_slice(&row);
            }
        }
        g
    }

    /// The default residual halting tolerance scale per problem family.
    pub fn default_tol_scale(&self) -> f64 {
        if self.kind.is_advection() {
            1e-8
        } else {
            1e-10
        }
    }

    pub fn default_max_iters(&self) -> usize {
        if self.kind.is_advection() {
            70
        } else {
            100
        }
    }
}
