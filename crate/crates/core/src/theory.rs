//! Two-level convergence bounds for weighted FCF and FCFCF relaxation.
//!
//! With `L = lambda^m`, the FCF bound is
//! `max_x |L - mu| |1 - w + e^{ix} w L| / |1 - e^{ix} mu|`, maximized in
//! closed form through the half-angle substitution `r = tan(x/2)`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mgrit::{RelaxPattern, RelaxationSpec};
use crate::problems::ProblemSetup;
use crate::timestepping::{stability_eigenvalue, ButcherTableau};

/// Samples used by dense scans before refinement.
pub const SCAN_SAMPLES: usize = 4096;
const ROOT_DENOM_EPS: f64 = 1e-14;
const GOLDEN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundQuery {
    pub lambda: Complex64,
    pub mu: Complex64,
    pub m: usize,
    pub wc: f64,
    pub wcc: Option<f64>,
}

impl BoundQuery {
    pub fn fcf(lambda: Complex64, mu: Complex64, m: usize, wc: f64) -> Self {
        Self {
            lambda,
            mu,
            m,
            wc,
            wcc: None,
        }
    }

    pub fn fcfcf(lambda: Complex64, mu: Complex64, m: usize, wc: f64, wcc: f64) -> Self {
        Self {
            lambda,
            mu,
            m,
            wc,
            wcc: Some(wcc),
        }
    }

    fn lambda_m(&self) -> Complex64 {
        self.lambda.powu(self.m as u32)
    }

    fn check(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidArgument("coarsening factor must be positive".into()));
        }
        for (which, z) in [("lambda", self.lambda), ("mu", self.mu)] {
            let modulus = z.norm();
            if !(modulus < 1.0) {
                return Err(Error::Hypothesis { which, modulus });
            }
        }
        Ok(())
    }

    /// `|L - mu| |bracket(x)| / |1 - e^{ix} mu|` for the query's pattern.
    pub fn integrand(&self, x: f64) -> f64 {
        let l = self.lambda_m();
        let e = Complex64::from_polar(1.0, x);
        let w = self.wc;
        let bracket = match self.wcc {
            None => (1.0 - w) + e * w * l,
            Some(v) => {
                (1.0 - v) * (1.0 - w)
                    + e * (v * (1.0 - w) + w * (1.0 - v)) * l
                    + e * e * (v * w) * l * l
            }
        };
        (l - self.mu).norm() * bracket.norm() / (1.0 - e * self.mu).norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMethod {
    ExactClosedForm,
    NumericScan,
    Approximate,
}

impl BoundMethod {
    pub fn id(self) -> &'static str {
        match self {
            BoundMethod::ExactClosedForm => "exact-closed-form",
            BoundMethod::NumericScan => "numeric-scan",
            BoundMethod::Approximate => "approximate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundResult {
    pub value: f64,
    /// Maximizing angle in `[0, 2 pi)`; `NaN` for the approximate bounds.
    pub argmax_x: f64,
    pub method: BoundMethod,
}

fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Exact FCF bound via the critical points of the squared ratio.
pub fn fcf_bound_exact(q: &BoundQuery) -> Result<BoundResult> {
    q.check()?;
    let q = BoundQuery { wcc: None, ..*q };
    let l = q.lambda_m();
    let gap = (l - q.mu).norm();
    let w = q.wc;
    let a = w * (w - 1.0) * l.re;
    let b = w * (w - 1.0) * l.im;
    let (c, d) = (q.mu.re, q.mu.im);
    let c_mu = 1.0 + q.mu.norm_sqr();
    let c_lam = (w - 1.0) * (w - 1.0) + w * w * l.norm_sqr();
    let p = a * c_mu - c * c_lam;
    let qq = b * c_mu - d * c_lam;
    let k = a * d - b * c;
    let denom = qq - 2.0 * k;
    if denom.abs() < ROOT_DENOM_EPS {
        return Ok(scan_max(&q, SCAN_SAMPLES * 16, BoundMethod::NumericScan));
    }
    let ratio = |r: f64| {
        ((c_lam + 2.0 * a) * r * r + 4.0 * b * r + c_lam - 2.0 * a)
            / ((c_mu + 2.0 * c) * r * r + 4.0 * d * r + c_mu - 2.0 * c)
    };
    let disc = (p * p + qq * qq - 4.0 * k * k).max(0.0).sqrt();
    let mut best = (f64::NEG_INFINITY, 0.0);
    for r in [(p + disc) / denom, (p - disc) / denom] {
        let v = ratio(r);
        if v.is_finite() && v > best.0 {
            best = (v, wrap_angle(2.0 * r.atan()));
        }
    }
    // x = 0 is r = 0; x = pi is the limit r -> infinity.
    let at_zero = (c_lam - 2.0 * a) / (c_mu - 2.0 * c);
    if at_zero > best.0 {
        best = (at_zero, 0.0);
    }
    let at_pi = (c_lam + 2.0 * a) / (c_mu + 2.0 * c);
    if at_pi > best.0 {
        best = (at_pi, PI);
    }
    Ok(BoundResult {
        value: gap * best.0.max(0.0).sqrt(),
        argmax_x: best.1,
        method: BoundMethod::ExactClosedForm,
    })
}

/// `|L - mu| / (1 - |mu|) * |1 - w + w |lambda|^m|`.
pub fn fcf_bound_approx(q: &BoundQuery) -> Result<f64> {
    q.check()?;
    let lm = q.lambda.norm().powi(q.m as i32);
    let gap = (q.lambda_m() - q.mu).norm();
    Ok(gap / (1.0 - q.mu.norm()) * (1.0 - q.wc + q.wc * lm).abs())
}

/// FCFCF bound by dense sampling plus golden-section refinement.
pub fn fcfcf_bound_numeric(q: &BoundQuery) -> Result<BoundResult> {
    q.check()?;
    if q.wcc.is_none() {
        return Err(Error::InvalidArgument("FCFCF bound needs the second weight".into()));
    }
    Ok(scan_max(q, SCAN_SAMPLES, BoundMethod::NumericScan))
}

/// The product-form FCFCF approximation.
pub fn fcfcf_bound_approx(q: &BoundQuery) -> Result<f64> {
    let wcc = q
        .wcc
        .ok_or_else(|| Error::InvalidArgument("FCFCF bound needs the second weight".into()))?;
    let first = fcf_bound_approx(q)?;
    let lm = q.lambda.norm().powi(q.m as i32);
    Ok(first * (1.0 - wcc + wcc * lm).abs())
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > GOLDEN_TOL {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    (f(x), x)
}

/// Maximum of the query integrand over a uniform grid, refined around every
/// discrete local maximum.
fn scan_max(q: &BoundQuery, samples: usize, method: BoundMethod) -> BoundResult {
    let h = TAU / samples as f64;
    let vals: Vec<f64> = (0..samples).map(|i| q.integrand(i as f64 * h)).collect();
    let mut best = (f64::NEG_INFINITY, 0.0);
    let f = |x: f64| q.integrand(x);
    for i in 0..samples {
        let prev = vals[(i + samples - 1) % samples];
        let next = vals[(i + 1) % samples];
        if vals[i] >= prev && vals[i] >= next {
            let x = i as f64 * h;
            let (v, xr) = golden_max(&f, x - h, x + h);
            let (v, xr) = if v >= vals[i] { (v, xr) } else { (vals[i], x) };
            if v > best.0 {
                best = (v, wrap_angle(xr));
            }
        }
    }
    if !best.0.is_finite() {
        // constant integrand
        best = (vals[0], 0.0);
    }
    BoundResult {
        value: best.0,
        argmax_x: best.1,
        method,
    }
}

/// Dense scan of the integrand at `samples` equispaced angles, unrefined.
pub fn dense_scan(q: &BoundQuery, samples: usize) -> f64 {
    let h = TAU / samples as f64;
    (0..samples)
        .map(|i| q.integrand(i as f64 * h))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Per-mode bound for a relaxation pattern and finest-level weights.
pub fn pattern_bound(
    lambda: Complex64,
    mu: Complex64,
    m: usize,
    pattern: RelaxPattern,
    wc: f64,
    wcc: f64,
) -> Result<f64> {
    Ok(match pattern {
        RelaxPattern::F => fcf_bound_exact(&BoundQuery::fcf(lambda, mu, m, 0.0))?.value,
        RelaxPattern::Fcf => fcf_bound_exact(&BoundQuery::fcf(lambda, mu, m, wc))?.value,
        RelaxPattern::Fcfcf => {
            fcfcf_bound_numeric(&BoundQuery::fcfcf(lambda, mu, m, wc, wcc))?.value
        }
    })
}

/// Maximum bound over mode pairs `(lambda_gamma, mu_gamma)`, `gamma = 1..`.
pub fn max_bound_over_modes(
    pairs: &[(Complex64, Complex64)],
    m: usize,
    spec: &RelaxationSpec,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (g, &(lambda, mu)) in pairs.iter().enumerate() {
        for (which, z) in [("lambda", lambda), ("mu", mu)] {
            if !(z.norm() < 1.0) {
                return Err(Error::ModeHypothesis {
                    gamma: g + 1,
                    which,
                    modulus: z.norm(),
                });
            }
        }
        let v = pattern_bound(lambda, mu, m, spec.pattern, spec.wc_at(0), spec.wcc_at(0))?;
        worst = worst.max(v);
    }
    Ok(worst)
}

/// Fine and coarse eigenvalue pairs for a spatial spectrum.
pub fn mode_pairs(
    tableau: &ButcherTableau,
    dt: f64,
    m: usize,
    spectrum: &[Complex64],
) -> Result<Vec<(Complex64, Complex64)>> {
    spectrum
        .iter()
        .map(|&k| {
            Ok((
                stability_eigenvalue(tableau, k * dt)?,
                stability_eigenvalue(tableau, k * (dt * m as f64))?,
            ))
        })
        .collect()
}

/// Worst-case two-level bound over the problem's spatial spectrum.
pub fn problem_bound(
    p: &ProblemSetup,
    tableau: &ButcherTableau,
    dt: f64,
    m: usize,
    spec: &RelaxationSpec,
) -> Result<f64> {
    let pairs = mode_pairs(tableau, dt, m, &p.spatial_spectrum())?;
    max_bound_over_modes(&pairs, m, spec)
}

/// Inclusive equispaced range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRange {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl GridRange {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        if steps == 0 || !(min <= max) || !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "invalid range {min}:{max} with {steps} steps"
            )));
        }
        Ok(Self { min, max, steps })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let h = (self.max - self.min) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| self.min + i as f64 * h).collect()
    }
}

/// Bound values over a rectangle of `z = dt * kappa`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapGrid {
    pub scheme: String,
    pub m: usize,
    pub wc: f64,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    /// `values[i][j]` is the bound at `re[j] + i im[i]`; `NaN` marks cells
    /// where `|lambda| >= 1` or `|mu| >= 1`.
    pub values: Vec<Vec<f64>>,
}

impl HeatmapGrid {
    pub fn valid_cells(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().flatten().copied().filter(|v| !v.is_nan())
    }
}

/// FCF bound at a single `z`, or `NaN` outside the bound's hypothesis.
pub fn bound_at(tableau: &ButcherTableau, m: usize, wc: f64, z: Complex64) -> f64 {
    let (Ok(lambda), Ok(mu)) = (
        stability_eigenvalue(tableau, z),
        stability_eigenvalue(tableau, z * m as f64),
    ) else {
        return f64::NAN;
    };
    fcf_bound_exact(&BoundQuery::fcf(lambda, mu, m, wc)).map_or(f64::NAN, |r| r.value)
}

pub fn heatmap_scan(
    tableau: &ButcherTableau,
    m: usize,
    wc: f64,
    re_range: GridRange,
    im_range: GridRange,
) -> HeatmapGrid {
    let re = re_range.points();
    let im = im_range.points();
    let values = im
        .iter()
        .map(|&y| {
            re.iter()
                .map(|&x| bound_at(tableau, m, wc, Complex64::new(x, y)))
                .collect()
        })
        .collect();
    HeatmapGrid {
        scheme: tableau.name.clone(),
        m,
        wc,
        re,
        im,
        values,
    }
}
