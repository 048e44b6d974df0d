//! Multilevel MGRIT with weighted C-relaxation.
//!
//! The fine system is `u_0 = g_0`, `u_j = Phi u_{j-1} + g_j`. Coarse levels
//! carry every `m`-th point and a rediscretized propagator with step `m dt`.
//! Cycling is the linear correction scheme; interpolation is injection
//! followed by F-relaxation.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::problems::ProblemSetup;
use crate::spacetime::SpaceTimeState;
use crate::timestepping::{factor_step, ButcherTableau, SpatialOperator, StepOperator};

/// How coarse propagators are built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoarseOperator {
    /// Same tableau with the coarse step size.
    #[default]
    Rediscretize,
    /// `Phi^m` of the level above, applied by repeated fine steps.
    ExactPower,
}

/// The one-step propagator of a level.
#[derive(Debug, Clone)]
pub enum Propagator {
    Step(Arc<StepOperator>),
    Power { base: Arc<StepOperator>, times: usize },
}

impl Propagator {
    pub fn apply_into(&self, u: &[f64], out: &mut [f64]) {
        match self {
            Propagator::Step(s) => s.apply_into(u, out),
            Propagator::Power { base, times } => {
                out.copy_from_slice(u);
                let mut tmp = u.to_vec();
                for _ in 0..*times {
                    tmp.copy_from_slice(out);
                    base.apply_into(&tmp, out);
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Propagator::Step(s) | Propagator::Power { base: s, .. } => s.dim(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Level {
    pub nt: usize,
    pub dt: f64,
    pub propagator: Propagator,
}

impl Level {
    /// `out = Phi u_{j-1} + g_j - u_j`, or zero for `j = 0` when `u_0 = g_0`.
    fn residual_row(&self, u: &SpaceTimeState, g: &SpaceTimeState, j: usize, out: &mut [f64]) {
        if j == 0 {
            for ((o, gi), ui) in out.iter_mut().zip(g.row(0)).zip(u.row(0)) {
                *o = gi - ui;
            }
            return;
        }
        self.propagator.apply_into(u.row(j - 1), out);
        for ((o, gi), ui) in out.iter_mut().zip(g.row(j)).zip(u.row(j)) {
            *o += gi - ui;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HierarchyOptions {
    /// Coarsening factor.
    pub m: usize,
    /// Maximum number of levels; 0 means coarsen until `coarsest_max`.
    pub max_levels: usize,
    pub coarsest_max: usize,
    pub coarse: CoarseOperator,
}

impl Default for HierarchyOptions {
    fn default() -> Self {
        Self {
            m: 2,
            max_levels: 0,
            coarsest_max: 4,
            coarse: CoarseOperator::Rediscretize,
        }
    }
}

impl HierarchyOptions {
    pub fn two_level(m: usize) -> Self {
        Self {
            m,
            max_levels: 2,
            ..Self::default()
        }
    }

    pub fn multilevel(m: usize) -> Self {
        Self {
            m,
            ..Self::default()
        }
    }
}

/// Level sizes produced by the options, or the level whose size is not
/// divisible.
fn level_sizes(nt: usize, opts: &HierarchyOptions) -> std::result::Result<Vec<usize>, usize> {
    let mut sizes = vec![nt];
    loop {
        let cur = *sizes.last().unwrap();
        if opts.max_levels != 0 && sizes.len() >= opts.max_levels {
            break;
        }
        if cur <= opts.coarsest_max.max(1) {
            break;
        }
        if (cur - 1) % opts.m != 0 {
            return Err(sizes.len() - 1);
        }
        sizes.push((cur - 1) / opts.m + 1);
    }
    Ok(sizes)
}

/// Temporal grid hierarchy, finest level first.
#[derive(Debug, Clone)]
pub struct GridHierarchy {
    pub levels: Vec<Level>,
    pub m: usize,
    pub coarsest_max: usize,
}

impl GridHierarchy {
    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.nt).collect()
    }
}

/// Builds the hierarchy for problem `p` stepped with `tableau`.
pub fn build_hierarchy(
    p: &ProblemSetup,
    tableau: &ButcherTableau,
    opts: &HierarchyOptions,
) -> Result<GridHierarchy> {
    build_hierarchy_for(p.spatial_op.clone(), p.nt, p.dt, tableau, opts)
}

pub fn build_hierarchy_for(
    op: Arc<SpatialOperator>,
    nt: usize,
    dt: f64,
    tableau: &ButcherTableau,
    opts: &HierarchyOptions,
) -> Result<GridHierarchy> {
    if opts.m < 2 {
        return Err(Error::InvalidArgument(format!(
            "coarsening factor must be at least 2, got {}",
            opts.m
        )));
    }
    if nt < 2 {
        return Err(Error::InvalidArgument(format!("need N_t >= 2, got {nt}")));
    }
    let sizes = level_sizes(nt, opts).map_err(|level| {
        let mut bad = nt;
        for _ in 0..level {
            bad = (bad - 1) / opts.m + 1;
        }
        let suggestion = (2..nt)
            .rev()
            .find(|&n| level_sizes(n, opts).is_ok_and(|s| s.len() > 1))
            .unwrap_or(opts.m + 1);
        Error::NotDivisible {
            level,
            remainder_of: bad - 1,
            m: opts.m,
            suggestion,
        }
    })?;
    let fine = Arc::new(factor_step(op.clone(), dt, tableau)?);
    let mut levels = Vec::with_capacity(sizes.len());
    let mut level_dt = dt;
    for (l, &n) in sizes.iter().enumerate() {
        let propagator = if l == 0 {
            Propagator::Step(fine.clone())
        } else {
            match opts.coarse {
                CoarseOperator::Rediscretize => {
                    Propagator::Step(Arc::new(factor_step(op.clone(), level_dt, tableau)?))
                }
                CoarseOperator::ExactPower => Propagator::Power {
                    base: fine.clone(),
                    times: opts.m.pow(l as u32),
                },
            }
        };
        levels.push(Level {
            nt: n,
            dt: level_dt,
            propagator,
        });
        level_dt *= opts.m as f64;
    }
    Ok(GridHierarchy {
        levels,
        m: opts.m,
        coarsest_max: opts.coarsest_max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelaxPattern {
    F,
    Fcf,
    Fcfcf,
}

impl RelaxPattern {
    pub fn id(self) -> &'static str {
        match self {
            RelaxPattern::F => "f",
            RelaxPattern::Fcf => "fcf",
            RelaxPattern::Fcfcf => "fcfcf",
        }
    }
}

impl fmt::Display for RelaxPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for RelaxPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "f" => Ok(RelaxPattern::F),
            "fcf" => Ok(RelaxPattern::Fcf),
            "fcfcf" => Ok(RelaxPattern::Fcfcf),
            _ => Err(Error::InvalidArgument(format!(
                "unknown relaxation `{s}`; expected one of: f, fcf, fcfcf"
            ))),
        }
    }
}

/// Relaxation pattern and per-level C-weights. A list shorter than the
/// number of levels repeats its last entry.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationSpec {
    pub pattern: RelaxPattern,
    pub wc: Vec<f64>,
    pub wcc: Vec<f64>,
}

impl RelaxationSpec {
    pub fn new(pattern: RelaxPattern, wc: Vec<f64>, wcc: Vec<f64>) -> Result<Self> {
        let spec = Self { pattern, wc, wcc };
        spec.validate()?;
        Ok(spec)
    }

    pub fn f() -> Self {
        Self {
            pattern: RelaxPattern::F,
            wc: vec![1.0],
            wcc: vec![1.0],
        }
    }

    pub fn fcf(wc: f64) -> Result<Self> {
        Self::new(RelaxPattern::Fcf, vec![wc], vec![1.0])
    }

    pub fn fcfcf(wc: f64, wcc: f64) -> Result<Self> {
        Self::new(RelaxPattern::Fcfcf, vec![wc], vec![wcc])
    }

    pub fn validate(&self) -> Result<()> {
        if self.wc.is_empty() || self.wcc.is_empty() {
            return Err(Error::InvalidArgument("weight lists must be nonempty".into()));
        }
        for (name, list) in [("wc", &self.wc), ("wcc", &self.wcc)] {
            if let Some(w) = list.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "{name} weights must be positive and finite, got {w}"
                )));
            }
        }
        Ok(())
    }

    pub fn wc_at(&self, level: usize) -> f64 {
        self.wc[level.min(self.wc.len() - 1)]
    }

    pub fn wcc_at(&self, level: usize) -> f64 {
        self.wcc[level.min(self.wcc.len() - 1)]
    }
}

/// Exact propagation over every F-interval from its left C-point.
pub fn f_relax(level: &Level, m: usize, u: &mut SpaceTimeState, g: &SpaceTimeState) {
    for j in 1..level.nt {
        if j % m == 0 {
            continue;
        }
        let (prev, row) = u.prev_and_row_mut(j);
        level.propagator.apply_into(prev, row);
        for (r, gi) in row.iter_mut().zip(g.row(j)) {
            *r += gi;
        }
    }
}

/// Weighted Jacobi on the C-points: `u_i += w (Phi u_{i-1} + g_i - u_i)`.
pub fn c_relax_weighted(
    level: &Level,
    m: usize,
    u: &mut SpaceTimeState,
    g: &SpaceTimeState,
    w: f64,
) {
    if w == 0.0 {
        return;
    }
    let mut tmp = vec![0.0; u.nx()];
    for i in (m..level.nt).step_by(m) {
        let (prev, row) = u.prev_and_row_mut(i);
        level.propagator.apply_into(prev, &mut tmp);
        for ((r, t), gi) in row.iter_mut().zip(&tmp).zip(g.row(i)) {
            *r += w * (t + gi - *r);
        }
    }
}

/// Applies the relaxation pattern on one level.
pub fn relax(
    level: &Level,
    level_index: usize,
    m: usize,
    u: &mut SpaceTimeState,
    g: &SpaceTimeState,
    spec: &RelaxationSpec,
) {
    f_relax(level, m, u, g);
    if matches!(spec.pattern, RelaxPattern::Fcf | RelaxPattern::Fcfcf) {
        c_relax_weighted(level, m, u, g, spec.wc_at(level_index));
        f_relax(level, m, u, g);
    }
    if spec.pattern == RelaxPattern::Fcfcf {
        c_relax_weighted(level, m, u, g, spec.wcc_at(level_index));
        f_relax(level, m, u, g);
    }
}

/// Coarse right-hand side `R(g - A u) + A_c R u` and the injected guess.
pub fn restrict_residual(
    fine: &Level,
    coarse: &Level,
    m: usize,
    u: &SpaceTimeState,
    g: &SpaceTimeState,
) -> (SpaceTimeState, SpaceTimeState) {
    let uc = u.inject(m);
    let mut gc = SpaceTimeState::zeros(u.nx(), coarse.nt);
    let mut phic = vec![0.0; u.nx()];
    for k in 0..coarse.nt {
        let row = gc.row_mut(k);
        fine.residual_row(u, g, k * m, row);
        if k == 0 {
            for (r, ui) in row.iter_mut().zip(uc.row(0)) {
                *r += ui;
            }
        } else {
            coarse.propagator.apply_into(uc.row(k - 1), &mut phic);
            for ((r, ui), p) in row.iter_mut().zip(uc.row(k)).zip(&phic) {
                *r += ui - p;
            }
        }
    }
    (gc, uc)
}

/// Adds `v - uc` at the C-points and F-relaxes.
pub fn coarse_correct(
    level: &Level,
    m: usize,
    u: &mut SpaceTimeState,
    g: &SpaceTimeState,
    v: &SpaceTimeState,
    uc: &SpaceTimeState,
) {
    for k in 0..v.nt() {
        let row = u.row_mut(k * m);
        for ((r, vi), ui) in row.iter_mut().zip(v.row(k)).zip(uc.row(k)) {
            *r += vi - ui;
        }
    }
    f_relax(level, m, u, g);
}

/// Forward substitution on one level.
pub fn forward_solve(level: &Level, u: &mut SpaceTimeState, g: &SpaceTimeState) {
    u.row_mut(0).copy_from_slice(g.row(0));
    for j in 1..level.nt {
        let (prev, row) = u.prev_and_row_mut(j);
        level.propagator.apply_into(prev, row);
        for (r, gi) in row.iter_mut().zip(g.row(j)) {
            *r += gi;
        }
    }
}

/// One V-cycle starting at level `l`.
pub fn v_cycle(
    hier: &GridHierarchy,
    l: usize,
    u: &mut SpaceTimeState,
    g: &SpaceTimeState,
    spec: &RelaxationSpec,
) {
    let level = &hier.levels[l];
    if l + 1 == hier.levels.len() {
        forward_solve(level, u, g);
        return;
    }
    relax(level, l, hier.m, u, g, spec);
    let coarse = &hier.levels[l + 1];
    let (gc, uc) = restrict_residual(level, coarse, hier.m, u, g);
    let mut v = uc.clone();
    v_cycle(hier, l + 1, &mut v, &gc, spec);
    coarse_correct(level, hier.m, u, g, &v, &uc);
}

/// Full residual `g - A u` on a level.
pub fn residual(level: &Level, u: &SpaceTimeState, g: &SpaceTimeState) -> SpaceTimeState {
    let mut r = SpaceTimeState::zeros(u.nx(), u.nt());
    for j in 0..u.nt() {
        level.residual_row(u, g, j, r.row_mut(j));
    }
    r
}

pub fn residual_norm(level: &Level, u: &SpaceTimeState, g: &SpaceTimeState) -> f64 {
    let mut buf = vec![0.0; u.nx()];
    let mut sum = 0.0;
    for j in 0..u.nt() {
        level.residual_row(u, g, j, &mut buf);
        sum += buf.iter().map(|v| v * v).sum::<f64>();
    }
    sum.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateMethod {
    /// Mean of the last five consecutive residual ratios.
    ArithmeticLast5,
    /// `(r_k / r_0)^(1/k)`.
    GeometricOverall,
}

impl RateMethod {
    pub fn id(self) -> &'static str {
        match self {
            RateMethod::ArithmeticLast5 => "arithmetic-last-5",
            RateMethod::GeometricOverall => "geometric-overall",
        }
    }

    pub fn for_problem(p: &ProblemSetup) -> Self {
        if p.kind.is_advection() {
            RateMethod::GeometricOverall
        } else {
            RateMethod::ArithmeticLast5
        }
    }

    /// Rate from a residual history `[r_0, r_1, ..., r_k]`.
    pub fn rate(self, history: &[f64]) -> f64 {
        let k = history.len().saturating_sub(1);
        if k == 0 {
            return f64::NAN;
        }
        match self {
            RateMethod::ArithmeticLast5 => {
                let ratios: Vec<f64> = history.windows(2).map(|w| w[1] / w[0]).collect();
                let tail = &ratios[ratios.len().saturating_sub(5)..];
                tail.iter().sum::<f64>() / tail.len() as f64
            }
            RateMethod::GeometricOverall => (history[k] / history[0]).powf(1.0 / k as f64),
        }
    }
}

impl fmt::Display for RateMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for RateMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "arithmetic-last-5" | "arithmetic" => Ok(RateMethod::ArithmeticLast5),
            "geometric-overall" | "geometric" => Ok(RateMethod::GeometricOverall),
            _ => Err(Error::InvalidArgument(format!(
                "unknown rate method `{s}`; expected arithmetic-last-5 or geometric-overall"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    /// `r_0` is the residual of the initial guess.
    pub residual_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub rate: f64,
    pub rate_method: RateMethod,
    pub tolerance: f64,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub hierarchy: HierarchyOptions,
    pub relax: RelaxationSpec,
    pub seed: u64,
    pub tol_scale: f64,
    pub max_iters: usize,
    pub rate_method: RateMethod,
}

impl SolveOptions {
    /// Problem-family defaults: halting scale, iteration cap and rate method.
    pub fn for_problem(p: &ProblemSetup, hierarchy: HierarchyOptions, relax: RelaxationSpec) -> Self {
        Self {
            hierarchy,
            relax,
            seed: 42,
            tol_scale: p.default_tol_scale(),
            max_iters: p.default_max_iters(),
            rate_method: RateMethod::for_problem(p),
        }
    }
}

/// Uniform `[0, 1)` entries with row 0 set to `u0`.
pub fn random_initial_guess(nt: usize, u0: &[f64], seed: u64) -> SpaceTimeState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = SpaceTimeState::zeros(u0.len(), nt);
    for v in u.as_mut_slice() {
        *v = rng.random::<f64>();
    }
    u.row_mut(0).copy_from_slice(u0);
    u
}

/// A problem, its hierarchy and its right-hand side, ready to iterate.
#[derive(Debug, Clone)]
pub struct Solver {
    pub hierarchy: GridHierarchy,
    pub rhs: SpaceTimeState,
    pub options: SolveOptions,
    tolerance: f64,
}

impl Solver {
    pub fn new(p: &ProblemSetup, tableau: &ButcherTableau, options: SolveOptions) -> Result<Self> {
        options.relax.validate()?;
        if !(options.tol_scale > 0.0) {
            return Err(Error::InvalidArgument("tolerance scale must be positive".into()));
        }
        let hierarchy = build_hierarchy(p, tableau, &options.hierarchy)?;
        let step = match &hierarchy.levels[0].propagator {
            Propagator::Step(s) => s.clone(),
            Propagator::Power { base, .. } => base.clone(),
        };
        let rhs = p.assemble_rhs(&step);
        Ok(Self {
            hierarchy,
            rhs,
            tolerance: options.tol_scale / (p.hx * p.dt).sqrt(),
            options,
        })
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn initial_guess(&self) -> SpaceTimeState {
        random_initial_guess(self.rhs.nt(), self.rhs.row(0), self.options.seed)
    }

    pub fn residual_norm(&self, u: &SpaceTimeState) -> f64 {
        residual_norm(&self.hierarchy.levels[0], u, &self.rhs)
    }

    pub fn cycle(&self, u: &mut SpaceTimeState) {
        v_cycle(&self.hierarchy, 0, u, &self.rhs, &self.options.relax);
    }

    /// Iterates from `u` until the halting tolerance or the iteration cap.
    pub fn run(&self, u: &mut SpaceTimeState) -> ConvergenceReport {
        let start = Instant::now();
        let mut history = vec![self.residual_norm(u)];
        let mut converged = history[0] <= self.tolerance;
        while !converged && history.len() <= self.options.max_iters {
            self.cycle(u);
            let r = self.residual_norm(u);
            history.push(r);
            converged = r <= self.tolerance;
            if !r.is_finite() {
                break;
            }
        }
        ConvergenceReport {
            iterations: history.len() - 1,
            converged,
            rate: self.options.rate_method.rate(&history),
            rate_method: self.options.rate_method,
            tolerance: self.tolerance,
            residual_history: history,
            wall_time: start.elapsed().as_secs_f64(),
        }
    }

    pub fn solve(&self) -> (ConvergenceReport, SpaceTimeState) {
        let mut u = self.initial_guess();
        let report = self.run(&mut u);
        (report, u)
    }
}

/// Builds and runs a solve from a seeded random initial guess.
pub fn solve(
    p: &ProblemSetup,
    tableau: &ButcherTableau,
    options: SolveOptions,
) -> Result<ConvergenceReport> {
    Ok(Solver::new(p, tableau, options)?.solve().0)
}

/// Sequential time-stepping: the exact solution of the fine system.
pub fn sequential_solve(p: &ProblemSetup, tableau: &ButcherTableau) -> Result<SpaceTimeState> {
    let step = Arc::new(factor_step(p.spatial_op.clone(), p.dt, tableau)?);
    let g = p.assemble_rhs(&step);
    let level = Level {
        nt: p.nt,
        dt: p.dt,
        propagator: Propagator::Step(step),
    };
    let mut u = SpaceTimeState::zeros(p.unknowns(), p.nt);
    forward_solve(&level, &mut u, &g);
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::build_heat1d;
    use crate::timestepping::Scheme;

    fn be() -> ButcherTableau {
        Scheme::BackwardEuler.tableau()
    }

    #[test]
    fn hierarchy_sizes() {
        let op = Arc::new(SpatialOperator::zero(1));
        let h = build_hierarchy_for(op.clone(), 4097, 1e-3, &be(), &HierarchyOptions::multilevel(2))
            .unwrap();
        let sizes = h.sizes();
        assert_eq!(sizes.first(), Some(&4097));
        assert_eq!(sizes.last(), Some(&3));
        assert_eq!(sizes.len(), 12);
        for w in h.levels.windows(2) {
            assert!((w[1].dt - 2.0 * w[0].dt).abs() < 1e-15);
        }
        let two = build_hierarchy_for(op, 4097, 1e-3, &be(), &HierarchyOptions::two_level(2)).unwrap();
        assert_eq!(two.sizes(), vec![4097, 2049]);
    }

    #[test]
    fn non_divisible_is_rejected_with_suggestion() {
        let op = Arc::new(SpatialOperator::zero(1));
        let err = build_hierarchy_for(op, 10, 0.1, &be(), &HierarchyOptions::multilevel(4)).unwrap_err();
        match err {
            Error::NotDivisible { level, remainder_of, m, suggestion } => {
                assert_eq!((level, remainder_of, m), (0, 9, 4));
                assert_eq!(suggestion, 9);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn weights_repeat_last_entry() {
        let s = RelaxationSpec::new(RelaxPattern::Fcf, vec![1.0, 1.5], vec![1.0]).unwrap();
        assert_eq!(s.wc_at(0), 1.0);
        assert_eq!(s.wc_at(1), 1.5);
        assert_eq!(s.wc_at(7), 1.5);
        assert!(RelaxationSpec::fcf(0.0).is_err());
        assert!(RelaxationSpec::fcfcf(1.0, -1.0).is_err());
    }

    #[test]
    fn rate_methods() {
        let h = [1.0, 0.5, 0.25, 0.125];
        assert!((RateMethod::GeometricOverall.rate(&h) - 0.5).abs() < 1e-15);
        assert!((RateMethod::ArithmeticLast5.rate(&h) - 0.5).abs() < 1e-15);
        let h = [1.0, 0.9, 0.09, 0.009, 0.0009, 0.00009, 0.000009];
        assert!((RateMethod::ArithmeticLast5.rate(&h) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn sequential_solution_has_zero_residual() {
        let p = build_heat1d(17, 33).unwrap();
        let u = sequential_solve(&p, &be()).unwrap();
        let h = build_hierarchy(&p, &be(), &HierarchyOptions::two_level(2)).unwrap();
        let step = match &h.levels[0].propagator {
            Propagator::Step(s) => s.clone(),
            _ => unreachable!(),
        };
        let g = p.assemble_rhs(&step);
        assert!(residual_norm(&h.levels[0], &u, &g) <= 1e-12 * g.norm());
    }

    #[test]
    fn c_relax_zero_weight_is_noop() {
        let p = build_heat1d(7, 9).unwrap();
        let h = build_hierarchy(&p, &be(), &HierarchyOptions::two_level(2)).unwrap();
        let g = SpaceTimeState::zeros(p.unknowns(), p.nt);
        let mut u = random_initial_guess(p.nt, &p.initial_condition, 3);
        let before = u.clone();
        c_relax_weighted(&h.levels[0], 2, &mut u, &g, 0.0);
        assert_eq!(u, before);
    }
}
