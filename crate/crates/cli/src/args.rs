use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "wmgrit",
    version,
    about = "Parallel-in-time MGRIT with weighted C-relaxation: solves, sweeps, bounds and table reproduction"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output rendering on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Pretty)]
    pub format: Format,
    /// Write CSV records to this file (`solve` appends).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Exit with status 2 if any run fails to converge.
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Pretty,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one MGRIT solve.
    Solve(RunArgs),
    /// Run a solve for every weight in a grid and report the fastest.
    Sweep(SweepArgs),
    /// Evaluate the two-level convergence bound.
    Bound(BoundArgs),
    /// Scan the FCF bound over a rectangle of the complex plane.
    Heatmap(HeatmapArgs),
    /// Re-run a stored reference table and diff against its values.
    Reproduce(ReproduceArgs),
}

/// Solver settings. Every flag can also be given in a `key=value` config
/// file under the same name; flags win over the file.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Flat `key=value` file with defaults for the flags below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// heat1d | adv1d-central | adv1d-upwind
    #[arg(long)]
    pub problem: Option<String>,
    /// Spatial grid points.
    #[arg(long)]
    pub nx: Option<String>,
    /// Time points on the finest grid.
    #[arg(long)]
    pub nt: Option<String>,
    /// Coarsening factor.
    #[arg(long)]
    pub m: Option<String>,
    /// Number of levels; 0 coarsens until the coarsest grid has at most 4 points.
    #[arg(long)]
    pub levels: Option<String>,
    /// f | fcf | fcfcf
    #[arg(long)]
    pub relax: Option<String>,
    /// C-relaxation weights, comma separated, one per level (last repeats).
    #[arg(long)]
    pub wc: Option<String>,
    /// Second C-relaxation weights for fcfcf, comma separated.
    #[arg(long)]
    pub wcc: Option<String>,
    /// backward-euler | sdirk22 | sdirk23 | sdirk33
    #[arg(long)]
    pub scheme: Option<String>,
    /// Seed for the random initial guess.
    #[arg(long, env = "MGRIT_SEED")]
    pub seed: Option<String>,
    /// Residual tolerance is tol-scale / sqrt(h_x dt).
    #[arg(long)]
    pub tol_scale: Option<String>,
    #[arg(long)]
    pub max_iters: Option<String>,
    /// arithmetic-last-5 | geometric-overall
    #[arg(long)]
    pub rate_method: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Weight range `min:max:step` for w_C.
    #[arg(long)]
    pub wc_range: Option<String>,
    /// Weight range `min:max:step` for w_CC (fcfcf only).
    #[arg(long)]
    pub wcc_range: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    #[arg(long, default_value = "backward-euler")]
    pub scheme: String,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value = "fcf")]
    pub relax: String,
    #[arg(long, default_value_t = 1.0)]
    pub wc: f64,
    #[arg(long, default_value_t = 1.0)]
    pub wcc: f64,
    /// Evaluate at every w_C in `min:max:step` instead of `--wc`.
    #[arg(long)]
    pub wc_range: Option<String>,
    /// Fine eigenvalue `re[,im]`.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// Coarse eigenvalue `re[,im]`.
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<String>,
    /// Take the eigenvalues from this problem's spatial spectrum.
    #[arg(long)]
    pub problem: Option<String>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub nt: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct HeatmapArgs {
    #[arg(long, default_value = "sdirk23")]
    pub scheme: String,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 1.0)]
    pub wc: f64,
    /// Real-axis range `min:max` of dt * kappa.
    #[arg(long, default_value = "-10:0", allow_hyphen_values = true)]
    pub re: String,
    /// Imaginary-axis range `min:max` of dt * kappa.
    #[arg(long, default_value = "0:10", allow_hyphen_values = true)]
    pub im: String,
    /// Points per axis.
    #[arg(long, default_value_t = 101)]
    pub resolution: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    /// 1-4, S1-S10, or heat-dt / adv-dt.
    #[arg(long)]
    pub table: String,
    /// Skip cells with more than this many space-time points.
    #[arg(long, default_value_t = 10_000_000)]
    pub max_size: usize,
    #[arg(long, env = "MGRIT_SEED", default_value_t = 42)]
    pub seed: u64,
}
