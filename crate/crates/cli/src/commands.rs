//! Subcommand implementations. Each returns the records it produced and a
//! human-readable rendering; `run` decides where they go.

use std::fmt::Write as _;
use std::io::{self, Write};

use anyhow::{anyhow, bail, Result};
use num_complex::Complex64;
use serde::Serialize;
use wmgrit::theory::{heatmap_scan, pattern_bound, GridRange};
use wmgrit::{
    problem_bound, ConvergenceReport, ProblemKind, ProblemSetup, RelaxPattern, RelaxationSpec,
    Scheme, SolveOptions, Solver,
};

use crate::args::{BoundArgs, Cli, Command, Format, HeatmapArgs, ReproduceArgs, RunArgs, SweepArgs};
use crate::config::{parse_range, parse_span, resolve, ConfigError, RunConfig};
use crate::records::{
    to_csv_string, write_file, BoundRecord, HeatmapRecord, ReproduceRecord, SolveRecord,
};
use crate::tables::{lookup, ReferenceTable};

/// Iteration cap for reproduced cells; stored tables mark longer runs `>100`.
pub const REPRODUCE_MAX_ITERS: usize = 100;

/// Result of a subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outcome {
    /// False if any solve stopped at its iteration cap.
    pub all_converged: bool,
}

struct Output<T> {
    records: Vec<T>,
    pretty: String,
    append: bool,
    all_converged: bool,
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Solve(a) => emit(cli, solve_cmd(a)?),
        Command::Sweep(a) => emit(cli, sweep_cmd(a)?),
        Command::Bound(a) => emit(cli, bound_cmd(a)?),
        Command::Heatmap(a) => emit(cli, heatmap_cmd(a)?),
        Command::Reproduce(a) => emit(cli, reproduce_cmd(a)?),
    }
}

fn emit<T: Serialize>(cli: &Cli, out: Output<T>) -> Result<Outcome> {
    if let Some(path) = &cli.out {
        write_file(path, &out.records, out.append)?;
    }
    let mut stdout = io::stdout().lock();
    match cli.format {
        Format::Pretty => stdout.write_all(out.pretty.as_bytes())?,
        Format::Csv if cli.out.is_none() => stdout.write_all(to_csv_string(&out.records)?.as_bytes())?,
        Format::Csv => {}
    }
    Ok(Outcome {
        all_converged: out.all_converged,
    })
}

/// Problem, options and solver for a resolved configuration.
pub fn prepare(c: &RunConfig) -> Result<(ProblemSetup, Solver), ConfigError> {
    let p = c.build_problem()?;
    let opts: SolveOptions = c.solve_options(&p)?;
    let solver = Solver::new(&p, &c.scheme.tableau(), opts).map_err(|e| ConfigError(vec![e.to_string()]))?;
    Ok((p, solver))
}

pub fn record(c: &RunConfig, solver: &Solver, r: &ConvergenceReport) -> SolveRecord {
    SolveRecord {
        problem: c.problem.id().to_string(),
        nx: c.nx,
        nt: c.nt,
        m: c.m,
        levels: solver.hierarchy.num_levels(),
        pattern: c.relax.id().to_string(),
        wc: c.wc_label(),
        wcc: c.wcc_label(),
        seed: c.seed,
        iters: r.iterations,
        rate: r.rate,
        converged: r.converged,
        wall_s: r.wall_time,
    }
}

/// Runs one configuration.
pub fn solve_config(c: &RunConfig) -> Result<SolveRecord, ConfigError> {
    let (_, solver) = prepare(c)?;
    let (report, _) = solver.solve();
    Ok(record(c, &solver, &report))
}

fn describe(c: &RunConfig) -> String {
    let weights = match c.relax {
        RelaxPattern::F => String::new(),
        RelaxPattern::Fcf => format!(" wc={}", c.wc_label()),
        RelaxPattern::Fcfcf => format!(" wc={} wcc={}", c.wc_label(), c.wcc_label()),
    };
    format!("{} {}x{} {} m={} {}{weights}", c.problem, c.nx, c.nt, c.scheme, c.m, c.relax)
}

fn solve_cmd(a: &RunArgs) -> Result<Output<SolveRecord>> {
    let c = resolve(a)?;
    let rec = solve_config(&c)?;
    let status = if rec.converged { "converged" } else { "NOT converged" };
    let pretty = format!(
        "{} ({} levels), seed {}\n  iterations {}, rate {:.3}, {status}, {:.2} s\n",
        describe(&c),
        rec.levels,
        c.seed,
        rec.iters,
        rec.rate,
        rec.wall_s
    );
    Ok(Output {
        all_converged: rec.converged,
        records: vec![rec],
        pretty,
        append: true,
    })
}

/// Index of the lowest rate; ties go to the smaller `(wc, wcc)`.
pub fn sweep_argmin(rows: &[SolveRecord]) -> Option<usize> {
    let key = |r: &SolveRecord| -> (f64, Vec<f64>, Vec<f64>) {
        let ws = |s: &str| s.split(';').filter_map(|w| w.parse().ok()).collect();
        (r.rate, ws(&r.wc), ws(&r.wcc))
    };
    let cmp_vec = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(a.len().cmp(&b.len()))
    };
    (0..rows.len()).min_by(|&i, &j| {
        let (ri, wi, vi) = key(&rows[i]);
        let (rj, wj, vj) = key(&rows[j]);
        ri.total_cmp(&rj)
            .then_with(|| cmp_vec(&wi, &wj))
            .then_with(|| cmp_vec(&vi, &vj))
    })
}

fn sweep_cmd(a: &SweepArgs) -> Result<Output<SolveRecord>> {
    let base = resolve(&a.run)?;
    let mut errors = Vec::new();
    let mut grid = |range: &Option<String>, fixed: &[f64]| -> Vec<Vec<f64>> {
        match range {
            None => vec![fixed.to_vec()],
            Some(r) => match parse_range(r) {
                Ok(ws) => ws.into_iter().map(|w| vec![w]).collect(),
                Err(e) => {
                    errors.push(e);
                    vec![]
                }
            },
        }
    };
    let wcs = grid(&a.wc_range, &base.wc);
    let wccs = if base.relax == RelaxPattern::Fcfcf {
        grid(&a.wcc_range, &base.wcc)
    } else {
        vec![base.wcc.clone()]
    };
    if base.relax == RelaxPattern::F && a.wc_range.is_some() {
        errors.push("--wc-range needs --relax fcf or fcfcf".into());
    }
    if !errors.is_empty() {
        return Err(ConfigError(errors).into());
    }
    let mut records = Vec::new();
    for wc in &wcs {
        for wcc in &wccs {
            let c = RunConfig {
                wc: wc.clone(),
                wcc: wcc.clone(),
                ..base.clone()
            };
            records.push(solve_config(&c)?);
        }
    }
    let mut pretty = format!("sweep: {} ({} runs), seed {}\n", describe(&base), records.len(), base.seed);
    writeln!(pretty, "  {:>12} {:>12} {:>6} {:>7} {:>9}", "wc", "wcc", "iters", "rate", "converged")?;
    for r in &records {
        writeln!(pretty, "  {:>12} {:>12} {:>6} {:>7.3} {:>9}", r.wc, r.wcc, r.iters, r.rate, r.converged)?;
    }
    if let Some(i) = sweep_argmin(&records) {
        let r = &records[i];
        let wcc = if r.wcc.is_empty() { String::new() } else { format!(", wcc={}", r.wcc) };
        writeln!(pretty, "best: wc={}{wcc} rate {:.3} ({} iterations)", r.wc, r.rate, r.iters)?;
    }
    Ok(Output {
        all_converged: records.iter().all(|r| r.converged),
        records,
        pretty,
        append: false,
    })
}

fn parse_complex(text: &str) -> Result<Complex64> {
    let mut parts = text.split(',').map(|s| s.trim().parse::<f64>());
    let re = parts.next().ok_or_else(|| anyhow!("empty complex number"))??;
    let im = parts.next().transpose()?.unwrap_or(0.0);
    if parts.next().is_some() {
        bail!("complex number `{text}` must be re or re,im");
    }
    Ok(Complex64::new(re, im))
}

fn bound_cmd(a: &BoundArgs) -> Result<Output<BoundRecord>> {
    let mut errors = Vec::new();
    let scheme: Option<Scheme> = a.scheme.parse().map_err(|e| errors.push(format!("--scheme: {e}"))).ok();
    let pattern: Option<RelaxPattern> = a.relax.parse().map_err(|e| errors.push(format!("--relax: {e}"))).ok();
    if a.m < 2 {
        errors.push("--m must be at least 2".into());
    }
    let weights = match &a.wc_range {
        Some(r) => parse_range(r).map_err(|e| errors.push(e)).unwrap_or_default(),
        None => vec![a.wc],
    };
    if weights.iter().chain([&a.wcc]).any(|w| !(w.is_finite() && *w > 0.0)) {
        errors.push("relaxation weights must be positive and finite".into());
    }
    let explicit = match (&a.lambda, &a.mu) {
        (Some(l), Some(mu)) => match (parse_complex(l), parse_complex(mu)) {
            (Ok(l), Ok(mu)) => Some((l, mu)),
            (Err(e), _) | (_, Err(e)) => {
                errors.push(format!("--lambda/--mu: {e}"));
                None
            }
        },
        (None, None) => None,
        _ => {
            errors.push("--lambda and --mu must be given together".into());
            None
        }
    };
    let problem = match (&explicit, &a.problem) {
        (Some(_), Some(_)) => {
            errors.push("give either --lambda/--mu or --problem, not both".into());
            None
        }
        (None, None) if errors.is_empty() => {
            errors.push("give --lambda and --mu, or --problem with --nx and --nt".into());
            None
        }
        (None, Some(id)) => match (id.parse::<ProblemKind>(), a.nx, a.nt) {
            (Ok(k), Some(nx), Some(nt)) => match k.build(nx, nt) {
                Ok(p) => Some(p),
                Err(e) => {
                    errors.push(e.to_string());
                    None
                }
            },
            (Err(e), _, _) => {
                errors.push(format!("--problem: {e}"));
                None
            }
            _ => {
                errors.push("--problem needs --nx and --nt".into());
                None
            }
        },
        _ => None,
    };
    if !errors.is_empty() {
        return Err(ConfigError(errors).into());
    }
    let (scheme, pattern) = (scheme.unwrap(), pattern.unwrap());
    let tableau = scheme.tableau();
    let method = match pattern {
        RelaxPattern::Fcfcf => "numeric-scan",
        _ => "exact-closed-form",
    };
    let wcc = if pattern == RelaxPattern::Fcfcf { a.wcc.to_string() } else { String::new() };
    let source = match (&explicit, &problem) {
        (Some((l, mu)), _) => format!("lambda={l} mu={mu}"),
        (_, Some(p)) => p.label(),
        _ => unreachable!(),
    };
    let mut records = Vec::new();
    for &wc in &weights {
        let value = match (&explicit, &problem) {
            (Some((l, mu)), _) => pattern_bound(*l, *mu, a.m, pattern, wc, a.wcc)?,
            (_, Some(p)) => {
                let spec = match pattern {
                    RelaxPattern::F => RelaxationSpec::f(),
                    RelaxPattern::Fcf => RelaxationSpec::fcf(wc)?,
                    RelaxPattern::Fcfcf => RelaxationSpec::fcfcf(wc, a.wcc)?,
                };
                problem_bound(p, &tableau, p.dt, a.m, &spec)?
            }
            _ => unreachable!(),
        };
        records.push(BoundRecord {
            source: source.clone(),
            scheme: scheme.name().to_string(),
            m: a.m,
            pattern: pattern.id().to_string(),
            wc,
            wcc: wcc.clone(),
            bound: value,
            method: method.to_string(),
        });
    }
    let mut pretty = format!("bound: {source}, {scheme}, m={}, {pattern} ({method})\n", a.m);
    for r in &records {
        let second = if r.wcc.is_empty() { String::new() } else { format!(" wcc={}", r.wcc) };
        writeln!(pretty, "  wc={}{second}: {:.6}", r.wc, r.bound)?;
    }
    if records.len() > 1 {
        let best = records.iter().min_by(|x, y| x.bound.total_cmp(&y.bound)).unwrap();
        writeln!(pretty, "minimum at wc={}: {:.6}", best.wc, best.bound)?;
    }
    Ok(Output {
        records,
        pretty,
        append: false,
        all_converged: true,
    })
}

fn heatmap_cmd(a: &HeatmapArgs) -> Result<Output<HeatmapRecord>> {
    let mut errors = Vec::new();
    let scheme: Option<Scheme> = a.scheme.parse().map_err(|e| errors.push(format!("--scheme: {e}"))).ok();
    let mut span = |flag: &str, text: &str| {
        parse_span(text)
            .and_then(|(lo, hi)| GridRange::new(lo, hi, a.resolution).map_err(|e| e.to_string()))
            .map_err(|e| errors.push(format!("--{flag}: {e}")))
            .ok()
    };
    let (re, im) = (span("re", &a.re), span("im", &a.im));
    if a.m < 2 {
        errors.push("--m must be at least 2".into());
    }
    if !(a.wc.is_finite() && a.wc > 0.0) {
        errors.push("--wc must be positive and finite".into());
    }
    if !errors.is_empty() {
        return Err(ConfigError(errors).into());
    }
    let (scheme, re, im) = (scheme.unwrap(), re.unwrap(), im.unwrap());
    let grid = heatmap_scan(&scheme.tableau(), a.m, a.wc, re, im);
    let mut records = Vec::with_capacity(grid.re.len() * grid.im.len());
    for (i, &y) in grid.im.iter().enumerate() {
        for (j, &x) in grid.re.iter().enumerate() {
            records.push(HeatmapRecord {
                re: x,
                im: y,
                bound: grid.values[i][j],
            });
        }
    }
    let valid: Vec<f64> = grid.valid_cells().collect();
    let over = valid.iter().filter(|v| **v > 1.0).count();
    let max = valid.iter().copied().fold(f64::NAN, f64::max);
    let min = valid.iter().copied().fold(f64::NAN, f64::min);
    let pretty = format!(
        "heatmap: {scheme}, m={}, wc={}, re {}:{}, im {}:{}, {}x{} points\n  valid cells {} of {}, bound > 1 in {over}, min {min:.4}, max {max:.4}\n",
        a.m,
        a.wc,
        re.min,
        re.max,
        im.min,
        im.max,
        a.resolution,
        a.resolution,
        valid.len(),
        records.len()
    );
    Ok(Output {
        records,
        pretty,
        append: false,
        all_converged: true,
    })
}

/// Runs every cell of a stored table up to `max_size` space-time points.
pub fn reproduce_table(t: &ReferenceTable, seed: u64, max_size: usize) -> Result<Vec<Option<ReproduceRecord>>> {
    let mut out = Vec::new();
    for (ri, row) in t.rows.iter().enumerate() {
        for (ci, (&(nx, nt), cell)) in t.columns.iter().zip(&row.cells).enumerate() {
            if nx * nt > max_size {
                out.push(None);
                continue;
            }
            let c = RunConfig {
                problem: t.problem,
                nx,
                nt,
                m: row.m,
                levels: t.levels,
                relax: row.pattern,
                wc: row.wc.clone(),
                wcc: if row.wcc.is_empty() { vec![1.0] } else { row.wcc.clone() },
                seed,
                max_iters: Some(REPRODUCE_MAX_ITERS),
                ..RunConfig::default()
            };
            let rec = solve_config(&c)?;
            let rate_ok = cell.rate.map(|e| (rec.rate - e).abs() <= t.rate_tol);
            out.push(Some(ReproduceRecord {
                table: t.id.clone(),
                row: ri + 1,
                column: ci + 1,
                problem: rec.problem,
                nx,
                nt,
                m: row.m,
                levels: rec.levels,
                pattern: rec.pattern,
                wc: rec.wc,
                wcc: rec.wcc,
                seed,
                iters: rec.iters,
                rate: rec.rate,
                converged: rec.converged,
                expected_iters: cell.iters.to_string(),
                expected_rate: cell.rate.map_or(String::new(), |r| format!("{r:.3}")),
                iters_ok: cell.iters.matches(rec.iters, rec.converged, t.iter_tol),
                rate_ok: rate_ok.map_or(String::new(), |b| b.to_string()),
            }));
        }
    }
    Ok(out)
}

fn reproduce_cmd(a: &ReproduceArgs) -> Result<Output<ReproduceRecord>> {
    let t = lookup(&a.table).map_err(|e| ConfigError(vec![e.to_string()]))?;
    let cells = reproduce_table(&t, a.seed, a.max_size)?;
    let width = t.rows.iter().map(|r| r.label().len()).max().unwrap_or(0).max(12);
    let mut pretty = format!("Table {}: {}\n{} (seed {})\n", t.id, t.title, t.problem, a.seed);
    let _ = write!(pretty, "{:width$}", "");
    for (nx, nt) in &t.columns {
        let _ = write!(pretty, " | {:>16}", format!("{nx} x {nt}"));
    }
    pretty.push('\n');
    let ncol = t.columns.len();
    let (mut ran, mut iter_hits, mut rate_hits, mut rate_total) = (0, 0, 0, 0);
    for (ri, row) in t.rows.iter().enumerate() {
        let mut measured = format!("{:width$}", row.label());
        let mut reference = format!("{:>width$}", "reference");
        for (ci, cell) in row.cells.iter().enumerate() {
            let reference_text = format!(
                "{} ({})",
                cell.rate.map_or("-".to_string(), |r| format!("{r:.3}")),
                cell.iters
            );
            let _ = write!(reference, " | {reference_text:>16}");
            let text = match &cells[ri * ncol + ci] {
                None => "skipped".to_string(),
                Some(r) => {
                    ran += 1;
                    iter_hits += usize::from(r.iters_ok);
                    if !r.rate_ok.is_empty() {
                        rate_total += 1;
                        rate_hits += usize::from(r.rate_ok == "true");
                    }
                    let iters = if r.converged { r.iters.to_string() } else { format!(">{}", r.iters) };
                    let flag = if r.iters_ok { ' ' } else { '*' };
                    format!("{:.3} ({iters}){flag}", r.rate)
                }
            };
            let _ = write!(measured, " | {text:>16}");
        }
        let _ = writeln!(pretty, "{measured}\n{reference}");
    }
    let skipped = cells.len() - ran;
    let _ = writeln!(
        pretty,
        "iterations within +-{}: {iter_hits}/{ran}; rates within +-{}: {rate_hits}/{rate_total}; skipped (over --max-size {}): {skipped}",
        t.iter_tol, t.rate_tol, a.max_size
    );
    if iter_hits < ran {
        pretty.push_str("* iteration count outside tolerance\n");
    }
    let records: Vec<ReproduceRecord> = cells.into_iter().flatten().collect();
    Ok(Output {
        all_converged: records.iter().all(|r| r.converged),
        records,
        pretty,
        append: false,
    })
}
