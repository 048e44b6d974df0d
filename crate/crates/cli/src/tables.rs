//! Stored reference tables (rate and iteration count per cell) that
//! `reproduce` re-runs and diffs against.

use std::fmt;

use anyhow::{anyhow, bail, Context, Result};
use wmgrit::{ProblemKind, RelaxPattern};

const SOURCES: [(&str, &str); 14] = [
    ("1", include_str!("../reference-data/table1.txt")),
    ("2", include_str!("../reference-data/table2.txt")),
    ("3", include_str!("../reference-data/table3.txt")),
    ("4", include_str!("../reference-data/table4.txt")),
    ("S1", include_str!("../reference-data/tableS1.txt")),
    ("S2", include_str!("../reference-data/tableS2.txt")),
    ("S3", include_str!("../reference-data/tableS3.txt")),
    ("S4", include_str!("../reference-data/tableS4.txt")),
    ("S5", include_str!("../reference-data/tableS5.txt")),
    ("S6", include_str!("../reference-data/tableS6.txt")),
    ("S7", include_str!("../reference-data/tableS7.txt")),
    ("S8", include_str!("../reference-data/tableS8.txt")),
    ("S9", include_str!("../reference-data/tableS9.txt")),
    ("S10", include_str!("../reference-data/tableS10.txt")),
];

const ALIASES: [(&str, &str); 2] = [("heat-dt", "S4"), ("adv-dt", "S8")];

/// Iteration count recorded for a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpectedIters {
    Exactly(usize),
    /// Still unconverged at this many iterations.
    Over(usize),
}

impl fmt::Display for ExpectedIters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExpectedIters::Exactly(n) => write!(f, "{n}"),
            ExpectedIters::Over(n) => write!(f, ">{n}"),
        }
    }
}

impl ExpectedIters {
    pub fn matches(self, iters: usize, converged: bool, tol: usize) -> bool {
        match self {
            ExpectedIters::Exactly(e) => converged && iters.abs_diff(e) <= tol,
            ExpectedIters::Over(n) => !converged || iters + tol >= n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedCell {
    pub rate: Option<f64>,
    pub iters: ExpectedIters,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub m: usize,
    pub pattern: RelaxPattern,
    pub wc: Vec<f64>,
    pub wcc: Vec<f64>,
    pub cells: Vec<ExpectedCell>,
}

impl TableRow {
    pub fn label(&self) -> String {
        let list = |ws: &[f64]| ws.iter().map(|w| format!("{w:.1}")).collect::<Vec<_>>().join(",");
        match self.pattern {
            RelaxPattern::F => format!("m={} f", self.m),
            RelaxPattern::Fcf => format!("m={} fcf wc={}", self.m, list(&self.wc)),
            RelaxPattern::Fcfcf => format!("m={} fcfcf ({}, {})", self.m, list(&self.wc), list(&self.wcc)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceTable {
    pub id: String,
    pub title: String,
    pub problem: ProblemKind,
    /// 0 means coarsen until the coarsest grid is small.
    pub levels: usize,
    pub iter_tol: usize,
    pub rate_tol: f64,
    /// `(N_x, N_t)` per column.
    pub columns: Vec<(usize, usize)>,
    pub rows: Vec<TableRow>,
}

pub fn table_ids() -> Vec<&'static str> {
    SOURCES.iter().map(|(id, _)| *id).collect()
}

/// Looks up a table by id (case-insensitive) or alias.
pub fn lookup(id: &str) -> Result<ReferenceTable> {
    let key = ALIASES
        .iter()
        .find(|(a, _)| a.eq_ignore_ascii_case(id))
        .map_or(id, |(_, t)| t);
    let (_, text) = SOURCES
        .iter()
        .find(|(t, _)| t.eq_ignore_ascii_case(key))
        .ok_or_else(|| {
            anyhow!(
                "unknown table `{id}`; expected one of {} or heat-dt, adv-dt",
                table_ids().join(", ")
            )
        })?;
    parse_table(text).with_context(|| format!("reference table {key}"))
}

fn parse_weights(v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|w| Ok(w.parse::<f64>()?)).collect()
}

fn parse_cell(text: &str) -> Result<ExpectedCell> {
    let mut it = text.split_whitespace();
    let (Some(rate), Some(iters), None) = (it.next(), it.next(), it.next()) else {
        bail!("cell `{text}` must be `rate iterations`");
    };
    let rate = if rate == "-" { None } else { Some(rate.parse()?) };
    let iters = match iters.strip_prefix('>') {
        Some(n) => ExpectedIters::Over(n.parse()?),
        None => ExpectedIters::Exactly(iters.parse()?),
    };
    Ok(ExpectedCell { rate, iters })
}

fn parse_row(spec: &str, cells: &[&str]) -> Result<TableRow> {
    let mut row = TableRow {
        m: 0,
        pattern: RelaxPattern::Fcf,
        wc: vec![],
        wcc: vec![],
        cells: cells.iter().map(|c| parse_cell(c)).collect::<Result<_>>()?,
    };
    for tok in spec.split_whitespace() {
        match tok.split_once('=') {
            Some(("m", v)) => row.m = v.parse()?,
            Some(("wc", v)) => row.wc = parse_weights(v)?,
            Some(("wcc", v)) => row.wcc = parse_weights(v)?,
            Some((k, _)) => bail!("unknown row key `{k}`"),
            None => row.pattern = tok.parse()?,
        }
    }
    if row.m < 2 {
        bail!("row `{spec}` needs m >= 2");
    }
    Ok(row)
}

pub fn parse_table(text: &str) -> Result<ReferenceTable> {
    let mut t = ReferenceTable {
        id: String::new(),
        title: String::new(),
        problem: ProblemKind::Heat1d,
        levels: 2,
        iter_tol: 1,
        rate_tol: 0.02,
        columns: vec![],
        rows: vec![],
    };
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
        let parsed: Result<()> = (|| {
            match key {
                "id" => t.id = rest.to_string(),
                "title" => t.title = rest.to_string(),
                "problem" => t.problem = rest.parse()?,
                "levels" => t.levels = rest.parse()?,
                "iter_tol" => t.iter_tol = rest.parse()?,
                "rate_tol" => t.rate_tol = rest.parse()?,
                "columns" => {
                    t.columns = rest
                        .split_whitespace()
                        .map(|c| {
                            let (x, y) = c.split_once('x').ok_or_else(|| anyhow!("bad size `{c}`"))?;
                            Ok((x.parse()?, y.parse()?))
                        })
                        .collect::<Result<_>>()?
                }
                "row" => {
                    let mut parts = rest.split('|');
                    let spec = parts.next().unwrap_or("");
                    let cells: Vec<&str> = parts.collect();
                    t.rows.push(parse_row(spec, &cells)?);
                }
                other => bail!("unknown key `{other}`"),
            }
            Ok(())
        })();
        parsed.with_context(|| format!("line {}", n + 1))?;
    }
    for (i, r) in t.rows.iter().enumerate() {
        if r.cells.len() != t.columns.len() {
            bail!("row {} has {} cells for {} columns", i + 1, r.cells.len(), t.columns.len());
        }
    }
    Ok(t)
}
