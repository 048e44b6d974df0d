//! Resolution of solver settings from flags, an optional `key=value` file
//! and defaults. All problems are collected into one error message.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use wmgrit::{
    HierarchyOptions, ProblemKind, ProblemSetup, RateMethod, RelaxPattern, RelaxationSpec,
    Scheme, SolveOptions,
};

use crate::args::RunArgs;

/// Keys accepted in config files, matching the long flag names.
pub const KEYS: [&str; 13] = [
    "problem",
    "nx",
    "nt",
    "m",
    "levels",
    "relax",
    "wc",
    "wcc",
    "scheme",
    "seed",
    "tol-scale",
    "max-iters",
    "rate-method",
];

/// Invalid settings, one line per problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub Vec<String>);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration:")?;
        for e in &self.0 {
            write!(f, "\n  - {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemKind,
    pub nx: usize,
    pub nt: usize,
    pub m: usize,
    /// 0 means coarsen until the coarsest grid is small.
    pub levels: usize,
    pub relax: RelaxPattern,
    pub wc: Vec<f64>,
    pub wcc: Vec<f64>,
    pub scheme: Scheme,
    pub seed: u64,
    pub tol_scale: Option<f64>,
    pub max_iters: Option<usize>,
    pub rate_method: Option<RateMethod>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: ProblemKind::Heat1d,
            nx: 291,
            nt: 4097,
            m: 2,
            levels: 0,
            relax: RelaxPattern::Fcf,
            wc: vec![1.0],
            wcc: vec![1.0],
            scheme: Scheme::BackwardEuler,
            seed: 42,
            tol_scale: None,
            max_iters: None,
            rate_method: None,
        }
    }
}

/// Parses a `key=value` file; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    let mut errors = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            errors.push(format!("config line {}: expected key=value, got `{line}`", n + 1));
            continue;
        };
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            errors.push(format!("config line {}: unknown key `{key}`", n + 1));
            continue;
        }
        map.insert(key, v.trim().to_string());
    }
    if errors.is_empty() {
        Ok(map)
    } else {
        Err(ConfigError(errors))
    }
}

fn flag_values(args: &RunArgs) -> [(&'static str, &Option<String>); 13] {
    [
        ("problem", &args.problem),
        ("nx", &args.nx),
        ("nt", &args.nt),
        ("m", &args.m),
        ("levels", &args.levels),
        ("relax", &args.relax),
        ("wc", &args.wc),
        ("wcc", &args.wcc),
        ("scheme", &args.scheme),
        ("seed", &args.seed),
        ("tol-scale", &args.tol_scale),
        ("max-iters", &args.max_iters),
        ("rate-method", &args.rate_method),
    ]
}

fn parse_into<T: FromStr>(
    map: &BTreeMap<String, String>,
    key: &str,
    slot: &mut T,
    errors: &mut Vec<String>,
) where
    T::Err: fmt::Display,
{
    if let Some(v) = map.get(key) {
        match v.parse() {
            Ok(x) => *slot = x,
            Err(e) => errors.push(format!("--{key} `{v}`: {e}")),
        }
    }
}

fn parse_weights(
    map: &BTreeMap<String, String>,
    key: &str,
    slot: &mut Vec<f64>,
    errors: &mut Vec<String>,
) {
    let Some(v) = map.get(key) else { return };
    let parsed: Result<Vec<f64>, _> = v.split(',').map(|s| s.trim().parse::<f64>()).collect();
    match parsed {
        Ok(ws) if ws.is_empty() => errors.push(format!("--{key} is empty")),
        Ok(ws) => *slot = ws,
        Err(e) => errors.push(format!("--{key} `{v}`: {e}")),
    }
}

/// Merges flags over the config file over defaults and validates the result.
pub fn resolve(args: &RunArgs) -> Result<RunConfig, ConfigError> {
    let mut map = match &args.config {
        Some(path) => load_file(path)?,
        None => BTreeMap::new(),
    };
    for (key, value) in flag_values(args) {
        if let Some(v) = value {
            map.insert(key.to_string(), v.clone());
        }
    }
    resolve_map(&map)
}

fn load_file(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = fs::read_to_string(path)
        .map_err(|e| ConfigError(vec![format!("cannot read {}: {e}", path.display())]))?;
    parse_config_file(&text)
}

pub fn resolve_map(map: &BTreeMap<String, String>) -> Result<RunConfig, ConfigError> {
    let mut c = RunConfig::default();
    let mut errors = Vec::new();
    let e = &mut errors;
    parse_into(map, "problem", &mut c.problem, e);
    parse_into(map, "nx", &mut c.nx, e);
    parse_into(map, "nt", &mut c.nt, e);
    parse_into(map, "m", &mut c.m, e);
    parse_into(map, "levels", &mut c.levels, e);
    parse_into(map, "relax", &mut c.relax, e);
    parse_weights(map, "wc", &mut c.wc, e);
    parse_weights(map, "wcc", &mut c.wcc, e);
    parse_into(map, "scheme", &mut c.scheme, e);
    parse_into(map, "seed", &mut c.seed, e);
    let mut opt_tol = c.tol_scale.unwrap_or(f64::NAN);
    if map.contains_key("tol-scale") {
        parse_into(map, "tol-scale", &mut opt_tol, e);
        c.tol_scale = Some(opt_tol);
    }
    if map.contains_key("max-iters") {
        let mut v = 0usize;
        parse_into(map, "max-iters", &mut v, e);
        c.max_iters = Some(v);
    }
    if map.contains_key("rate-method") {
        let mut v = RateMethod::ArithmeticLast5;
        parse_into(map, "rate-method", &mut v, e);
        c.rate_method = Some(v);
    }
    c.check(&mut errors);
    if errors.is_empty() {
        Ok(c)
    } else {
        Err(ConfigError(errors))
    }
}

impl RunConfig {
    fn check(&self, errors: &mut Vec<String>) {
        let min_nx = if self.problem.is_advection() { 4 } else { 3 };
        if self.nx < min_nx {
            errors.push(format!("--nx must be at least {min_nx} for {}", self.problem));
        }
        if self.nt < 2 {
            errors.push("--nt must be at least 2".into());
        }
        if self.m < 2 {
            errors.push("--m must be at least 2".into());
        } else if self.nt >= 2 && (self.nt - 1) % self.m != 0 {
            let fix = (1..self.nt).rev().find(|n| (n - 1) % self.m == 0).unwrap_or(1);
            errors.push(format!(
                "--nt {}: N_t - 1 = {} is not divisible by m = {} (try --nt {fix})",
                self.nt,
                self.nt - 1,
                self.m
            ));
        }
        if self.levels == 1 {
            errors.push("--levels must be 0 or at least 2".into());
        }
        for (key, ws) in [("wc", &self.wc), ("wcc", &self.wcc)] {
            if ws.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                errors.push(format!("--{key}: relaxation weights must be positive and finite"));
            }
        }
        if let Some(t) = self.tol_scale {
            if !(t.is_finite() && t > 0.0) {
                errors.push("--tol-scale must be positive".into());
            }
        }
        if self.max_iters == Some(0) {
            errors.push("--max-iters must be positive".into());
        }
    }

    pub fn hierarchy(&self) -> HierarchyOptions {
        HierarchyOptions {
            max_levels: self.levels,
            ..HierarchyOptions::multilevel(self.m)
        }
    }

    pub fn relaxation(&self) -> Result<RelaxationSpec, ConfigError> {
        RelaxationSpec::new(self.relax, self.wc.clone(), self.wcc.clone())
            .map_err(|e| ConfigError(vec![e.to_string()]))
    }

    pub fn build_problem(&self) -> Result<ProblemSetup, ConfigError> {
        self.problem
            .build(self.nx, self.nt)
            .map_err(|e| ConfigError(vec![e.to_string()]))
    }

    pub fn solve_options(&self, p: &ProblemSetup) -> Result<SolveOptions, ConfigError> {
        let mut o = SolveOptions::for_problem(p, self.hierarchy(), self.relaxation()?);
        o.seed = self.seed;
        if let Some(t) = self.tol_scale {
            o.tol_scale = t;
        }
        if let Some(n) = self.max_iters {
            o.max_iters = n;
        }
        if let Some(r) = self.rate_method {
            o.rate_method = r;
        }
        Ok(o)
    }

    /// Weights as written in CSV: comma lists joined by `;`.
    pub fn wc_label(&self) -> String {
        if self.relax == RelaxPattern::F {
            String::new()
        } else {
            join_weights(&self.wc)
        }
    }

    pub fn wcc_label(&self) -> String {
        if self.relax == RelaxPattern::Fcfcf {
            join_weights(&self.wcc)
        } else {
            String::new()
        }
    }
}

pub fn join_weights(ws: &[f64]) -> String {
    ws.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(";")
}

/// Inclusive `min:max:step` range.
pub fn parse_range(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, step] = parts.as_slice() else {
        return Err(format!("range `{text}` must be min:max:step"));
    };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("range `{text}`: {e}"));
    let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) || step <= 0.0 || hi < lo {
        return Err(format!("range `{text}` is empty"));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    // rounding keeps 0.1 steps printable as 1.3 rather than 1.3000000000000003
    Ok((0..=n).map(|i| round12(lo + i as f64 * step)).collect())
}

/// Inclusive `min:max` pair.
pub fn parse_span(text: &str) -> Result<(f64, f64), String> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| format!("range `{text}` must be min:max"))?;
    let num = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("range `{text}`: {e}"));
    Ok((num(a)?, num(b)?))
}

fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_are_inclusive() {
        let r = parse_range("0.1:2.0:0.1").unwrap();
        assert_eq!(r.len(), 20);
        assert_eq!(r[12], 1.3);
        assert_eq!(*r.last().unwrap(), 2.0);
        assert_eq!(parse_range("1.3:1.3:0.1").unwrap(), vec![1.3]);
        assert!(parse_range("2:1:0.1").is_err());
        assert!(parse_range("1:2:0").is_err());
        assert!(parse_range("1:2").is_err());
    }

    #[test]
    fn errors_are_aggregated() {
        let mut map = BTreeMap::new();
        map.insert("wc".to_string(), "0".to_string());
        map.insert("nt".to_string(), "10".to_string());
        map.insert("m".to_string(), "4".to_string());
        map.insert("scheme".to_string(), "rk4".to_string());
        let err = resolve_map(&map).unwrap_err();
        assert_eq!(err.0.len(), 3, "{err}");
        let text = err.to_string();
        assert!(text.contains("divisible") && text.contains("--nt 9"));
        assert!(text.contains("positive"));
    }

    #[test]
    fn file_keys_are_checked() {
        let map = parse_config_file("# comment\nproblem = adv1d-central\nnx=513 # trailing\n").unwrap();
        assert_eq!(map["problem"], "adv1d-central");
        assert_eq!(map["nx"], "513");
        assert!(parse_config_file("colour = blue").is_err());
        assert!(parse_config_file("nx").is_err());
    }
}
