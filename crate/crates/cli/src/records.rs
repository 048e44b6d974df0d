//! CSV record types and their readers and writers.

use std::fs::{self, OpenOptions};
use std::io::{Read, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// One solve, as emitted by `solve` and `sweep`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub problem: String,
    pub nx: usize,
    pub nt: usize,
    pub m: usize,
    pub levels: usize,
    pub pattern: String,
    pub wc: String,
    pub wcc: String,
    pub seed: u64,
    pub iters: usize,
    pub rate: f64,
    pub converged: bool,
    pub wall_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapRecord {
    pub re: f64,
    pub im: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub source: String,
    pub scheme: String,
    pub m: usize,
    pub pattern: String,
    pub wc: f64,
    pub wcc: String,
    pub bound: f64,
    pub method: String,
}

/// One reproduced table cell. No timing column, so reruns are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproduceRecord {
    pub table: String,
    pub row: usize,
    pub column: usize,
    pub problem: String,
    pub nx: usize,
    pub nt: usize,
    pub m: usize,
    pub levels: usize,
    pub pattern: String,
    pub wc: String,
    pub wcc: String,
    pub seed: u64,
    pub iters: usize,
    pub rate: f64,
    pub converged: bool,
    pub expected_iters: String,
    pub expected_rate: String,
    pub iters_ok: bool,
    pub rate_ok: String,
}

pub fn write_csv<T: Serialize, W: Write>(out: W, records: &[T], header: bool) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(header).from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string<T: Serialize>(records: &[T]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, records, true)?;
    Ok(String::from_utf8(buf)?)
}

pub fn read_csv<T: DeserializeOwned, R: Read>(input: R) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| Ok(row?)).collect()
}

/// Writes records to `path`, replacing it, or appending without a header
/// when `append` is set and the file already has content.
pub fn write_file<T: Serialize>(path: &Path, records: &[T], append: bool) -> Result<()> {
    let has_content = append && fs::metadata(path).map(|m| m.len() > 0).unwrap_or(false);
    let file = OpenOptions::new()
        .create(true)
        .write(true)
        .append(has_content)
        .truncate(!has_content)
        .open(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    write_csv(file, records, !has_content)
        .with_context(|| format!("cannot write {}", path.display()))
}
