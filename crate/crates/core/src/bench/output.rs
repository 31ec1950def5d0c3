//! CSV and curve-file output for experiment rows.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::stats::{mean, sample_sd};
use super::{Method, RunRecord};
use crate::error::BenchError;

/// One aggregate row per (config, method, labeled count).
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub config_id: String,
    pub method: Method,
    pub n_labeled: usize,
    pub count: usize,
    pub mean_error: f64,
    pub sd_error: f64,
    pub mean_runtime_ms: f64,
}

fn sorted(records: &[RunRecord]) -> Vec<&RunRecord> {
    let mut rows: Vec<&RunRecord> = records.iter().collect();
    rows.sort_by(|a, b| {
        (&a.config_id, a.method, a.n_labeled, a.repetition).cmp(&(&b.config_id, b.method, b.n_labeled, b.repetition))
    });
    rows
}

pub fn aggregate(records: &[RunRecord]) -> Vec<AggregateRow> {
    let mut groups: BTreeMap<(String, Method, usize), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.config_id.clone(), r.method, r.n_labeled))
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|((config_id, method, n_labeled), rows)| {
            let errors: Vec<f64> = rows.iter().map(|r| r.error_rate).collect();
            let runtimes: Vec<f64> = rows.iter().map(|r| r.runtime_ms).collect();
            AggregateRow {
                config_id,
                method,
                n_labeled,
                count: rows.len(),
                mean_error: mean(&errors),
                sd_error: sample_sd(&errors),
                mean_runtime_ms: mean(&runtimes),
            }
        })
        .collect()
}

pub fn results_csv(records: &[RunRecord]) -> String {
    let mut out = String::from("method,config_id,n_labeled,repetition,error_rate,runtime_ms\n");
    for r in sorted(records) {
        let _ = writeln!(
            out,
            "{},{},{},{},{:?},{:?}",
            r.method, r.config_id, r.n_labeled, r.repetition, r.error_rate, r.runtime_ms
        );
    }
    out
}

pub fn aggregate_csv(rows: &[AggregateRow]) -> String {
    let mut out = String::from("method,config_id,n_labeled,count,mean_error,sd_error,mean_runtime_ms\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{:?},{:?},{:?}",
            r.method, r.config_id, r.n_labeled, r.count, r.mean_error, r.sd_error, r.mean_runtime_ms
        );
    }
    out
}

pub fn timings_csv(records: &[RunRecord]) -> String {
    let mut out = String::from("method,config_id,n_labeled,repetition,fit_ms,classify_ms\n");
    for r in sorted(records) {
        let _ = writeln!(
            out,
            "{},{},{},{},{:?},{:?}",
            r.method, r.config_id, r.n_labeled, r.repetition, r.fit_ms, r.runtime_ms
        );
    }
    out
}

/// Whitespace-separated columns for gnuplot: `n_labeled` followed by the
/// mean and standard deviation of each method.
pub fn curve_dat(rows: &[AggregateRow], config_id: &str) -> String {
    let rows: Vec<&AggregateRow> = rows.iter().filter(|r| r.config_id == config_id).collect();
    let mut methods: Vec<Method> = rows.iter().map(|r| r.method).collect();
    methods.sort();
    methods.dedup();
    let mut grid: Vec<usize> = rows.iter().map(|r| r.n_labeled).collect();
    grid.sort_unstable();
    grid.dedup();
    let mut out = String::from("# n_labeled");
    for m in &methods {
        let _ = write!(out, " {m}_mean {m}_sd");
    }
    out.push('\n');
    for n_l in grid {
        let _ = write!(out, "{n_l}");
        for m in &methods {
            match rows.iter().find(|r| r.method == *m && r.n_labeled == n_l) {
                Some(r) => {
                    let _ = write!(out, " {:?} {:?}", r.mean_error, r.sd_error);
                }
                None => out.push_str(" NaN NaN"),
            }
        }
        out.push('\n');
    }
    out
}

fn write(path: PathBuf, content: &str) -> Result<PathBuf, BenchError> {
    fs::write(&path, content).map_err(|source| BenchError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// Writes `results.csv`, `aggregate.csv`, one `curve_<config_id>.dat` per
/// configuration and, when `timings` is set, `timings.csv`. Returns the
/// written paths.
pub fn emit_results(records: &[RunRecord], dir: &Path, timings: bool) -> Result<Vec<PathBuf>, BenchError> {
    fs::create_dir_all(dir).map_err(|source| BenchError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let rows = aggregate(records);
    let mut written = vec![
        write(dir.join("results.csv"), &results_csv(records))?,
        write(dir.join("aggregate.csv"), &aggregate_csv(&rows))?,
    ];
    let mut ids: Vec<&str> = rows.iter().map(|r| r.config_id.as_str()).collect();
    ids.dedup();
    for id in ids {
        written.push(write(dir.join(format!("curve_{id}.dat")), &curve_dat(&rows, id))?);
    }
    if timings {
        written.push(write(dir.join("timings.csv"), &timings_csv(records))?);
    }
    Ok(written)
}
