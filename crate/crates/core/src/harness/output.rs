//! Result files: precision-curve CSV, JSON summary, timing JSON, raw
//! per-replicate CSV, and the subsample position table.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::experiment::{ExperimentResult, RawRecord, Summary, Timing};
use super::subsample::SubsampleTable;
use crate::error::{Error, Result};
use crate::metrics::average_precision_of_hits;

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// `position,<scheme>...,chance` with one row per list position.
pub fn curve_csv(summary: &Summary) -> String {
    let mut out = String::from("position");
    for s in &summary.schemes {
        out.push(',');
        out.push_str(s.scheme.as_str());
    }
    out.push_str(",chance\n");
    for p in 0..summary.num_ambiguous {
        write!(out, "{}", p + 1).unwrap();
        for s in &summary.schemes {
            write!(out, ",{}", s.curve[p]).unwrap();
        }
        writeln!(out, ",{}", summary.chance).unwrap();
    }
    out
}

pub fn summary_json(summary: &Summary) -> String {
    let mut text = serde_json::to_string_pretty(summary).expect("summary serializes");
    text.push('\n');
    text
}

pub fn parse_summary(text: &str) -> std::result::Result<Summary, serde_json::Error> {
    serde_json::from_str(text)
}

pub fn read_summary(path: &Path) -> Result<Summary> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_summary(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn timing_json(timing: &Timing) -> String {
    let mut text = serde_json::to_string_pretty(timing).expect("timing serializes");
    text.push('\n');
    text
}

/// `replicate,scheme,average_precision,hits`, hits written as a 0/1 string
/// in list order.
pub fn raw_csv(records: &[RawRecord], num_block1: usize) -> String {
    let mut out = String::from("replicate,scheme,average_precision,hits\n");
    for r in records {
        let hits: String = r.hits.iter().map(|&h| if h { '1' } else { '0' }).collect();
        let ap: f64 = average_precision_of_hits(&r.hits, num_block1);
        writeln!(out, "{},{},{},{}", r.replicate, r.scheme, ap, hits).unwrap();
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputPaths {
    pub curve: PathBuf,
    pub summary: PathBuf,
    pub timing: PathBuf,
    pub raw: Option<PathBuf>,
}

impl OutputPaths {
    pub fn new(directory: &Path, prefix: &str) -> Self {
        OutputPaths {
            curve: directory.join(format!("{prefix}_curve.csv")),
            summary: directory.join(format!("{prefix}_summary.json")),
            timing: directory.join(format!("{prefix}_timing.json")),
            raw: Some(directory.join(format!("{prefix}_raw.csv"))),
        }
    }
}

/// Writes every file of `result`; the raw log only if it was recorded.
pub fn emit_results(result: &ExperimentResult, paths: &OutputPaths) -> Result<()> {
    write(&paths.curve, &curve_csv(&result.summary))?;
    write(&paths.summary, &summary_json(&result.summary))?;
    write(&paths.timing, &timing_json(&result.timing))?;
    if let (Some(raw), Some(path)) = (&result.raw, &paths.raw) {
        write(path, &raw_csv(raw, result.summary.num_block1))?;
    }
    Ok(())
}

/// `vertex,class,selections,mean_position`; never-selected vertices get `NA`.
pub fn subsample_csv(table: &SubsampleTable) -> String {
    let mut out = String::from("vertex,class,selections,mean_position\n");
    for r in &table.rows {
        match r.mean_position {
            Some(p) => writeln!(out, "{},{},{},{}", r.vertex, r.class, r.selections, p).unwrap(),
            None => writeln!(out, "{},{},{},NA", r.vertex, r.class, r.selections).unwrap(),
        }
    }
    out
}

pub fn write_subsample(table: &SubsampleTable, path: &Path) -> Result<()> {
    write(path, &subsample_csv(table))
}
