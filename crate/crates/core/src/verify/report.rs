use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::paraproduct::median;

/// One family of ratios inside a suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub name: String,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    pub median_ratio: f64,
    pub precondition_held: bool,
    /// The pass rule applied to this case.
    pub criterion: String,
    pub pass: bool,
}

impl CaseReport {
    fn build(name: impl Into<String>, ratios: Vec<f64>, precondition_held: bool, criterion: String, ok: bool) -> Self {
        let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
        let median_ratio = median(&ratios);
        CaseReport {
            name: name.into(),
            ratios,
            max_ratio,
            median_ratio,
            precondition_held,
            criterion,
            pass: precondition_held && ok,
        }
    }

    /// Passes when `max < factor * median`.
    pub fn stability(name: impl Into<String>, ratios: Vec<f64>, precondition_held: bool, factor: f64) -> Self {
        let max = ratios.iter().copied().fold(0.0, f64::max);
        let ok = !ratios.is_empty() && max < factor * median(&ratios);
        Self::build(name, ratios, precondition_held, format!("max < {factor} x median"), ok)
    }

    /// Passes when every ratio is at most `bound`.
    pub fn bounded(name: impl Into<String>, ratios: Vec<f64>, precondition_held: bool, bound: f64) -> Self {
        let ok = !ratios.is_empty() && ratios.iter().all(|r| *r <= bound);
        Self::build(name, ratios, precondition_held, format!("every ratio <= {bound:e}"), ok)
    }

    /// Passes when `max / min <= 1 + spread` over positive values.
    pub fn spread(name: impl Into<String>, values: Vec<f64>, precondition_held: bool, spread: f64) -> Self {
        let max = values.iter().copied().fold(0.0, f64::max);
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let ok = !values.is_empty() && min > 0.0 && max <= (1.0 + spread) * min;
        Self::build(name, values, precondition_held, format!("max / min <= {}", 1.0 + spread), ok)
    }

    pub fn custom(name: impl Into<String>, ratios: Vec<f64>, precondition_held: bool, criterion: &str, ok: bool) -> Self {
        Self::build(name, ratios, precondition_held, criterion.to_string(), ok)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub trials: usize,
    pub grids: Vec<usize>,
    pub seed: u64,
    pub cases: Vec<CaseReport>,
    /// Over all cases.
    pub max_ratio: f64,
    pub median_ratio: f64,
    pub precondition_held: bool,
    pub pass: bool,
    /// Excluded from reproducibility comparisons.
    pub wall_time_s: f64,
}

impl SuiteReport {
    pub(crate) fn assemble(suite: &str, trials: usize, grids: Vec<usize>, seed: u64, cases: Vec<CaseReport>, wall: f64) -> Self {
        let all: Vec<f64> = cases.iter().flat_map(|c| c.ratios.iter().copied()).collect();
        let precondition_held = cases.iter().all(|c| c.precondition_held);
        SuiteReport {
            suite: suite.to_string(),
            trials,
            grids,
            seed,
            max_ratio: all.iter().copied().fold(0.0, f64::max),
            median_ratio: median(&all),
            precondition_held,
            pass: precondition_held && !cases.is_empty() && cases.iter().all(|c| c.pass),
            cases,
            wall_time_s: wall,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub name: String,
    pub file: String,
    pub kind: String,
    pub pass: Option<bool>,
}

/// Writes `reports/<name>.json` under `root` and records it in
/// `reports/index.json`, replacing an earlier entry of the same name.
pub fn write_report<T: Serialize>(root: &Path, name: &str, kind: &str, pass: Option<bool>, report: &T) -> Result<PathBuf> {
    let dir = root.join("reports");
    fs::create_dir_all(&dir)?;
    let file = format!("{name}.json");
    let path = dir.join(&file);
    let mut w = BufWriter::new(File::create(&path)?);
    serde_json::to_writer_pretty(&mut w, report)?;
    writeln!(w)?;
    w.flush()?;

    let index_path = dir.join("index.json");
    let mut index: Vec<IndexEntry> = match fs::read_to_string(&index_path) {
        Ok(text) => serde_json::from_str(&text)?,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
        Err(e) => return Err(e.into()),
    };
    index.retain(|e| e.name != name);
    index.push(IndexEntry {
        name: name.to_string(),
        file,
        kind: kind.to_string(),
        pass,
    });
    index.sort_by(|a, b| a.name.cmp(&b.name));
    let mut w = BufWriter::new(File::create(&index_path)?);
    serde_json::to_writer_pretty(&mut w, &index)?;
    writeln!(w)?;
    w.flush()?;
    Ok(path)
}
