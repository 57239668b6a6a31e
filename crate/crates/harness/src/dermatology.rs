//! UCI dermatology data: 366 records of 34 clinical and histopathological
//! attributes plus a diagnosis in `1..=6`. Age (attribute 34) is missing,
//! written `?`, on a few records; those records are dropped. The remaining
//! attributes are centred and scaled to unit sample standard deviation.
//!
//! The file is never fetched implicitly. Pass a path, or set
//! `KGROUPS_DERMATOLOGY`. If `<file>.sha256` exists next to the data its
//! digest must match.

use std::fs;
use std::path::{Path, PathBuf};

use kgroups::solver::FitResult;
use kgroups::{fit, Alpha, DataMatrix, IndexReport, LabeledSample};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{HarnessError, Result};
use crate::experiment::Algorithm;

pub const ENV_PATH: &str = "KGROUPS_DERMATOLOGY";
pub const SOURCE_URL: &str =
    "https://archive.ics.uci.edu/ml/machine-learning-databases/dermatology/dermatology.data";
pub const RECORDS: usize = 366;
pub const ATTRIBUTES: usize = 34;
pub const CLASSES: usize = 6;
const AGE_COLUMN: usize = 33;

#[derive(Debug, Clone)]
pub struct Dermatology {
    /// Standardized attributes; truth is the diagnosis minus one.
    pub sample: LabeledSample,
    /// One-based line numbers of the records dropped for a missing age.
    pub dropped_lines: Vec<usize>,
    pub sha256: String,
}

/// Path from the environment, if set.
pub fn env_path() -> Option<PathBuf> {
    std::env::var_os(ENV_PATH).map(PathBuf::from)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".sha256");
    PathBuf::from(s)
}

/// Loads and standardizes the data. `expected_sha256` overrides the
/// sidecar digest.
pub fn load_dermatology(path: &Path, expected_sha256: Option<&str>) -> Result<Dermatology> {
    let bytes = fs::read(path).map_err(|e| HarnessError::Dataset {
        path: path.to_owned(),
        reason: format!("cannot read: {e}"),
    })?;
    let digest = sha256_hex(&bytes);
    let expected = match expected_sha256 {
        Some(h) => Some(h.trim().to_ascii_lowercase()),
        None => match fs::read_to_string(sidecar(path)) {
            Ok(s) => s.split_whitespace().next().map(str::to_ascii_lowercase),
            Err(_) => None,
        },
    };
    if let Some(expected) = expected {
        if expected != digest {
            return Err(HarnessError::Dataset {
                path: path.to_owned(),
                reason: format!("sha256 mismatch: expected {expected}, found {digest}"),
            });
        }
    }
    let text = String::from_utf8(bytes).map_err(|_| HarnessError::Dataset {
        path: path.to_owned(),
        reason: "not UTF-8 text".into(),
    })?;
    let (raw, truth, dropped_lines) = parse(path, &text)?;
    let data = standardize(path, raw, truth.len())?;
    Ok(Dermatology {
        sample: LabeledSample { data, truth },
        dropped_lines,
        sha256: digest,
    })
}

fn parse(path: &Path, text: &str) -> Result<(Vec<f64>, Vec<usize>, Vec<usize>)> {
    let bad = |row: usize, column: usize, reason: String| HarnessError::Ingestion {
        path: path.to_owned(),
        row,
        column,
        reason,
    };
    let mut values = Vec::with_capacity(RECORDS * ATTRIBUTES);
    let mut truth = Vec::with_capacity(RECORDS);
    let mut dropped = Vec::new();
    let mut records = 0;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        records += 1;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != ATTRIBUTES + 1 {
            return Err(bad(line_no, fields.len(), format!("expected {} fields, found {}", ATTRIBUTES + 1, fields.len())));
        }
        if fields[AGE_COLUMN] == "?" {
            dropped.push(line_no);
            continue;
        }
        for (c, f) in fields[..ATTRIBUTES].iter().enumerate() {
            let v: f64 = f
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| bad(line_no, c + 1, format!("{f:?} is not a number")))?;
            values.push(v);
        }
        let class: usize = fields[ATTRIBUTES]
            .parse()
            .ok()
            .filter(|c| (1..=CLASSES).contains(c))
            .ok_or_else(|| bad(line_no, ATTRIBUTES + 1, format!("class {:?} is not in 1..={CLASSES}", fields[ATTRIBUTES])))?;
        truth.push(class - 1);
    }
    if records != RECORDS {
        return Err(HarnessError::Dataset {
            path: path.to_owned(),
            reason: format!("expected {RECORDS} records, found {records}"),
        });
    }
    Ok((values, truth, dropped))
}

/// Zero mean, unit sample standard deviation per column.
fn standardize(path: &Path, mut values: Vec<f64>, rows: usize) -> Result<DataMatrix> {
    for c in 0..ATTRIBUTES {
        let column = || (0..rows).map(|r| values[r * ATTRIBUTES + c]);
        let mean = kgroups::sum::compensated_sum(column()) / rows as f64;
        let ss = kgroups::sum::compensated_sum(column().map(|v| (v - mean) * (v - mean)));
        let sd = (ss / (rows - 1) as f64).sqrt();
        if sd == 0.0 {
            return Err(HarnessError::Ingestion {
                path: path.to_owned(),
                row: 0,
                column: c + 1,
                reason: "attribute is constant and cannot be standardized".into(),
            });
        }
        for r in 0..rows {
            let v = &mut values[r * ATTRIBUTES + c];
            *v = (*v - mean) / sd;
        }
    }
    Ok(DataMatrix::new(rows, ATTRIBUTES, values)?)
}

/// Downloads the data to `dest` and writes its digest to the sidecar file.
#[cfg(feature = "fetch")]
pub fn fetch(url: &str, dest: &Path) -> Result<String> {
    let bytes = ureq::get(url)
        .call()
        .and_then(|mut r| r.body_mut().read_to_vec())
        .map_err(|e| HarnessError::Dataset {
            path: dest.to_owned(),
            reason: format!("download from {url} failed: {e}"),
        })?;
    let digest = sha256_hex(&bytes);
    fs::write(dest, &bytes).map_err(|e| HarnessError::io(dest, e))?;
    fs::write(sidecar(dest), format!("{digest}\n")).map_err(|e| HarnessError::io(sidecar(dest), e))?;
    Ok(digest)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DermatologyResult {
    pub algorithm: Algorithm,
    pub scores: IndexReport,
    pub within: f64,
    pub best_restart: usize,
}

/// Fits each algorithm with K = 6 (α = 1 for k-groups) and scores it
/// against the diagnoses.
pub fn run_dermatology(
    sample: &LabeledSample,
    algorithms: &[Algorithm],
    restarts: usize,
    seed: u64,
) -> Result<Vec<DermatologyResult>> {
    if algorithms.is_empty() {
        return Err(HarnessError::input("algorithm list is empty"));
    }
    algorithms
        .iter()
        .map(|&algorithm| {
            let cfg = algorithm.config(CLASSES, Alpha::ONE, restarts, kgroups::solver::DEFAULT_MAX_PASSES, seed);
            let f: FitResult = fit(&sample.data, &cfg)?;
            Ok(DermatologyResult {
                algorithm,
                scores: IndexReport::compare(&sample.truth, f.partition.labels())?,
                within: f.within,
                best_restart: f.best_restart,
            })
        })
        .collect()
}
