//! Result files: `results.csv` (aggregated table) and `raw.csv`
//! (per-replicate scores), `results.json`, and `crand.svg`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::experiment::{Algorithm, ExperimentOutput, ResultRow, ResultTable, SweepParameter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub const ALL: [Format; 3] = [Format::Csv, Format::Json, Format::Svg];
}

impl FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(HarnessError::input(format!("unknown format {other:?} (csv, json, svg)"))),
        }
    }
}

const SCORE_COLUMNS: [&str; 8] = [
    "diag_mean", "diag_se", "kappa_mean", "kappa_se", "rand_mean", "rand_se", "crand_mean", "crand_se",
];

fn cell(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

fn scores(row: &ResultRow) -> [Option<f64>; 8] {
    [
        row.diag_mean,
        row.diag_se,
        row.kappa_mean,
        row.kappa_se,
        row.rand_mean,
        row.rand_se,
        row.crand_mean,
        row.crand_se,
    ]
}

/// The aggregated table as CSV. The sweep column is named after the swept
/// parameter; undefined values are empty cells.
pub fn table_to_csv(table: &ResultTable) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["algorithm", table.parameter.name(), "n_ok", "n_failed"];
    header.extend(SCORE_COLUMNS);
    header.push("runtime_ms");
    let csv_err = |e: csv::Error| HarnessError::input(format!("csv: {e}"));
    w.write_record(&header).map_err(csv_err)?;
    for row in &table.rows {
        let mut rec = vec![
            row.algorithm.name().to_string(),
            row.sweep_value.to_string(),
            row.n_ok.to_string(),
            row.n_failed.to_string(),
        ];
        rec.extend(scores(row).map(cell));
        rec.push(cell(row.runtime_ms));
        w.write_record(&rec).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::input(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Inverse of [`table_to_csv`].
pub fn table_from_csv(text: &str) -> Result<ResultTable> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let bad = |msg: String| HarnessError::input(format!("result table: {msg}"));
    let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.len() != 13 {
        return Err(bad(format!("expected 13 columns, found {}", header.len())));
    }
    let parameter: SweepParameter = header[1].parse()?;
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let opt = |i: usize| -> Result<Option<f64>> {
            match &rec[i] {
                "" => Ok(None),
                s => s.parse().map(Some).map_err(|_| bad(format!("row {}: bad number {s:?}", line + 1))),
            }
        };
        let int = |i: usize| -> Result<usize> { rec[i].parse().map_err(|_| bad(format!("row {}: bad count", line + 1))) };
        rows.push(ResultRow {
            algorithm: rec[0].parse::<Algorithm>()?,
            sweep_value: opt(1)?.ok_or_else(|| bad(format!("row {}: missing sweep value", line + 1)))?,
            n_ok: int(2)?,
            n_failed: int(3)?,
            diag_mean: opt(4)?,
            diag_se: opt(5)?,
            kappa_mean: opt(6)?,
            kappa_se: opt(7)?,
            rand_mean: opt(8)?,
            rand_se: opt(9)?,
            crand_mean: opt(10)?,
            crand_se: opt(11)?,
            runtime_ms: opt(12)?,
        });
    }
    Ok(ResultTable { parameter, rows })
}

/// Any serializable records as CSV.
pub fn records_to_csv<T: Serialize>(records: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).map_err(|e| HarnessError::input(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::input(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| HarnessError::input(format!("json: {e}")))?;
    s.push('\n');
    Ok(s)
}

const COLOURS: [&str; 6] = ["#1b6ca8", "#d1495b", "#2e933c", "#8e5572", "#edae49", "#444444"];

/// Line chart of mean cRand against the sweep value, one polyline per
/// algorithm. Cells without a mean are left out of their line.
pub fn render_svg(table: &ResultTable) -> Result<String> {
    let algorithms = table.algorithms();
    if algorithms.is_empty() {
        return Err(HarnessError::input("nothing to plot: table has no algorithms"));
    }
    let (w, h, left, right, top, bottom) = (640.0, 400.0, 60.0, 150.0, 20.0, 50.0);
    let xs: Vec<f64> = table.rows.iter().map(|r| r.sweep_value).collect();
    let (mut x0, mut x1) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if x0 == x1 {
        x0 -= 1.0;
        x1 += 1.0;
    }
    let y0 = table.rows.iter().filter_map(|r| r.crand_mean).fold(0.0f64, f64::min);
    let y1 = 1.0;
    let px = |x: f64| left + (x - x0) / (x1 - x0) * (w - left - right);
    let py = |y: f64| top + (y1 - y) / (y1 - y0) * (h - top - bottom);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let (ax0, ax1, ay0, ay1) = (px(x0), px(x1), py(y0), py(y1));
    let _ = writeln!(s, r#"<path d="M{ax0:.2},{ay1:.2}V{ay0:.2}H{ax1:.2}" fill="none" stroke="black"/>"#);
    for i in 0..=4 {
        let v = y0 + (y1 - y0) * i as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{v:.2}</text>"#, ax0 - 6.0, py(v) + 4.0);
    }
    for i in 0..=4 {
        let v = x0 + (x1 - x0) * i as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{v:.2}</text>"#, px(v), ay0 + 16.0);
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
        (ax0 + ax1) / 2.0,
        h - 10.0,
        table.parameter.name()
    );
    let _ = writeln!(s, r#"<text x="14" y="{:.2}" font-size="12" transform="rotate(-90 14 {:.2})" text-anchor="middle">mean cRand</text>"#, (ay0 + ay1) / 2.0, (ay0 + ay1) / 2.0);
    for (i, algorithm) in algorithms.iter().enumerate() {
        let colour = COLOURS[i % COLOURS.len()];
        let points: Vec<String> = table
            .rows
            .iter()
            .filter(|r| r.algorithm == *algorithm)
            .filter_map(|r| r.crand_mean.map(|m| format!("{:.2},{:.2}", px(r.sweep_value), py(m))))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline data-algorithm="{algorithm}" points="{}" fill="none" stroke="{colour}" stroke-width="2"/>"#,
            points.join(" ")
        );
        let ly = top + 16.0 * i as f64 + 8.0;
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{colour}" stroke-width="2"/>"#, w - right + 12.0, w - right + 32.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="11">{algorithm}</text>"#, w - right + 38.0, ly + 4.0);
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn write(dir: &Path, name: &str, contents: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| HarnessError::io(&path, e))?;
    written.push(path);
    Ok(())
}

/// Writes the requested formats into `dir` and returns the file paths.
/// Everything is rendered before the first file is written.
pub fn emit(output: &ExperimentOutput, dir: &Path, formats: &[Format]) -> Result<Vec<PathBuf>> {
    if output.table.algorithms().is_empty() || output.spec.algorithms.is_empty() {
        return Err(HarnessError::input("algorithm list is empty"));
    }
    let mut formats = formats.to_vec();
    formats.sort();
    formats.dedup();
    let mut files: Vec<(&str, String)> = Vec::new();
    for f in &formats {
        match f {
            Format::Csv => {
                files.push(("results.csv", table_to_csv(&output.table)?));
                files.push(("raw.csv", records_to_csv(&output.raw)?));
            }
            Format::Json => files.push(("results.json", to_json(output)?)),
            Format::Svg => files.push(("crand.svg", render_svg(&output.table)?)),
        }
    }
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut written = Vec::new();
    for (name, contents) in files {
        write(dir, name, &contents, &mut written)?;
    }
    Ok(written)
}
