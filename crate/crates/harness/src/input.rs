//! Numeric CSV input for the `fit` and `validate` commands.
//!
//! Files may start with a header row. A final column whose header is
//! `label` holds ground-truth labels. A cell containing `?` or nothing is
//! missing; rows with any missing cell are skipped and reported.

use std::path::Path;

use kgroups::DataMatrix;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsvDataset {
    pub data: DataMatrix,
    pub header: Option<Vec<String>>,
    /// Truth labels of the kept rows, when the file has a `label` column.
    pub labels: Option<Vec<String>>,
    /// Zero-based data-row positions (header excluded) that were kept.
    pub kept_rows: Vec<usize>,
    pub skipped_rows: Vec<usize>,
}

pub(crate) fn is_missing(cell: &str) -> bool {
    cell.is_empty() || cell == "?"
}

fn records(path: &Path) -> Result<Vec<Vec<String>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    reader
        .records()
        .map(|r| {
            r.map(|rec| rec.iter().map(str::to_owned).collect::<Vec<String>>())
                .map_err(|e| csv_error(path, e))
        })
        .filter(|r| !matches!(r, Ok(fields) if fields.iter().all(|f: &String| f.is_empty())))
        .collect()
}

fn csv_error(path: &Path, e: csv::Error) -> HarnessError {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => HarnessError::io(path, source),
        other => HarnessError::input(format!("{}: {other:?}", path.display())),
    }
}

fn looks_like_header(fields: &[String]) -> bool {
    fields
        .iter()
        .any(|f| !is_missing(f) && f.parse::<f64>().is_err())
}

/// Reads a numeric table, optionally with a trailing `label` column.
pub fn read_dataset(path: &Path) -> Result<CsvDataset> {
    let mut rows = records(path)?;
    if rows.is_empty() {
        return Err(HarnessError::input(format!("{}: no rows", path.display())));
    }
    let header = looks_like_header(&rows[0]).then(|| rows.remove(0));
    let width = header.as_ref().map_or_else(|| rows.first().map_or(0, Vec::len), Vec::len);
    let has_label = header
        .as_ref()
        .and_then(|h| h.last())
        .is_some_and(|l| l.eq_ignore_ascii_case("label"));
    let cols = width - usize::from(has_label);
    if cols == 0 {
        return Err(HarnessError::input(format!("{}: no numeric columns", path.display())));
    }
    let first_line = 1 + usize::from(header.is_some());

    let mut values = Vec::with_capacity(rows.len() * cols);
    let mut labels = Vec::new();
    let (mut kept_rows, mut skipped_rows) = (Vec::new(), Vec::new());
    for (r, fields) in rows.iter().enumerate() {
        if fields.len() != width {
            return Err(HarnessError::input(format!(
                "{}: line {}: expected {width} fields, found {}",
                path.display(),
                first_line + r,
                fields.len()
            )));
        }
        if fields.iter().any(|f| is_missing(f)) {
            skipped_rows.push(r);
            continue;
        }
        for (c, f) in fields[..cols].iter().enumerate() {
            let v: f64 = f.parse().map_err(|_| {
                HarnessError::input(format!(
                    "{}: line {}, column {}: {f:?} is not a number",
                    path.display(),
                    first_line + r,
                    c + 1
                ))
            })?;
            if !v.is_finite() {
                return Err(HarnessError::input(format!(
                    "{}: line {}, column {}: non-finite value",
                    path.display(),
                    first_line + r,
                    c + 1
                )));
            }
            values.push(v);
        }
        if has_label {
            labels.push(fields[cols].clone());
        }
        kept_rows.push(r);
    }
    if kept_rows.is_empty() {
        return Err(HarnessError::input(format!("{}: every row has a missing value", path.display())));
    }
    Ok(CsvDataset {
        data: DataMatrix::new(kept_rows.len(), cols, values)?,
        header,
        labels: has_label.then_some(labels),
        kept_rows,
        skipped_rows,
    })
}

/// Reads one label per row: the `label` column if the header names one,
/// otherwise the first column.
pub fn read_labels(path: &Path) -> Result<Vec<String>> {
    let mut rows = records(path)?;
    let mut column = 0;
    if let Some(first) = rows.first() {
        if let Some(pos) = first.iter().position(|f| f.eq_ignore_ascii_case("label")) {
            column = pos;
            rows.remove(0);
        }
    }
    rows.into_iter()
        .enumerate()
        .map(|(r, fields)| match fields.get(column) {
            Some(l) if !is_missing(l) => Ok(l.clone()),
            _ => Err(HarnessError::input(format!(
                "{}: data row {}: missing label",
                path.display(),
                r + 1
            ))),
        })
        .collect()
}

/// Maps label strings to `0..k`. Integer labels are ordered numerically,
/// anything else lexicographically.
pub fn encode_labels(labels: &[String]) -> Vec<usize> {
    let mut distinct: Vec<&String> = labels.iter().collect();
    if labels.iter().all(|l| l.parse::<i64>().is_ok()) {
        distinct.sort_by_key(|l| l.parse::<i64>().expect("checked"));
    } else {
        distinct.sort();
    }
    distinct.dedup();
    labels
        .iter()
        .map(|l| distinct.iter().position(|d| *d == l).expect("label present"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn header_label_and_missing_cells() {
        let f = file("x,y,label\n1,2,a\n?,3,b\n4,,a\n5,6,b\n");
        let d = read_dataset(f.path()).unwrap();
        assert_eq!(d.data.nrows(), 2);
        assert_eq!(d.data.ncols(), 2);
        assert_eq!(d.labels.as_deref(), Some(&["a".to_string(), "b".to_string()][..]));
        assert_eq!(d.kept_rows, vec![0, 3]);
        assert_eq!(d.skipped_rows, vec![1, 2]);
    }

    #[test]
    fn headerless_numeric_file() {
        let f = file("1.5,2\n3,4\n");
        let d = read_dataset(f.path()).unwrap();
        assert!(d.header.is_none());
        assert!(d.labels.is_none());
        assert_eq!(d.data.as_slice(), &[1.5, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn bad_cell_is_reported_with_position() {
        let f = file("a,b\n1,2\n3,x\n");
        let msg = read_dataset(f.path()).unwrap_err().to_string();
        assert!(msg.contains("line 3, column 2"), "{msg}");
    }

    #[test]
    fn ragged_row_is_rejected() {
        let f = file("1,2\n3\n");
        assert!(matches!(read_dataset(f.path()), Err(HarnessError::Input(_))));
    }

    #[test]
    fn labels_encode_numerically() {
        let raw: Vec<String> = ["10", "2", "2", "-1"].iter().map(|s| s.to_string()).collect();
        assert_eq!(encode_labels(&raw), vec![2, 1, 1, 0]);
    }
}
