//! The debug CSV matrix format: one series per column, decimal floats, an
//! optional header row. Parse errors carry 1-based line numbers.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use ppbench_core::PredictorMatrix;

/// Read a matrix (rows = observations, columns = series).
pub fn read_matrix(path: &Path) -> Result<PredictorMatrix> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading matrix file {}", path.display()))?;
    let rows = parse_rows(&text).with_context(|| format!("in {}", path.display()))?;
    let n_rows = rows.len();
    if n_rows == 0 {
        bail!("{}: no data rows", path.display());
    }
    let n_cols = rows[0].len();
    let mut data = vec![0.0; n_rows * n_cols];
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            data[j * n_rows + i] = v;
        }
    }
    PredictorMatrix::from_col_major(n_rows, n_cols, data)
        .with_context(|| format!("in {}", path.display()))
}

/// Read a single-column response vector.
pub fn read_response(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading response file {}", path.display()))?;
    let rows = parse_rows(&text).with_context(|| format!("in {}", path.display()))?;
    let mut out = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        if row.len() != 1 {
            bail!(
                "{}: line {}: expected a single response column, found {}",
                path.display(),
                i + 1,
                row.len()
            );
        }
        out.push(row[0]);
    }
    if out.is_empty() {
        bail!("{}: no data rows", path.display());
    }
    Ok(out)
}

/// Write a matrix in the same format (shortest round-trip decimal floats).
pub fn write_matrix(path: &Path, matrix: &PredictorMatrix, header: Option<&[String]>) -> Result<()> {
    let mut out = String::new();
    if let Some(names) = header {
        out.push_str(&names.join(","));
        out.push('\n');
    }
    for i in 0..matrix.n_rows() {
        for j in 0..matrix.n_cols() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", matrix.get(i, j));
        }
        out.push('\n');
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// Parse CSV text into float rows, skipping an optional non-numeric header.
/// Line numbers in errors are 1-based and count the header.
fn parse_rows(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut expected_cols = None;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            // allow a trailing blank line only
            if text.lines().skip(idx + 1).any(|l| !l.trim().is_empty()) {
                bail!("line {line_no}: empty line inside the data block");
            }
            break;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        let parsed: std::result::Result<Vec<f64>, _> =
            fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(values) => {
                if let Some(expected) = expected_cols {
                    if values.len() != expected {
                        bail!(
                            "line {line_no}: expected {expected} columns, found {}",
                            values.len()
                        );
                    }
                } else {
                    expected_cols = Some(values.len());
                }
                rows.push(values);
            }
            Err(_) => {
                if idx == 0 {
                    // header row
                    expected_cols = Some(fields.len());
                } else {
                    bail!("line {line_no}: malformed numeric row '{trimmed}'");
                }
            }
        }
    }
    Ok(rows)
}
