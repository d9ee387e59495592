//! CSV/JSON input parsing and deterministic result emission.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2};
use robreg::ProblemInstance;
use serde::Serialize;

use crate::CliError;

/// Read a `b,f1,...,fm` CSV into a problem instance.
pub fn read_instance(path: &str) -> Result<ProblemInstance<f64>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::input(format!("cannot open {path}: {e}")))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::input(format!("{path}: {e}")))?
        .clone();
    if headers.is_empty() || headers.get(0) != Some("b") {
        return Err(CliError::input(format!(
            "{path}: first column must be `b` (got {:?})",
            headers.get(0).unwrap_or("")
        )));
    }
    let m = headers.len() - 1;
    for (j, name) in headers.iter().skip(1).enumerate() {
        let expect = format!("f{}", j + 1);
        if name != expect {
            return Err(CliError::input(format!(
                "{path}: column {} must be `{expect}` (got `{name}`)",
                j + 2
            )));
        }
    }
    if m == 0 {
        return Err(CliError::input(format!("{path}: no feature columns")));
    }
    let mut targets = Vec::new();
    let mut rows: Vec<f64> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::input(format!("{path}: {e}")))?;
        let line = i + 2; // header occupies line 1
        if record.len() != m + 1 {
            return Err(CliError::input(format!(
                "{path}: line {line}: expected {} fields, found {}",
                m + 1,
                record.len()
            )));
        }
        for (col, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| {
                CliError::input(format!(
                    "{path}: line {line}, column {}: `{field}` is not a number",
                    col + 1
                ))
            })?;
            if col == 0 {
                targets.push(value);
            } else {
                rows.push(value);
            }
        }
    }
    let n = targets.len();
    if n == 0 {
        return Err(CliError::input(format!("{path}: no data rows")));
    }
    let a = Array2::from_shape_vec((n, m), rows)
        .map_err(|e| CliError::input(format!("{path}: {e}")))?;
    ProblemInstance::new(a, Array1::from(targets))
        .map_err(|e| CliError::input(format!("{path}: {e}")))
}

/// Read a single-column `x` CSV into a weight vector.
pub fn read_weights(path: &str) -> Result<Array1<f64>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::input(format!("cannot open {path}: {e}")))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::input(format!("{path}: {e}")))?;
    if headers.len() != 1 || headers.get(0) != Some("x") {
        return Err(CliError::input(format!(
            "{path}: expected a single `x` column"
        )));
    }
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::input(format!("{path}: {e}")))?;
        let field = record.get(0).unwrap_or("");
        let value: f64 = field.parse().map_err(|_| {
            CliError::input(format!(
                "{path}: line {}, column 1: `{field}` is not a number",
                i + 2
            ))
        })?;
        values.push(value);
    }
    if values.is_empty() {
        return Err(CliError::input(format!("{path}: no weights")));
    }
    Ok(Array1::from(values))
}

/// Parse `1.5,-2,0.25` into a vector.
pub fn parse_vector(spec: &str, what: &str) -> Result<Array1<f64>, CliError> {
    let values: Result<Vec<f64>, _> = spec.split(',').map(|t| t.trim().parse::<f64>()).collect();
    let values = values.map_err(|_| CliError::input(format!("cannot parse {what}: `{spec}`")))?;
    if values.is_empty() {
        return Err(CliError::input(format!("{what} is empty")));
    }
    Ok(Array1::from(values))
}

/// Parse radii that may be a scalar (made uniform over `m` features) or a
/// full comma-separated list.
pub fn parse_radii(spec: &str, m: usize) -> Result<Array1<f64>, CliError> {
    let v = parse_vector(spec, "radii")?;
    if v.len() == 1 {
        Ok(Array1::from_elem(m, v[0]))
    } else if v.len() == m {
        Ok(v)
    } else {
        Err(CliError::input(format!(
            "expected 1 or {m} radii, got {}",
            v.len()
        )))
    }
}

/// Parse `a,b;c,d` into a matrix.
pub fn parse_matrix(spec: &str, what: &str) -> Result<Array2<f64>, CliError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for row in spec.split(';') {
        let values: Result<Vec<f64>, _> = row.split(',').map(|t| t.trim().parse::<f64>()).collect();
        rows.push(values.map_err(|_| CliError::input(format!("cannot parse {what}: `{spec}`")))?);
    }
    let ncols = rows.first().map_or(0, Vec::len);
    if ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(CliError::input(format!("{what} rows have unequal lengths")));
    }
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    Array2::from_shape_vec((flat.len() / ncols, ncols), flat)
        .map_err(|e| CliError::input(format!("{what}: {e}")))
}

/// A result document: toolkit version, full config echo, and the payload.
#[derive(Serialize)]
pub struct Document<C: Serialize, R: Serialize> {
    pub version: &'static str,
    pub command: &'static str,
    pub config: C,
    pub result: R,
}

pub fn emit_json<C: Serialize, R: Serialize>(
    doc: &Document<C, R>,
    out: Option<&str>,
) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(doc)
        .map_err(|e| CliError::input(format!("serialization failed: {e}")))?;
    text.push('\n');
    write_output(&text, out)
}

/// Render a CSV table with full round-trip float formatting.
pub fn render_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut text = String::new();
    let _ = writeln!(text, "{}", header.join(","));
    for row in rows {
        let _ = writeln!(text, "{}", row.join(","));
    }
    text
}

pub fn fmt_f64(v: f64) -> String {
    // shortest representation that round-trips
    format!("{v}")
}

pub fn write_output(text: &str, out: Option<&str>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            if let Some(parent) = Path::new(path).parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent)
                        .map_err(|e| CliError::input(format!("cannot create {parent:?}: {e}")))?;
                }
            }
            fs::write(path, text).map_err(|e| CliError::input(format!("cannot write {path}: {e}")))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
