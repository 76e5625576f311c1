//! Instance parsing for the command-line front end.
//!
//! Two formats are supported:
//!
//! - `json-dense`: a single JSON object `{"A": [[...],...], "b": [...],
//!   "c": [...]}` with a dense row-major matrix.
//! - `csv-triple`: a CSV file of `i,j,value` triples (zero-based
//!   indices) for the nonzeros of A, with sidecar files `b.csv` and
//!   `c.csv` next to it holding one number per line.

use std::fmt;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;
use wcp_core::RawLP;

#[derive(Debug)]
pub enum ParseError {
    Io(PathBuf, std::io::Error),
    Json(PathBuf, String),
    Csv { path: PathBuf, line: usize, message: String },
    NonFinite { what: String, index: String },
    DimensionMismatch(String),
    MissingSidecar(PathBuf),
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Io(p, e) => write!(f, "cannot read {}: {e}", p.display()),
            ParseError::Json(p, e) => write!(f, "invalid JSON in {}: {e}", p.display()),
            ParseError::Csv { path, line, message } => {
                write!(f, "{}:{line}: {message}", path.display())
            }
            ParseError::NonFinite { what, index } => {
                write!(f, "non-finite value in {what} at {index}")
            }
            ParseError::DimensionMismatch(msg) => write!(f, "dimension mismatch: {msg}"),
            ParseError::MissingSidecar(p) => {
                write!(f, "missing sidecar file {}", p.display())
            }
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceFormat {
    JsonDense,
    CsvTriple,
}

pub fn parse_instance(path: &Path, format: InstanceFormat) -> Result<RawLP, ParseError> {
    match format {
        InstanceFormat::JsonDense => parse_json_dense(path),
        InstanceFormat::CsvTriple => parse_csv_triple(path),
    }
}

#[derive(Deserialize)]
struct JsonInstance {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
}

fn check_finite(values: &[f64], what: &str) -> Result<(), ParseError> {
    for (i, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(ParseError::NonFinite { what: what.to_string(), index: i.to_string() });
        }
    }
    Ok(())
}

fn parse_json_dense(path: &Path) -> Result<RawLP, ParseError> {
    let text = std::fs::read_to_string(path).map_err(|e| ParseError::Io(path.into(), e))?;
    let inst: JsonInstance =
        serde_json::from_str(&text).map_err(|e| ParseError::Json(path.into(), e.to_string()))?;
    let m = inst.a.len();
    if m == 0 {
        return Err(ParseError::DimensionMismatch("A has no rows".into()));
    }
    let n = inst.a[0].len();
    if n == 0 {
        return Err(ParseError::DimensionMismatch("A has no columns".into()));
    }
    for (i, row) in inst.a.iter().enumerate() {
        if row.len() != n {
            return Err(ParseError::DimensionMismatch(format!(
                "row {i} of A has {} entries, expected {n}",
                row.len()
            )));
        }
        for (j, v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(ParseError::NonFinite { what: "A".into(), index: format!("({i},{j})") });
            }
        }
    }
    if inst.b.len() != m {
        return Err(ParseError::DimensionMismatch(format!(
            "b has {} entries, A has {m} rows",
            inst.b.len()
        )));
    }
    if inst.c.len() != n {
        return Err(ParseError::DimensionMismatch(format!(
            "c has {} entries, A has {n} columns",
            inst.c.len()
        )));
    }
    check_finite(&inst.b, "b")?;
    check_finite(&inst.c, "c")?;
    Ok(RawLP {
        a: DMatrix::from_fn(m, n, |i, j| inst.a[i][j]),
        b: DVector::from_vec(inst.b),
        c: DVector::from_vec(inst.c),
    })
}

fn parse_number(tok: &str, path: &Path, line: usize) -> Result<f64, ParseError> {
    tok.trim().parse::<f64>().map_err(|_| ParseError::Csv {
        path: path.into(),
        line,
        message: format!("cannot parse number from {tok:?}"),
    })
}

fn parse_index(tok: &str, path: &Path, line: usize) -> Result<usize, ParseError> {
    tok.trim().parse::<usize>().map_err(|_| ParseError::Csv {
        path: path.into(),
        line,
        message: format!("cannot parse index from {tok:?}"),
    })
}

fn read_vector(path: &Path, what: &str) -> Result<Vec<f64>, ParseError> {
    if !path.exists() {
        return Err(ParseError::MissingSidecar(path.into()));
    }
    let text = std::fs::read_to_string(path).map_err(|e| ParseError::Io(path.into(), e))?;
    let mut out = Vec::new();
    for (num, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let v = parse_number(trimmed, path, num + 1)?;
        if !v.is_finite() {
            return Err(ParseError::NonFinite {
                what: what.to_string(),
                index: (num + 1).to_string(),
            });
        }
        out.push(v);
    }
    Ok(out)
}

fn parse_csv_triple(path: &Path) -> Result<RawLP, ParseError> {
    let text = std::fs::read_to_string(path).map_err(|e| ParseError::Io(path.into(), e))?;
    let mut triples = Vec::new();
    let mut max_i = 0usize;
    let mut max_j = 0usize;
    for (num, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = trimmed.split(',').collect();
        if parts.len() != 3 {
            return Err(ParseError::Csv {
                path: path.into(),
                line: num + 1,
                message: format!("expected i,j,value but found {} fields", parts.len()),
            });
        }
        let i = parse_index(parts[0], path, num + 1)?;
        let j = parse_index(parts[1], path, num + 1)?;
        let v = parse_number(parts[2], path, num + 1)?;
        if !v.is_finite() {
            return Err(ParseError::NonFinite { what: "A".into(), index: format!("({i},{j})") });
        }
        max_i = max_i.max(i);
        max_j = max_j.max(j);
        triples.push((i, j, v));
    }
    if triples.is_empty() {
        return Err(ParseError::DimensionMismatch("no triples in matrix file".into()));
    }
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let b = read_vector(&dir.join("b.csv"), "b")?;
    let c = read_vector(&dir.join("c.csv"), "c")?;
    if b.len() <= max_i {
        return Err(ParseError::DimensionMismatch(format!(
            "matrix references row {max_i} but b.csv has {} entries",
            b.len()
        )));
    }
    if c.len() <= max_j {
        return Err(ParseError::DimensionMismatch(format!(
            "matrix references column {max_j} but c.csv has {} entries",
            c.len()
        )));
    }
    let mut a = DMatrix::zeros(b.len(), c.len());
    for (i, j, v) in triples {
        a[(i, j)] += v;
    }
    Ok(RawLP { a, b: DVector::from_vec(b), c: DVector::from_vec(c) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn write_file(dir: &Path, name: &str, content: &str) -> PathBuf {
        let p = dir.join(name);
        let mut f = std::fs::File::create(&p).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        p
    }

    #[test]
    fn json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(
            dir.path(),
            "lp.json",
            r#"{"A": [[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]], "b": [1, 2, 3], "c": [7, 8]}"#,
        );
        let lp = parse_instance(&p, InstanceFormat::JsonDense).unwrap();
        assert_eq!(lp.a.nrows(), 3);
        assert_eq!(lp.a[(1, 0)], 3.0);
        assert_eq!(lp.c[1], 8.0);
    }

    #[test]
    fn json_rejects_ragged_and_nan() {
        let dir = tempfile::tempdir().unwrap();
        let ragged = write_file(dir.path(), "r.json", r#"{"A": [[1.0],[2.0,3.0]], "b":[1,2], "c":[1]}"#);
        assert!(matches!(
            parse_instance(&ragged, InstanceFormat::JsonDense),
            Err(ParseError::DimensionMismatch(_))
        ));
        let nan = write_file(dir.path(), "n.json", r#"{"A": [[1.0]], "b":[null], "c":[1]}"#);
        assert!(parse_instance(&nan, InstanceFormat::JsonDense).is_err());
    }

    #[test]
    fn csv_triple_with_sidecars() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(dir.path(), "A.csv", "0,0,1.5\n1,1,-2.0\n# comment\n2,0,3.0\n");
        write_file(dir.path(), "b.csv", "1.0\n2.0\n3.0\n");
        write_file(dir.path(), "c.csv", "-1.0\n4.0\n");
        let lp = parse_instance(&p, InstanceFormat::CsvTriple).unwrap();
        assert_eq!(lp.a.shape(), (3, 2));
        assert_eq!(lp.a[(2, 0)], 3.0);
        assert_eq!(lp.b[2], 3.0);
    }

    #[test]
    fn csv_errors_carry_positions() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(dir.path(), "A.csv", "0,0,1.0\nbogus line\n");
        write_file(dir.path(), "b.csv", "1.0\n");
        write_file(dir.path(), "c.csv", "1.0\n");
        match parse_instance(&p, InstanceFormat::CsvTriple) {
            Err(ParseError::Csv { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected a CSV error, got {other:?}"),
        }
    }

    #[test]
    fn csv_missing_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(dir.path(), "A.csv", "0,0,1.0\n");
        assert!(matches!(
            parse_instance(&p, InstanceFormat::CsvTriple),
            Err(ParseError::MissingSidecar(_))
        ));
    }
}
