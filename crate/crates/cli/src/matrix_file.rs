//! On-disk matrix format.
//!
//! ```json
//! {
//!   "dim": 2,
//!   "label": "maximally mixed qubit",
//!   "split": [1, 2],
//!   "entries": [
//!     [[5.0000000000000000e-1, 0.0000000000000000e0], [0.0000000000000000e0, 0.0000000000000000e0]],
//!     [[0.0000000000000000e0, 0.0000000000000000e0], [5.0000000000000000e-1, 0.0000000000000000e0]]
//!   ]
//! }
//! ```
//!
//! Complex entries are `[re, im]` pairs, rows in order. `label` and `split`
//! are optional. The writer prints every number with 17 significant digits,
//! so write → parse → write reproduces the file byte for byte.
//!
//! Projector sets for `measure` use the same entry layout:
//! `{"dim": d, "projectors": [entries, entries, ...]}`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use logent::{BipartiteSplit, ComplexMatrix, DensityMatrix, Measurement, C64};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::CliError;

/// Default upper bound on the dimension of matrices read from files.
pub const DEFAULT_MAX_DIM: usize = 256;

type Entries = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Entries,
    #[serde(default)]
    pub split: Option<[usize; 2]>,
    #[serde(default)]
    pub label: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectorFile {
    pub dim: usize,
    pub projectors: Vec<Entries>,
}

/// A validated state read from disk.
#[derive(Clone, Debug)]
pub struct StateFile {
    pub state: DensityMatrix,
    pub split: Option<BipartiteSplit>,
    pub label: Option<String>,
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn parse_json<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T, CliError> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        let message = if field == "." {
            inner.to_string()
        } else {
            format!("field `{field}`: {inner}")
        };
        CliError::Parse {
            path: path.display().to_string(),
            message,
        }
    })
}

fn entries_to_matrix(
    path: &Path,
    field: &str,
    dim: usize,
    entries: &Entries,
) -> Result<ComplexMatrix, CliError> {
    let parse_err = |message: String| CliError::Parse {
        path: path.display().to_string(),
        message,
    };
    if entries.len() != dim {
        return Err(parse_err(format!(
            "field `{field}`: expected {dim} rows, found {}",
            entries.len()
        )));
    }
    let mut data = Vec::with_capacity(dim * dim);
    for (i, row) in entries.iter().enumerate() {
        if row.len() != dim {
            return Err(parse_err(format!(
                "field `{field}[{i}]`: expected {dim} entries, found {}",
                row.len()
            )));
        }
        data.extend(row.iter().map(|&[re, im]| C64::new(re, im)));
    }
    ComplexMatrix::new(dim, data)
        .map_err(|e| CliError::validation(format!("{}: field `{field}`", path.display()), e))
}

fn check_dim(path: &Path, dim: usize, max_dim: usize) -> Result<(), CliError> {
    if dim == 0 {
        return Err(CliError::Parse {
            path: path.display().to_string(),
            message: "field `dim`: must be at least 1".into(),
        });
    }
    if dim > max_dim {
        return Err(CliError::Usage(format!(
            "{}: dimension {dim} exceeds the limit {max_dim} (raise it with --max-dim)",
            path.display()
        )));
    }
    Ok(())
}

/// Reads and validates a density-matrix file.
pub fn parse_matrix_file(path: &Path, max_dim: usize) -> Result<StateFile, CliError> {
    parse_matrix_text(path, &read_text(path)?, max_dim)
}

pub fn parse_matrix_text(path: &Path, text: &str, max_dim: usize) -> Result<StateFile, CliError> {
    let file: MatrixFile = parse_json(path, text)?;
    check_dim(path, file.dim, max_dim)?;
    let matrix = entries_to_matrix(path, "entries", file.dim, &file.entries)?;
    let split = match file.split {
        Some([a, b]) => {
            let split = BipartiteSplit { dim_a: a, dim_b: b };
            split.check(file.dim).map_err(|e| {
                CliError::validation(format!("{}: field `split`", path.display()), e)
            })?;
            Some(split)
        }
        None => None,
    };
    let state = DensityMatrix::new(matrix)
        .map_err(|e| CliError::validation(path.display().to_string(), e))?;
    Ok(StateFile {
        state,
        split,
        label: file.label,
    })
}

pub fn parse_projector_file(path: &Path, max_dim: usize) -> Result<Measurement, CliError> {
    let file: ProjectorFile = parse_json(path, &read_text(path)?)?;
    check_dim(path, file.dim, max_dim)?;
    let projectors = file
        .projectors
        .iter()
        .enumerate()
        .map(|(i, e)| entries_to_matrix(path, &format!("projectors[{i}]"), file.dim, e))
        .collect::<Result<Vec<_>, _>>()?;
    Measurement::new(projectors).map_err(|e| CliError::validation(path.display().to_string(), e))
}

/// `x` with 17 significant digits in JSON-compatible exponent notation.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_entries(out: &mut String, m: &ComplexMatrix, indent: &str) {
    let n = m.dim();
    out.push_str("[\n");
    for (i, row) in m.rows().enumerate() {
        out.push_str(indent);
        out.push_str("  [");
        for (j, z) in row.iter().enumerate() {
            let _ = write!(out, "[{}, {}]", format_number(z.re), format_number(z.im));
            if j + 1 < n {
                out.push_str(", ");
            }
        }
        out.push(']');
        if i + 1 < n {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str(indent);
    out.push(']');
}

/// Serializes a matrix in the file format.
pub fn format_matrix_file(
    m: &ComplexMatrix,
    split: Option<BipartiteSplit>,
    label: Option<&str>,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{{\n  \"dim\": {},", m.dim());
    if let Some(label) = label {
        let _ = writeln!(
            out,
            "  \"label\": {},",
            serde_json::to_string(label).expect("string serializes")
        );
    }
    if let Some(s) = split {
        let _ = writeln!(out, "  \"split\": [{}, {}],", s.dim_a, s.dim_b);
    }
    out.push_str("  \"entries\": ");
    write_entries(&mut out, m, "  ");
    out.push_str("\n}\n");
    out
}

/// Serializes a projector set in the `measure` input format.
pub fn format_projector_file(projectors: &[ComplexMatrix]) -> String {
    let dim = projectors.first().map_or(0, |p| p.dim());
    let mut out = format!("{{\n  \"dim\": {dim},\n  \"projectors\": [\n");
    for (k, p) in projectors.iter().enumerate() {
        out.push_str("    ");
        write_entries(&mut out, p, "    ");
        if k + 1 < projectors.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("  ]\n}\n");
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("mem.json")
    }

    #[test]
    fn maximally_mixed_qubit() {
        let text = r#"{"dim": 2, "entries": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]}"#;
        let f = parse_matrix_text(p(), text, DEFAULT_MAX_DIM).unwrap();
        assert_eq!(f.state.dim(), 2);
        assert!(f.split.is_none());
    }

    #[test]
    fn trace_error_names_deviation() {
        let text = r#"{"dim": 2, "entries": [[[0.5, 0], [0, 0]], [[0, 0], [0.4, 0]]]}"#;
        let err = parse_matrix_text(p(), text, DEFAULT_MAX_DIM).unwrap_err();
        assert_eq!(err.exit_code(), CliError::EXIT_VALIDATION);
        let msg = err.to_string();
        assert!(msg.contains("trace") && msg.contains("1.000e-1"), "{msg}");
    }

    #[test]
    fn split_tag() {
        let m = ComplexMatrix::maximally_mixed(4);
        let text = format_matrix_file(&m, Some(BipartiteSplit { dim_a: 2, dim_b: 2 }), Some("I/4"));
        let f = parse_matrix_text(p(), &text, DEFAULT_MAX_DIM).unwrap();
        assert_eq!(f.split, Some(BipartiteSplit { dim_a: 2, dim_b: 2 }));
        assert_eq!(f.label.as_deref(), Some("I/4"));

        let bad = text.replace("[2, 2]", "[3, 2]");
        let err = parse_matrix_text(p(), &bad, DEFAULT_MAX_DIM).unwrap_err();
        assert_eq!(err.exit_code(), CliError::EXIT_VALIDATION);
    }

    #[test]
    fn parse_errors_carry_field_and_line() {
        let text = "{\"dim\": 2,\n \"entries\": [[[0.5, 0], [0, 0]], [[0, 0], [0.5]]]}";
        let err = parse_matrix_text(p(), text, DEFAULT_MAX_DIM).unwrap_err();
        assert_eq!(err.exit_code(), CliError::EXIT_PARSE);
        let msg = err.to_string();
        assert!(
            msg.contains("entries[1][1]") && msg.contains("line 2"),
            "{msg}"
        );

        let err =
            parse_matrix_text(p(), r#"{"dim": 3, "entries": []}"#, DEFAULT_MAX_DIM).unwrap_err();
        assert!(err.to_string().contains("expected 3 rows"));
        let err = parse_matrix_text(p(), "{\"dim\": 2", DEFAULT_MAX_DIM).unwrap_err();
        assert_eq!(err.exit_code(), CliError::EXIT_PARSE);
    }

    #[test]
    fn dimension_cap() {
        let m = ComplexMatrix::maximally_mixed(5);
        let text = format_matrix_file(&m, None, None);
        assert_eq!(
            parse_matrix_text(p(), &text, 4).unwrap_err().exit_code(),
            CliError::EXIT_USAGE
        );
        assert!(parse_matrix_text(p(), &text, 5).is_ok());
    }

    #[test]
    fn rewrite_is_byte_identical() {
        let rho = logent::random_density::<f64>(4, 3, 77).unwrap();
        let first = format_matrix_file(rho.matrix(), None, Some("r"));
        let back = parse_matrix_text(p(), &first, DEFAULT_MAX_DIM).unwrap();
        assert_eq!(back.state.matrix(), rho.matrix());
        assert_eq!(
            format_matrix_file(back.state.matrix(), None, Some("r")),
            first
        );
    }

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.5), "5.0000000000000000e-1");
        assert_eq!(format_number(0.1).len(), "1.0000000000000001e-1".len());
        let x = 0.1f64 + 0.2;
        assert_eq!(format_number(x).parse::<f64>().unwrap(), x);
    }
}
