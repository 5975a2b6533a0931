use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use super::format::{content_lines, parse_cell, read_text, write_file};
use crate::error::{Error, Result};

const SYMMETRY_TOLERANCE: f64 = 1e-8;

/// Reads a square tab-separated matrix without header. Entries must be
/// symmetric within 1e-8; the result is the exactly symmetric average of the
/// matrix and its transpose.
pub fn read_correlation_matrix(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    let path = path.as_ref();
    let text = read_text(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, content) in content_lines(&text, false) {
        let row = content
            .split('\t')
            .enumerate()
            .map(|(c, cell)| parse_cell(path, line, c + 1, cell))
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::parse(
                    path,
                    format!("line {line}: {} columns, expected {}", row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
    }
    let p = rows.len();
    if p == 0 {
        return Err(Error::parse(path, "file is empty"));
    }
    if rows[0].len() != p {
        return Err(Error::parse(
            path,
            format!("matrix is {p} × {}, expected a square matrix", rows[0].len()),
        ));
    }
    let m = DMatrix::from_fn(p, p, |i, j| rows[i][j]);
    for i in 0..p {
        for j in (i + 1)..p {
            if (m[(i, j)] - m[(j, i)]).abs() > SYMMETRY_TOLERANCE {
                return Err(Error::parse(
                    path,
                    format!(
                        "entries ({}, {}) = {} and ({}, {}) = {} differ; the matrix must be symmetric",
                        i + 1,
                        j + 1,
                        m[(i, j)],
                        j + 1,
                        i + 1,
                        m[(j, i)]
                    ),
                ));
            }
        }
    }
    Ok((&m + m.transpose()) * 0.5)
}

/// Writes a matrix in the format read by [`read_correlation_matrix`], with
/// full round-trip precision.
pub fn write_correlation_matrix(path: impl AsRef<Path>, m: &DMatrix<f64>) -> Result<()> {
    let mut out = String::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                out.push('\t');
            }
            write!(out, "{}", m[(i, j)]).expect("writing to a string");
        }
        out.push('\n');
    }
    write_file(path.as_ref(), out.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(text: &str) -> tempfile::NamedTempFile {
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(f.path(), text).unwrap();
        f
    }

    #[test]
    fn round_trip() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 0.3, -0.2, 0.3, 1.0, 0.1, -0.2, 0.1, 1.0]);
        let f = tempfile::NamedTempFile::new().unwrap();
        write_correlation_matrix(f.path(), &m).unwrap();
        assert_eq!(read_correlation_matrix(f.path()).unwrap(), m);
    }

    #[test]
    fn rejects_asymmetric() {
        let f = write("1\t0.5\n0.4\t1\n");
        let err = read_correlation_matrix(f.path()).unwrap_err().to_string();
        assert!(err.contains("symmetric"), "{err}");
    }

    #[test]
    fn rejects_ragged_and_non_square() {
        assert!(read_correlation_matrix(write("1\t0\n0\n").path()).is_err());
        assert!(read_correlation_matrix(write("1\t0\t0\n0\t1\t0\n").path()).is_err());
        assert!(read_correlation_matrix(write("").path()).is_err());
    }

    #[test]
    fn reports_bad_cell_position() {
        let err = read_correlation_matrix(write("1\t0\n0\tx\n").path()).unwrap_err().to_string();
        assert!(err.contains("line 2, column 2"), "{err}");
    }
}
