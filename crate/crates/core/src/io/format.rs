use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// `x` rounded to `digits` significant digits, printed in the shortest form
/// that reads back to the rounded value. Plain notation is used for
/// magnitudes in [1e-5, 1e15), exponent notation otherwise.
pub fn format_significant(x: f64, digits: usize) -> String {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { "0".to_string() } else { x.to_string() };
    }
    let digits = digits.max(1);
    let rounded: f64 = format!("{:.*e}", digits - 1, x)
        .parse()
        .expect("exponent format parses");
    let magnitude = rounded.abs();
    if (1e-5..1e15).contains(&magnitude) {
        rounded.to_string()
    } else {
        format!("{rounded:e}")
    }
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    file.write_all(contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Non-empty lines with their 1-based line numbers. Trailing carriage returns
/// are dropped; lines starting with `#` are skipped when `comments` is set.
pub(crate) fn content_lines(text: &str, comments: bool) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.trim_end_matches('\r')))
        .filter(move |(_, line)| {
            !line.trim().is_empty() && !(comments && line.trim_start().starts_with('#'))
        })
}

/// Parses one numeric cell; `line` and `column` are 1-based.
pub(crate) fn parse_cell(path: &Path, line: usize, column: usize, cell: &str) -> Result<f64> {
    let value: f64 = cell.trim().parse().map_err(|_| {
        Error::parse(
            path,
            format!("line {line}, column {column}: '{cell}' is not a number"),
        )
    })?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::parse(
            path,
            format!("line {line}, column {column}: non-finite value '{cell}' is not supported"),
        ))
    }
}
