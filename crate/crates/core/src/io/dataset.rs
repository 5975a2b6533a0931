use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::format::{content_lines, parse_cell, read_text, write_file};
use crate::error::{Error, Result};
use crate::estimators::{Group, LabeledDataset};

/// Loads a two-group dataset.
///
/// The data file is tab-separated: a header row of sample identifiers
/// (optionally preceded by a corner cell), then one row per feature with the
/// feature name in the first column. The labels file has two columns, sample
/// identifier and group (`1` or `2`); blank lines and lines starting with `#`
/// are ignored, and a first line whose group column reads `group` is taken as
/// a header. Samples keep the order of the data file.
pub fn load_dataset(data_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let data_path = data_path.as_ref();
    let labels_path = labels_path.as_ref();
    let text = read_text(data_path)?;
    let mut lines = content_lines(&text, false);
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(data_path, "file is empty"))?;
    let header: Vec<&str> = header.split('\t').map(str::trim).collect();
    let body: Vec<(usize, Vec<&str>)> = lines
        .map(|(line, content)| (line, content.split('\t').collect()))
        .collect();
    if body.is_empty() {
        return Err(Error::parse(data_path, "no feature rows after the header"));
    }

    // With a corner cell the header is as wide as the body rows.
    let width = body[0].1.len();
    let samples: Vec<String> = if header.len() == width {
        header[1..].iter().map(|s| s.to_string()).collect()
    } else if header.len() + 1 == width {
        header.iter().map(|s| s.to_string()).collect()
    } else {
        return Err(Error::parse(
            data_path,
            format!(
                "header has {} fields but line {} has {width}",
                header.len(),
                body[0].0
            ),
        ));
    };
    let n = samples.len();
    if n == 0 {
        return Err(Error::parse(data_path, "header names no samples"));
    }
    let mut sample_index = HashMap::with_capacity(n);
    for (j, s) in samples.iter().enumerate() {
        if s.is_empty() {
            return Err(Error::parse(data_path, format!("header column {} is empty", j + 2)));
        }
        if sample_index.insert(s.as_str(), j).is_some() {
            return Err(Error::parse(data_path, format!("sample '{s}' appears twice in the header")));
        }
    }

    let p = body.len();
    let mut values = DMatrix::zeros(p, n);
    let mut features = Vec::with_capacity(p);
    let mut feature_lines: HashMap<String, usize> = HashMap::with_capacity(p);
    for (i, (line, cells)) in body.iter().enumerate() {
        if cells.len() != n + 1 {
            return Err(Error::parse(
                data_path,
                format!("line {line}: {} fields, expected {}", cells.len(), n + 1),
            ));
        }
        let name = cells[0].trim().to_string();
        if name.is_empty() {
            return Err(Error::parse(data_path, format!("line {line}: empty feature name")));
        }
        if let Some(first) = feature_lines.insert(name.clone(), *line) {
            return Err(Error::parse(
                data_path,
                format!("feature '{name}' appears on lines {first} and {line}"),
            ));
        }
        for j in 0..n {
            values[(i, j)] = parse_cell(data_path, *line, j + 2, cells[j + 1])?;
        }
        features.push(name);
    }

    let labels_by_sample = read_labels(labels_path, &sample_index)?;
    let mut labels = Vec::with_capacity(n);
    for s in &samples {
        match labels_by_sample.get(s.as_str()) {
            Some(&g) => labels.push(g),
            None => {
                return Err(Error::parse(
                    labels_path,
                    format!("no group label for sample '{s}'"),
                ))
            }
        }
    }
    let features: Arc<[String]> = features.into();
    LabeledDataset::with_sample_names(values, labels, features, samples)
}

fn read_labels<'a>(path: &Path, samples: &HashMap<&'a str, usize>) -> Result<HashMap<&'a str, Group>> {
    let text = read_text(path)?;
    let mut labels: HashMap<&'a str, Group> = HashMap::with_capacity(samples.len());
    let mut seen_lines: HashMap<&'a str, usize> = HashMap::with_capacity(samples.len());
    let mut first = true;
    for (line, content) in content_lines(&text, true) {
        let fields: Vec<&str> = content.split('\t').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(Error::parse(
                path,
                format!("line {line}: expected 2 fields (sample, group), found {}", fields.len()),
            ));
        }
        let is_header = first && fields[1].eq_ignore_ascii_case("group");
        first = false;
        if is_header {
            continue;
        }
        let (key, _) = samples.get_key_value(fields[0]).ok_or_else(|| {
            Error::parse(
                path,
                format!("line {line}: sample '{}' is not in the data file", fields[0]),
            )
        })?;
        let group = Group::from_label(fields[1]).ok_or_else(|| {
            Error::parse(
                path,
                format!("line {line}: group '{}' must be 1 or 2", fields[1]),
            )
        })?;
        if let Some(prev) = seen_lines.insert(key, line) {
            return Err(Error::parse(
                path,
                format!("sample '{key}' is labeled on lines {prev} and {line}"),
            ));
        }
        labels.insert(key, group);
    }
    if labels.is_empty() {
        return Err(Error::parse(path, "file contains no labels"));
    }
    Ok(labels)
}

/// Writes a dataset in the format read by [`load_dataset`]. Values use the
/// shortest representation that reads back exactly.
pub fn write_dataset(
    data: &LabeledDataset,
    data_path: impl AsRef<Path>,
    labels_path: impl AsRef<Path>,
) -> Result<()> {
    let mut out = String::from("feature");
    for s in data.sample_names().iter() {
        out.push('\t');
        out.push_str(s);
    }
    out.push('\n');
    let values = data.values();
    for (i, name) in data.feature_names().iter().enumerate() {
        out.push_str(name);
        for j in 0..data.n() {
            write!(out, "\t{}", values[(i, j)]).expect("writing to a string");
        }
        out.push('\n');
    }
    write_file(data_path.as_ref(), out.as_bytes())?;

    let mut labels = String::from("sample\tgroup\n");
    for (s, g) in data.sample_names().iter().zip(data.labels()) {
        writeln!(labels, "{s}\t{g}").expect("writing to a string");
    }
    write_file(labels_path.as_ref(), labels.as_bytes())
}
