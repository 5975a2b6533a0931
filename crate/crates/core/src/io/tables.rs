use std::fmt::Write as _;
use std::path::Path;

use statrs::distribution::{ContinuousCDF, Normal};

use super::format::{content_lines, format_significant, read_text, write_file};
use crate::catscore::{rank_features, ScoreVector};
use crate::error::{Error, Result};
use crate::simharness::MethodCurves;

const SCORE_DIGITS: usize = 12;
const RANKED_HEADER: &str = "rank\tfeature\tscore\tmethod\tneighborhood_size";
const QQ_HEADER: &str = "theoretical\tempirical";
const STUDY_HEADER: &str = "method\tcutoff\tppv_mean\tpower_mean";
const NO_NEIGHBORHOOD: &str = "NA";

#[derive(Debug, Clone, PartialEq)]
pub struct RankedRow {
    pub rank: usize,
    pub feature: String,
    pub score: f64,
    pub method: String,
    /// Size of the feature's correlation neighborhood for grouped scores.
    pub neighborhood_size: Option<usize>,
}

/// Features in rank order, one row each.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedTable {
    pub rows: Vec<RankedRow>,
}

impl RankedTable {
    /// Ranks `scores`; `neighborhood_sizes` is indexed by feature.
    pub fn from_scores(scores: &ScoreVector, neighborhood_sizes: Option<&[usize]>) -> Result<Self> {
        if let Some(sizes) = neighborhood_sizes {
            if sizes.len() != scores.len() {
                return Err(Error::DimensionMismatch {
                    expected: scores.len(),
                    actual: sizes.len(),
                });
            }
        }
        let rows = rank_features(scores)
            .into_iter()
            .map(|r| RankedRow {
                rank: r.rank,
                feature: scores.feature_names[r.index].clone(),
                score: r.score,
                method: scores.method.to_string(),
                neighborhood_size: neighborhood_sizes.map(|s| s[r.index]),
            })
            .collect();
        Ok(Self { rows })
    }

    pub fn scores(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.score).collect()
    }

    /// Header plus one line per row; scores carry 12 significant digits.
    pub fn to_tsv(&self) -> String {
        let mut out = format!("{RANKED_HEADER}\n");
        for r in &self.rows {
            let size = r
                .neighborhood_size
                .map_or_else(|| NO_NEIGHBORHOOD.to_string(), |s| s.to_string());
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                r.rank,
                r.feature,
                format_significant(r.score, SCORE_DIGITS),
                r.method,
                size
            )
            .expect("writing to a string");
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        write_file(path.as_ref(), self.to_tsv().as_bytes())
    }
}

fn check_header(path: &Path, lines: &mut dyn Iterator<Item = (usize, &str)>, expected: &str) -> Result<()> {
    match lines.next() {
        None => Err(Error::parse(path, "file is empty")),
        Some((line, header)) if header.trim_end() != expected => Err(Error::parse(
            path,
            format!("line {line}: header '{header}' does not match '{expected}'"),
        )),
        Some(_) => Ok(()),
    }
}

fn fields<'a>(path: &Path, line: usize, content: &'a str, count: usize) -> Result<Vec<&'a str>> {
    let f: Vec<&str> = content.split('\t').collect();
    if f.len() != count {
        return Err(Error::parse(
            path,
            format!("line {line}: {} fields, expected {count}", f.len()),
        ));
    }
    Ok(f)
}

fn parse_field<T: std::str::FromStr>(path: &Path, line: usize, name: &str, cell: &str) -> Result<T> {
    cell.trim()
        .parse()
        .map_err(|_| Error::parse(path, format!("line {line}: {name} '{cell}' is malformed")))
}

/// Reads a table written by [`RankedTable::write`]. Ranks must run 1..p
/// without gaps and scores must not be NaN.
pub fn read_ranked_table(path: impl AsRef<Path>) -> Result<RankedTable> {
    let path = path.as_ref();
    let text = read_text(path)?;
    let mut lines = content_lines(&text, false);
    check_header(path, &mut lines, RANKED_HEADER)?;
    let mut rows = Vec::new();
    for (line, content) in lines {
        let f = fields(path, line, content, 5)?;
        let rank: usize = parse_field(path, line, "rank", f[0])?;
        if rank != rows.len() + 1 {
            return Err(Error::parse(
                path,
                format!("line {line}: rank {rank}, expected {}", rows.len() + 1),
            ));
        }
        let score: f64 = parse_field(path, line, "score", f[2])?;
        if score.is_nan() {
            return Err(Error::parse(path, format!("line {line}: score is NaN")));
        }
        let neighborhood_size = if f[4].trim() == NO_NEIGHBORHOOD {
            None
        } else {
            Some(parse_field(path, line, "neighborhood_size", f[4])?)
        };
        rows.push(RankedRow {
            rank,
            feature: f[1].to_string(),
            score,
            method: f[3].to_string(),
            neighborhood_size,
        });
    }
    if rows.is_empty() {
        return Err(Error::parse(path, "table has no rows"));
    }
    Ok(RankedTable { rows })
}

/// Plotting positions `(i - 0.5) / p` for `i = 1..=p`.
pub fn plotting_positions(p: usize) -> Vec<f64> {
    (1..=p).map(|i| (i as f64 - 0.5) / p as f64).collect()
}

/// Standard-normal quantiles against sorted scores.
#[derive(Debug, Clone, PartialEq)]
pub struct QqData {
    pub theoretical: Vec<f64>,
    pub empirical: Vec<f64>,
}

impl QqData {
    pub fn from_scores(scores: &[f64]) -> Result<Self> {
        if scores.is_empty() {
            return Err(Error::invalid("no scores for a Q-Q plot"));
        }
        if scores.iter().any(|s| s.is_nan()) {
            return Err(Error::invalid("scores contain NaN"));
        }
        let mut empirical = scores.to_vec();
        empirical.sort_by(f64::total_cmp);
        let normal = Normal::standard();
        let theoretical = plotting_positions(scores.len())
            .into_iter()
            .map(|q| normal.inverse_cdf(q))
            .collect();
        Ok(Self {
            theoretical,
            empirical,
        })
    }

    pub fn len(&self) -> usize {
        self.empirical.len()
    }

    pub fn is_empty(&self) -> bool {
        self.empirical.is_empty()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!("{QQ_HEADER}\n");
        for (t, e) in self.theoretical.iter().zip(&self.empirical) {
            writeln!(
                out,
                "{}\t{}",
                format_significant(*t, SCORE_DIGITS),
                format_significant(*e, SCORE_DIGITS)
            )
            .expect("writing to a string");
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        write_file(path.as_ref(), self.to_tsv().as_bytes())
    }
}

/// One line of a study table.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub method: String,
    pub cutoff: usize,
    pub ppv_mean: f64,
    pub power_mean: f64,
}

/// Long-format curves: one line per method and cutoff, methods in request order.
pub fn write_study_table(curves: &[MethodCurves]) -> String {
    let mut out = format!("{STUDY_HEADER}\n");
    for mc in curves {
        for c in mc.curves.cutoffs() {
            writeln!(
                out,
                "{}\t{c}\t{}\t{}",
                mc.method,
                format_significant(mc.curves.ppv_mean[c - 1], SCORE_DIGITS),
                format_significant(mc.curves.power_mean[c - 1], SCORE_DIGITS)
            )
            .expect("writing to a string");
        }
    }
    out
}

pub fn read_study_table(path: impl AsRef<Path>) -> Result<Vec<StudyRow>> {
    let path = path.as_ref();
    let text = read_text(path)?;
    let mut lines = content_lines(&text, false);
    check_header(path, &mut lines, STUDY_HEADER)?;
    lines
        .map(|(line, content)| {
            let f = fields(path, line, content, 4)?;
            Ok(StudyRow {
                method: f[0].to_string(),
                cutoff: parse_field(path, line, "cutoff", f[1])?,
                ppv_mean: parse_field(path, line, "ppv_mean", f[2])?,
                power_mean: parse_field(path, line, "power_mean", f[3])?,
            })
        })
        .collect()
}
