use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Group membership of a sample in a two-class study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    One,
    Two,
}

impl Group {
    pub fn swapped(self) -> Self {
        match self {
            Group::One => Group::Two,
            Group::Two => Group::One,
        }
    }

    /// Parses the literal labels `1` and `2`.
    pub fn from_label(label: &str) -> Option<Self> {
        match label.trim() {
            "1" => Some(Group::One),
            "2" => Some(Group::Two),
            _ => None,
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::One => f.write_str("1"),
            Group::Two => f.write_str("2"),
        }
    }
}

/// A p × n matrix of measurements (features in rows, samples in columns)
/// with a two-group label per sample.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    values: DMatrix<f64>,
    labels: Vec<Group>,
    feature_names: Arc<[String]>,
    sample_names: Arc<[String]>,
    n1: usize,
    n2: usize,
}

impl LabeledDataset {
    /// Builds a dataset with generated sample names `s1..sn`.
    pub fn new(values: DMatrix<f64>, labels: Vec<Group>, feature_names: Vec<String>) -> Result<Self> {
        let sample_names = (1..=values.ncols()).map(|j| format!("s{j}")).collect();
        Self::with_sample_names(values, labels, feature_names.into(), sample_names)
    }

    pub fn with_sample_names(
        values: DMatrix<f64>,
        labels: Vec<Group>,
        feature_names: Arc<[String]>,
        sample_names: Vec<String>,
    ) -> Result<Self> {
        let (p, n) = values.shape();
        if p == 0 {
            return Err(Error::invalid("dataset has no features"));
        }
        if labels.len() != n {
            return Err(Error::invalid(format!(
                "{} labels given for {} samples",
                labels.len(),
                n
            )));
        }
        if feature_names.len() != p {
            return Err(Error::invalid(format!(
                "{} feature names given for {} features",
                feature_names.len(),
                p
            )));
        }
        if sample_names.len() != n {
            return Err(Error::invalid(format!(
                "{} sample names given for {} samples",
                sample_names.len(),
                n
            )));
        }
        let n1 = labels.iter().filter(|&&g| g == Group::One).count();
        let n2 = n - n1;
        if n1 < 2 || n2 < 2 {
            return Err(Error::invalid(format!(
                "each group needs at least 2 samples (group 1: {n1}, group 2: {n2})"
            )));
        }
        let mut seen = HashMap::with_capacity(p);
        for (i, name) in feature_names.iter().enumerate() {
            if let Some(first) = seen.insert(name.as_str(), i) {
                return Err(Error::invalid(format!(
                    "duplicate feature name '{name}' at features {} and {}",
                    first + 1,
                    i + 1
                )));
            }
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite value at feature {}, sample {}",
                k % p + 1,
                k / p + 1
            )));
        }
        Ok(Self {
            values,
            labels,
            feature_names,
            sample_names: sample_names.into(),
            n1,
            n2,
        })
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn labels(&self) -> &[Group] {
        &self.labels
    }

    pub fn feature_names(&self) -> &Arc<[String]> {
        &self.feature_names
    }

    pub fn sample_names(&self) -> &[String] {
        &self.sample_names
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    /// Total number of samples.
    pub fn n(&self) -> usize {
        self.n1 + self.n2
    }

    /// Number of features.
    pub fn p(&self) -> usize {
        self.values.nrows()
    }

    /// The same measurements with group labels exchanged.
    pub fn with_swapped_labels(&self) -> Self {
        Self {
            labels: self.labels.iter().map(|g| g.swapped()).collect(),
            n1: self.n2,
            n2: self.n1,
            ..self.clone()
        }
    }

    /// The same labels with new measurement values of identical shape.
    pub fn with_values(&self, values: DMatrix<f64>) -> Result<Self> {
        if values.shape() != self.values.shape() {
            return Err(Error::DimensionMismatch {
                expected: self.values.len(),
                actual: values.len(),
            });
        }
        Self::with_sample_names(
            values,
            self.labels.clone(),
            self.feature_names.clone(),
            self.sample_names.to_vec(),
        )
    }
}
