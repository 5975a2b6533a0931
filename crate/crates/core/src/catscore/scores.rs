use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DVector;

use super::oracle::OracleCorrelation;
use super::power::factored_power_apply;
use crate::error::{Error, Result};
use crate::estimators::{FactoredCorrelation, GroupStats, ShrinkageVariance};

/// Which statistic a [`ScoreVector`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScoreMethod {
    Fold,
    T,
    ShrinkT,
    Cat,
    ShrinkCat,
    GroupedCat,
    OracleCat,
}

impl ScoreMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            ScoreMethod::Fold => "fold",
            ScoreMethod::T => "t",
            ScoreMethod::ShrinkT => "shrink-t",
            ScoreMethod::Cat => "cat",
            ScoreMethod::ShrinkCat => "shrink-cat",
            ScoreMethod::GroupedCat => "grouped-cat",
            ScoreMethod::OracleCat => "oracle-cat",
        }
    }

    /// Decorrelated scores whose squares add up to Hotelling's T².
    pub fn is_cat(self) -> bool {
        matches!(self, ScoreMethod::Cat | ScoreMethod::ShrinkCat | ScoreMethod::OracleCat)
    }
}

impl fmt::Display for ScoreMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScoreMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "fold" => ScoreMethod::Fold,
            "t" => ScoreMethod::T,
            "shrink-t" => ScoreMethod::ShrinkT,
            "cat" => ScoreMethod::Cat,
            "shrink-cat" => ScoreMethod::ShrinkCat,
            "grouped-cat" => ScoreMethod::GroupedCat,
            "oracle-cat" => ScoreMethod::OracleCat,
            other => return Err(Error::invalid(format!("unknown score method '{other}'"))),
        })
    }
}

/// A per-feature ranking statistic tagged with the method that produced it.
///
/// Entries are finite except for the signed infinities assigned to
/// zero-variance features that separate the groups.
#[derive(Debug, Clone)]
pub struct ScoreVector {
    pub method: ScoreMethod,
    pub scores: DVector<f64>,
    pub feature_names: Arc<[String]>,
}

impl ScoreVector {
    pub fn new(method: ScoreMethod, scores: DVector<f64>, feature_names: Arc<[String]>) -> Result<Self> {
        if scores.len() != feature_names.len() {
            return Err(Error::DimensionMismatch {
                expected: feature_names.len(),
                actual: scores.len(),
            });
        }
        if scores.iter().any(|s| s.is_nan()) {
            return Err(Error::invalid(format!("{method} scores contain NaN")));
        }
        Ok(Self {
            method,
            scores,
            feature_names,
        })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

pub fn fold_scores(stats: &GroupStats, names: Arc<[String]>) -> Result<ScoreVector> {
    ScoreVector::new(ScoreMethod::Fold, stats.fold_change.clone(), names)
}

pub fn t_scores(stats: &GroupStats, names: Arc<[String]>) -> Result<ScoreVector> {
    ScoreVector::new(ScoreMethod::T, stats.t.clone(), names)
}

/// t-scores with the pooled variances replaced by their shrinkage estimate.
pub fn shrink_t_scores(
    stats: &GroupStats,
    variances: &ShrinkageVariance,
    names: Arc<[String]>,
) -> Result<ScoreVector> {
    if variances.v_shrink.len() != stats.p() {
        return Err(Error::DimensionMismatch {
            expected: stats.p(),
            actual: variances.v_shrink.len(),
        });
    }
    ScoreVector::new(ScoreMethod::ShrinkT, stats.t_with_variances(&variances.v_shrink), names)
}

/// Applies `power` to the finite entries; infinite sentinels pass through
/// unchanged. Sentinels only arise for zero-variance features, which are
/// uncorrelated with everything else.
fn decorrelate<F>(t: &DVector<f64>, power: F) -> Result<DVector<f64>>
where
    F: FnOnce(&DVector<f64>) -> Result<DVector<f64>>,
{
    let masked = t.map(|x| if x.is_finite() { x } else { 0.0 });
    let mut out = power(&masked)?;
    for (o, &x) in out.iter_mut().zip(t.iter()) {
        if !x.is_finite() {
            *o = x;
        }
    }
    Ok(out)
}

/// Shrinkage cat score: `(R_shrink)^(-1/2) * t_shrink`.
pub fn cat_score_shrinkage(t_shrink: &ScoreVector, corr: &FactoredCorrelation) -> Result<ScoreVector> {
    if t_shrink.method != ScoreMethod::ShrinkT {
        return Err(Error::invalid(format!(
            "shrinkage cat score needs shrink-t input, got {}",
            t_shrink.method
        )));
    }
    let scores = decorrelate(&t_shrink.scores, |v| factored_power_apply(corr, -0.5, v))?;
    ScoreVector::new(ScoreMethod::ShrinkCat, scores, t_shrink.feature_names.clone())
}

/// Cat score of Student t-scores against a factored correlation estimate.
///
/// With `n < p` the empirical correlation is singular, so `corr` must carry a
/// positive shrinkage intensity; the floor is the least regularized choice.
pub fn cat_score_empirical(t: &ScoreVector, corr: &FactoredCorrelation) -> Result<ScoreVector> {
    if t.method != ScoreMethod::T {
        return Err(Error::invalid(format!("cat score needs t input, got {}", t.method)));
    }
    let scores = decorrelate(&t.scores, |v| factored_power_apply(corr, -0.5, v))?;
    ScoreVector::new(ScoreMethod::Cat, scores, t.feature_names.clone())
}

/// Cat score with the true correlation matrix: `P^(-1/2) * t`.
pub fn cat_score_oracle(t: &ScoreVector, oracle: &OracleCorrelation) -> Result<ScoreVector> {
    if !matches!(t.method, ScoreMethod::T | ScoreMethod::ShrinkT) {
        return Err(Error::invalid(format!(
            "oracle cat score needs t or shrink-t input, got {}",
            t.method
        )));
    }
    let scores = decorrelate(&t.scores, |v| oracle.power_apply(-0.5, v))?;
    ScoreVector::new(ScoreMethod::OracleCat, scores, t.feature_names.clone())
}
