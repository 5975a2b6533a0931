//! End-to-end scoring of one labeled dataset.

use crate::catscore::{
    cat_score_empirical, cat_score_oracle, cat_score_shrinkage, correlation_neighborhoods,
    fold_scores, grouped_cat_score, shrink_t_scores, t_scores, GeneSet, OracleCorrelation,
    ScoreMethod, ScoreVector, DEFAULT_GROUP_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::estimators::{
    compute_group_stats, shrink_correlation, shrink_variances, LabeledDataset, DEFAULT_GAMMA_FLOOR,
};

/// Scores and, for grouped methods, the neighborhood used by each feature.
#[derive(Debug, Clone)]
pub struct ScoredDataset {
    pub scores: ScoreVector,
    pub neighborhoods: Option<Vec<GeneSet>>,
}

impl ScoredDataset {
    pub fn neighborhood_sizes(&self) -> Option<Vec<usize>> {
        self.neighborhoods
            .as_ref()
            .map(|sets| sets.iter().map(GeneSet::len).collect())
    }
}

#[derive(Debug, Clone, Default)]
pub struct ScoreOptions {
    /// Neighborhood threshold for grouped scores; 0.85 when unset.
    pub group_threshold: Option<f64>,
    /// Known correlation, required by the oracle method.
    pub oracle: Option<OracleCorrelation>,
}

/// Runs statistics, shrinkage, decorrelation and, for grouped scores,
/// neighborhood construction. The grouped score groups shrinkage cat scores
/// over neighborhoods of the shrinkage correlation.
pub fn score_dataset(
    data: &LabeledDataset,
    method: ScoreMethod,
    options: &ScoreOptions,
) -> Result<ScoredDataset> {
    let names = data.feature_names().clone();
    let stats = compute_group_stats(data);
    let plain = |scores| ScoredDataset {
        scores,
        neighborhoods: None,
    };
    match method {
        ScoreMethod::Fold => Ok(plain(fold_scores(&stats, names)?)),
        ScoreMethod::T => Ok(plain(t_scores(&stats, names)?)),
        ScoreMethod::ShrinkT => {
            let v = shrink_variances(&stats, data)?;
            Ok(plain(shrink_t_scores(&stats, &v, names)?))
        }
        ScoreMethod::Cat => {
            let corr = shrink_correlation(data)?.with_gamma(DEFAULT_GAMMA_FLOOR)?;
            let t = t_scores(&stats, names)?;
            Ok(plain(cat_score_empirical(&t, &corr)?))
        }
        ScoreMethod::ShrinkCat | ScoreMethod::GroupedCat => {
            let v = shrink_variances(&stats, data)?;
            let t = shrink_t_scores(&stats, &v, names)?;
            let corr = shrink_correlation(data)?;
            let cat = cat_score_shrinkage(&t, &corr)?;
            if method == ScoreMethod::ShrinkCat {
                return Ok(plain(cat));
            }
            let threshold = options.group_threshold.unwrap_or(DEFAULT_GROUP_THRESHOLD);
            let sets = correlation_neighborhoods(&corr, threshold)?;
            Ok(ScoredDataset {
                scores: grouped_cat_score(&cat, &sets)?,
                neighborhoods: Some(sets),
            })
        }
        ScoreMethod::OracleCat => {
            let oracle = options
                .oracle
                .as_ref()
                .ok_or_else(|| Error::invalid("oracle cat score needs a known correlation matrix"))?;
            if oracle.dim() != data.p() {
                return Err(Error::DimensionMismatch {
                    expected: data.p(),
                    actual: oracle.dim(),
                });
            }
            let t = t_scores(&stats, names)?;
            Ok(plain(cat_score_oracle(&t, oracle)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::Group;
    use crate::catscore::rank_order;
    use nalgebra::DMatrix;

    /// Rows 0 and 1 are identical; row 2 tracks them closely.
    fn data_with_duplicate() -> LabeledDataset {
        let base = [1.0, 2.5, 1.7, 2.2, 4.0, 5.2, 4.4, 4.9];
        let wiggle = [0.3, -0.2, 0.1, -0.1, 0.2, 0.0, -0.3, 0.1];
        let mut rows = Vec::new();
        rows.extend_from_slice(&base);
        rows.extend_from_slice(&base);
        rows.extend(base.iter().zip(&wiggle).map(|(b, w)| b + w));
        rows.extend_from_slice(&[2.0, 1.1, 1.4, 0.6, 1.9, 0.8, 1.2, 1.5]);
        let x = DMatrix::from_row_slice(4, 8, &rows);
        let labels = [Group::One, Group::Two];
        let labels = labels.iter().flat_map(|&g| [g; 4]).collect();
        LabeledDataset::new(x, labels, vec!["a".into(), "b".into(), "c".into(), "d".into()]).unwrap()
    }

    #[test]
    fn duplicate_pair_shares_grouped_magnitude() {
        let data = data_with_duplicate();
        let out = score_dataset(&data, ScoreMethod::GroupedCat, &ScoreOptions::default()).unwrap();
        let s = &out.scores.scores;
        assert_eq!(s[0], s[1]);
        let gamma = shrink_correlation(&data).unwrap().gamma();
        assert!(gamma < 0.15, "gamma {gamma}");
        let sizes = out.neighborhood_sizes().unwrap();
        assert!(sizes[0] >= 2 && sizes[0] == sizes[1]);
        let table = rank_order(s.as_slice());
        let pos = |i| table.iter().position(|&k| k == i).unwrap();
        assert_eq!(pos(0).abs_diff(pos(1)), 1);
    }

    #[test]
    fn oracle_requires_matrix() {
        let data = data_with_duplicate();
        assert!(score_dataset(&data, ScoreMethod::OracleCat, &ScoreOptions::default()).is_err());
        let opts = ScoreOptions {
            oracle: Some(OracleCorrelation::identity(4)),
            ..Default::default()
        };
        let oracle = score_dataset(&data, ScoreMethod::OracleCat, &opts).unwrap();
        let t = score_dataset(&data, ScoreMethod::T, &opts).unwrap();
        assert_eq!(oracle.scores.scores, t.scores.scores);
    }

    #[test]
    fn every_method_runs() {
        let data = data_with_duplicate();
        for m in [
            ScoreMethod::Fold,
            ScoreMethod::T,
            ScoreMethod::ShrinkT,
            ScoreMethod::Cat,
            ScoreMethod::ShrinkCat,
            ScoreMethod::GroupedCat,
        ] {
            let out = score_dataset(&data, m, &ScoreOptions::default()).unwrap();
            assert_eq!(out.scores.method, m);
            assert_eq!(out.scores.len(), 4);
        }
    }
}
