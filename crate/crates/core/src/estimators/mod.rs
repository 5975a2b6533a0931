//! Per-feature two-group statistics and James-Stein shrinkage estimators of
//! variances and correlations.

mod correlation;
mod dataset;
mod stats;
mod variance;

pub use correlation::{
    shrink_correlation, shrink_correlation_with, CorrelationShrinkage, FactoredCorrelation,
    DEFAULT_GAMMA_FLOOR,
};
pub use dataset::{Group, LabeledDataset};
pub use stats::{compute_group_stats, GroupStats};
pub use variance::{shrink_variances, shrink_variances_with_lambda, ShrinkageVariance};
