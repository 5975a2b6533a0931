//! Cat scores and everything built on them: the low-rank matrix-power
//! identity, oracle decorrelation, gene-set statistics, correlation
//! neighborhoods, ranking and the two-class discriminant rule.

mod geneset;
mod lda;
mod oracle;
mod power;
mod rank;
mod scores;

pub use geneset::{
    correlation_neighborhoods, grouped_cat_score, hotelling_t2, CorrelationStructure, GeneSet,
    SetOrigin, DEFAULT_GROUP_THRESHOLD,
};
pub use lda::{lda_predict, CorrelationModel, LdaModel, LdaPrediction};
pub use oracle::{OracleCorrelation, ORACLE_EIGEN_FLOOR};
pub use power::factored_power_apply;
pub use rank::{rank_features, rank_order, RankedFeature};
pub use scores::{
    cat_score_empirical, cat_score_oracle, cat_score_shrinkage, fold_scores, shrink_t_scores,
    t_scores, ScoreMethod, ScoreVector,
};
