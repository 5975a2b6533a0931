//! Synthetic correlation scenarios, the two-group data generator, replicate
//! orchestration and ranking-quality curves.

mod eval;
mod generator;
mod scenario;
mod study;

pub use eval::{evaluate_ranking, ConfusionCurve, EvalCurves};
pub use generator::{
    replicate_rng, sample_dataset, sample_variances, GeneratorSpec, Stream, TruthLabels,
};
pub use scenario::{build_scenario, BlockSign, ScenarioKind, ScenarioSpec};
pub use study::{run_study, MethodCurves, ReplicateRankings, Study, StudyMethod};
