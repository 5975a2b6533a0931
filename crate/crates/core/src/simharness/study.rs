use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::eval::{evaluate_ranking, ConfusionCurve, EvalCurves};
use super::generator::{replicate_rng, sample_dataset, GeneratorSpec, Stream, TruthLabels};
use super::scenario::{build_scenario, ScenarioSpec};
use crate::catscore::{
    cat_score_empirical, cat_score_oracle, cat_score_shrinkage, correlation_neighborhoods,
    fold_scores, grouped_cat_score, rank_order, shrink_t_scores, t_scores, GeneSet,
    OracleCorrelation, DEFAULT_GROUP_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::estimators::{
    compute_group_stats, shrink_correlation, shrink_variances, DEFAULT_GAMMA_FLOOR,
};

/// Ranking methods compared in a simulation study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StudyMethod {
    Fold,
    T,
    ShrinkT,
    /// Student t decorrelated by the correlation estimate at the floor intensity.
    Cat,
    ShrinkCat,
    /// Student t decorrelated by the true correlation.
    OracleCat,
    /// Shrinkage cat scores grouped over neighborhoods of the shrinkage correlation.
    GroupedShrinkCat,
    /// Oracle cat scores grouped over neighborhoods of the true correlation.
    GroupedOracleCat,
    /// Uniformly random order.
    Random,
}

impl StudyMethod {
    pub const ALL: [StudyMethod; 9] = [
        StudyMethod::Fold,
        StudyMethod::T,
        StudyMethod::ShrinkT,
        StudyMethod::Cat,
        StudyMethod::ShrinkCat,
        StudyMethod::OracleCat,
        StudyMethod::GroupedShrinkCat,
        StudyMethod::GroupedOracleCat,
        StudyMethod::Random,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StudyMethod::Fold => "fold",
            StudyMethod::T => "t",
            StudyMethod::ShrinkT => "shrink-t",
            StudyMethod::Cat => "cat",
            StudyMethod::ShrinkCat => "shrink-cat",
            StudyMethod::OracleCat => "oracle-cat",
            StudyMethod::GroupedShrinkCat => "grouped-shrink-cat",
            StudyMethod::GroupedOracleCat => "grouped-oracle-cat",
            StudyMethod::Random => "random",
        }
    }

    fn needs_shrink_t(self) -> bool {
        matches!(
            self,
            StudyMethod::ShrinkT | StudyMethod::ShrinkCat | StudyMethod::GroupedShrinkCat
        )
    }

    fn needs_correlation(self) -> bool {
        matches!(
            self,
            StudyMethod::Cat | StudyMethod::ShrinkCat | StudyMethod::GroupedShrinkCat
        )
    }
}

impl fmt::Display for StudyMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StudyMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "grouped-cat" {
            return Ok(StudyMethod::GroupedShrinkCat);
        }
        StudyMethod::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                let known: Vec<_> = StudyMethod::ALL.iter().map(|m| m.as_str()).collect();
                Error::invalid(format!("unknown method '{s}' (expected one of {})", known.join(", ")))
            })
    }
}

/// Rankings of one replicate, aligned with the study's method list.
#[derive(Debug, Clone)]
pub struct ReplicateRankings {
    pub truth: TruthLabels,
    pub rankings: Vec<Vec<usize>>,
}

/// Curves of one method across all replicates.
#[derive(Debug, Clone)]
pub struct MethodCurves {
    pub method: StudyMethod,
    pub curves: EvalCurves,
}

/// A prepared simulation study. The scenario matrix and its neighborhoods are
/// built once and shared read-only by all replicates.
#[derive(Debug, Clone)]
pub struct Study {
    spec: GeneratorSpec,
    scenario: OracleCorrelation,
    methods: Vec<StudyMethod>,
    threshold: f64,
    oracle_sets: Option<Vec<GeneSet>>,
}

impl Study {
    pub fn new(
        spec: GeneratorSpec,
        scenario: &ScenarioSpec,
        methods: &[StudyMethod],
        group_threshold: Option<f64>,
    ) -> Result<Self> {
        spec.validate()?;
        if methods.is_empty() {
            return Err(Error::invalid("no methods requested"));
        }
        if scenario.p != spec.p {
            return Err(Error::DimensionMismatch {
                expected: spec.p,
                actual: scenario.p,
            });
        }
        let oracle = build_scenario(scenario)?;
        Self::with_correlation(spec, oracle, methods, group_threshold)
    }

    /// Uses an already built scenario matrix.
    pub fn with_correlation(
        spec: GeneratorSpec,
        scenario: OracleCorrelation,
        methods: &[StudyMethod],
        group_threshold: Option<f64>,
    ) -> Result<Self> {
        spec.validate()?;
        if methods.is_empty() {
            return Err(Error::invalid("no methods requested"));
        }
        let threshold = group_threshold.unwrap_or(DEFAULT_GROUP_THRESHOLD);
        let oracle_sets = if methods.contains(&StudyMethod::GroupedOracleCat) {
            Some(correlation_neighborhoods(&scenario, threshold)?)
        } else {
            None
        };
        let mut unique = Vec::with_capacity(methods.len());
        for &m in methods {
            if !unique.contains(&m) {
                unique.push(m);
            }
        }
        Ok(Self {
            spec,
            scenario,
            methods: unique,
            threshold,
            oracle_sets,
        })
    }

    pub fn methods(&self) -> &[StudyMethod] {
        &self.methods
    }

    pub fn spec(&self) -> &GeneratorSpec {
        &self.spec
    }

    /// Generates replicate `r` and ranks it with every method. The result
    /// depends only on the seed and `r`.
    pub fn replicate(&self, r: usize) -> Result<ReplicateRankings> {
        let mut rng = replicate_rng(self.spec.seed, r, Stream::Data);
        let (data, truth) = sample_dataset(&self.spec, &self.scenario, &mut rng)?;
        let names = data.feature_names().clone();
        let stats = compute_group_stats(&data);

        let t = t_scores(&stats, names.clone())?;
        let shrink_t = if self.methods.iter().any(|m| m.needs_shrink_t()) {
            let v = shrink_variances(&stats, &data)?;
            Some(shrink_t_scores(&stats, &v, names.clone())?)
        } else {
            None
        };
        let corr = if self.methods.iter().any(|m| m.needs_correlation()) {
            Some(shrink_correlation(&data)?)
        } else {
            None
        };
        let oracle_cat = if self
            .methods
            .iter()
            .any(|m| matches!(m, StudyMethod::OracleCat | StudyMethod::GroupedOracleCat))
        {
            Some(cat_score_oracle(&t, &self.scenario)?)
        } else {
            None
        };
        let shrink_cat = match (&shrink_t, &corr) {
            (Some(st), Some(c))
                if self.methods.iter().any(|m| {
                    matches!(m, StudyMethod::ShrinkCat | StudyMethod::GroupedShrinkCat)
                }) =>
            {
                Some(cat_score_shrinkage(st, c)?)
            }
            _ => None,
        };

        let mut rankings = Vec::with_capacity(self.methods.len());
        for &method in &self.methods {
            let order = match method {
                StudyMethod::Fold => rank_order(fold_scores(&stats, names.clone())?.scores.as_slice()),
                StudyMethod::T => rank_order(t.scores.as_slice()),
                StudyMethod::ShrinkT => rank_order(expect(&shrink_t).scores.as_slice()),
                StudyMethod::Cat => {
                    let floor = expect(&corr).with_gamma(DEFAULT_GAMMA_FLOOR)?;
                    rank_order(cat_score_empirical(&t, &floor)?.scores.as_slice())
                }
                StudyMethod::ShrinkCat => rank_order(expect(&shrink_cat).scores.as_slice()),
                StudyMethod::OracleCat => rank_order(expect(&oracle_cat).scores.as_slice()),
                StudyMethod::GroupedShrinkCat => {
                    let sets = correlation_neighborhoods(expect(&corr), self.threshold)?;
                    let grouped = grouped_cat_score(expect(&shrink_cat), &sets)?;
                    rank_order(grouped.scores.as_slice())
                }
                StudyMethod::GroupedOracleCat => {
                    let sets = self.oracle_sets.as_deref().expect("built with the study");
                    let grouped = grouped_cat_score(expect(&oracle_cat), sets)?;
                    rank_order(grouped.scores.as_slice())
                }
                StudyMethod::Random => {
                    let mut order: Vec<usize> = (0..self.spec.p).collect();
                    order.shuffle(&mut replicate_rng(self.spec.seed, r, Stream::RandomOrder));
                    order
                }
            };
            rankings.push(order);
        }
        Ok(ReplicateRankings { truth, rankings })
    }

    /// Runs every replicate in parallel and aggregates the curves in
    /// replicate order, so the result does not depend on the schedule.
    pub fn run(&self) -> Result<Vec<MethodCurves>> {
        let per_replicate: Vec<Vec<ConfusionCurve>> = (0..self.spec.replicates)
            .into_par_iter()
            .map(|r| {
                let rep = self.replicate(r)?;
                rep.rankings
                    .iter()
                    .map(|order| evaluate_ranking(order, &rep.truth))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;

        let mut by_method: Vec<Vec<ConfusionCurve>> =
            (0..self.methods.len()).map(|_| Vec::with_capacity(per_replicate.len())).collect();
        for curves in per_replicate {
            for (k, c) in curves.into_iter().enumerate() {
                by_method[k].push(c);
            }
        }
        self.methods
            .iter()
            .zip(by_method)
            .map(|(&method, curves)| {
                Ok(MethodCurves {
                    method,
                    curves: EvalCurves::aggregate(curves)?,
                })
            })
            .collect()
    }
}

fn expect<T>(value: &Option<T>) -> &T {
    value.as_ref().expect("computed for the requested methods")
}

/// Builds the scenario, simulates every replicate and returns one set of
/// curves per requested method, in request order.
pub fn run_study(
    spec: &GeneratorSpec,
    scenario: &ScenarioSpec,
    methods: &[StudyMethod],
    group_threshold: Option<f64>,
) -> Result<Vec<MethodCurves>> {
    Study::new(spec.clone(), scenario, methods, group_threshold)?.run()
}
