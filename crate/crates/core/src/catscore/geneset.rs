use nalgebra::DVector;
use rayon::prelude::*;

use super::oracle::OracleCorrelation;
use super::power::factored_power_apply;
use super::scores::{ScoreMethod, ScoreVector};
use crate::error::{Error, Result};
use crate::estimators::FactoredCorrelation;

/// Neighborhood threshold on |r| used when none is given.
pub const DEFAULT_GROUP_THRESHOLD: f64 = 0.85;

/// A correlation matrix that can be applied in powers and read row by row.
pub trait CorrelationStructure {
    fn dim(&self) -> usize;

    /// `C^alpha v`.
    fn power_apply(&self, alpha: f64, v: &DVector<f64>) -> Result<DVector<f64>>;

    /// Row `i` of the correlation matrix.
    fn row(&self, i: usize) -> DVector<f64>;
}

impl CorrelationStructure for FactoredCorrelation {
    fn dim(&self) -> usize {
        FactoredCorrelation::dim(self)
    }

    fn power_apply(&self, alpha: f64, v: &DVector<f64>) -> Result<DVector<f64>> {
        factored_power_apply(self, alpha, v)
    }

    fn row(&self, i: usize) -> DVector<f64> {
        FactoredCorrelation::row(self, i)
    }
}

impl CorrelationStructure for OracleCorrelation {
    fn dim(&self) -> usize {
        OracleCorrelation::dim(self)
    }

    fn power_apply(&self, alpha: f64, v: &DVector<f64>) -> Result<DVector<f64>> {
        OracleCorrelation::power_apply(self, alpha, v)
    }

    fn row(&self, i: usize) -> DVector<f64> {
        self.matrix().row(i).transpose()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetOrigin {
    Neighborhood,
    UserDefined,
}

/// A nonempty set of distinct feature indices, stored in ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneSet {
    members: Vec<usize>,
    origin: SetOrigin,
}

impl GeneSet {
    pub fn new(mut members: Vec<usize>, origin: SetOrigin) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::invalid("gene set is empty"));
        }
        members.sort_unstable();
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("gene set has repeated members"));
        }
        Ok(Self { members, origin })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn origin(&self) -> SetOrigin {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    fn check_bounds(&self, p: usize) -> Result<()> {
        match self.members.last() {
            Some(&last) if last >= p => Err(Error::invalid(format!(
                "gene set member {last} out of range for {p} features"
            ))),
            _ => Ok(()),
        }
    }
}

/// Hotelling's T² of a set: the sum of its squared cat scores.
pub fn hotelling_t2(cat: &ScoreVector, set: &GeneSet) -> Result<f64> {
    if !cat.method.is_cat() {
        return Err(Error::invalid(format!(
            "Hotelling's T² needs cat scores, got {}",
            cat.method
        )));
    }
    set.check_bounds(cat.len())?;
    Ok(set.members().iter().map(|&g| cat.scores[g].powi(2)).sum())
}

/// Grouped cat score: for each feature i, the sign of its own cat score times
/// the root sum of squares of the cat scores in `sets[i]`.
///
/// A zero score counts as positive so the magnitude never drops below that of
/// any member.
pub fn grouped_cat_score(cat: &ScoreVector, sets: &[GeneSet]) -> Result<ScoreVector> {
    if sets.len() != cat.len() {
        return Err(Error::DimensionMismatch {
            expected: cat.len(),
            actual: sets.len(),
        });
    }
    let mut grouped = DVector::zeros(cat.len());
    for (i, set) in sets.iter().enumerate() {
        if !set.contains(i) {
            return Err(Error::invalid(format!("gene set for feature {i} does not contain it")));
        }
        set.check_bounds(cat.len())?;
        let own = cat.scores[i];
        grouped[i] = if set.len() == 1 {
            own
        } else {
            let ss: f64 = set.members().iter().map(|&g| cat.scores[g].powi(2)).sum();
            own.signum() * ss.sqrt()
        };
    }
    ScoreVector::new(ScoreMethod::GroupedCat, grouped, cat.feature_names.clone())
}

/// One neighborhood per feature: the feature itself plus every other feature
/// whose correlation with it has magnitude at least `threshold`.
///
/// Rows are produced one at a time, so a factored correlation is never
/// densified.
pub fn correlation_neighborhoods<C>(corr: &C, threshold: f64) -> Result<Vec<GeneSet>>
where
    C: CorrelationStructure + Sync,
{
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::invalid(format!("threshold {threshold} outside (0, 1]")));
    }
    let p = corr.dim();
    Ok((0..p)
        .into_par_iter()
        .map(|i| {
            let row = corr.row(i);
            let members = (0..p)
                .filter(|&j| j == i || row[j].abs() >= threshold)
                .collect();
            GeneSet {
                members,
                origin: SetOrigin::Neighborhood,
            }
        })
        .collect())
}
