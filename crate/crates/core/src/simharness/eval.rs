use super::generator::TruthLabels;
use crate::error::{Error, Result};

/// Confusion counts of one ranking at every cutoff 1..=p. Entry `c - 1`
/// holds the counts when the top `c` features are called.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionCurve {
    pub tp: Vec<usize>,
    pub fp: Vec<usize>,
    pub fn_: Vec<usize>,
    pub tn: Vec<usize>,
}

impl ConfusionCurve {
    pub fn len(&self) -> usize {
        self.tp.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tp.is_empty()
    }

    /// TP / (TP + FP) at `cutoff`.
    pub fn ppv(&self, cutoff: usize) -> f64 {
        let k = cutoff - 1;
        self.tp[k] as f64 / (self.tp[k] + self.fp[k]) as f64
    }

    /// TP / (TP + FN) at `cutoff`; taken as 1 when nothing is differential.
    pub fn power(&self, cutoff: usize) -> f64 {
        let k = cutoff - 1;
        let positives = self.tp[k] + self.fn_[k];
        if positives == 0 {
            1.0
        } else {
            self.tp[k] as f64 / positives as f64
        }
    }
}

/// Counts true/false positives and negatives for every cutoff of a ranking.
pub fn evaluate_ranking(ranking: &[usize], truth: &TruthLabels) -> Result<ConfusionCurve> {
    let p = truth.p();
    if ranking.len() != p {
        return Err(Error::invalid(format!(
            "ranking has {} entries for {p} features",
            ranking.len()
        )));
    }
    let mut seen = vec![false; p];
    for &i in ranking {
        if i >= p || std::mem::replace(&mut seen[i], true) {
            return Err(Error::invalid("ranking is not a permutation of the features"));
        }
    }
    let de = truth.de_count();
    let mut curve = ConfusionCurve {
        tp: Vec::with_capacity(p),
        fp: Vec::with_capacity(p),
        fn_: Vec::with_capacity(p),
        tn: Vec::with_capacity(p),
    };
    let (mut tp, mut fp) = (0, 0);
    for &i in ranking {
        if truth.is_de[i] {
            tp += 1;
        } else {
            fp += 1;
        }
        curve.tp.push(tp);
        curve.fp.push(fp);
        curve.fn_.push(de - tp);
        curve.tn.push(p - de - fp);
    }
    Ok(curve)
}

/// Ranking quality of one method over all replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalCurves {
    pub replicates: Vec<ConfusionCurve>,
    /// Mean over replicates of TP / (TP + FP), per cutoff.
    pub ppv_mean: Vec<f64>,
    /// Mean over replicates of TP / (TP + FN), per cutoff.
    pub power_mean: Vec<f64>,
}

impl EvalCurves {
    /// Averages per-replicate ratios, summing in replicate order.
    pub fn aggregate(replicates: Vec<ConfusionCurve>) -> Result<Self> {
        let p = match replicates.first() {
            Some(c) => c.len(),
            None => return Err(Error::invalid("no replicates to aggregate")),
        };
        if replicates.iter().any(|c| c.len() != p) {
            return Err(Error::invalid("replicate curves differ in length"));
        }
        let count = replicates.len() as f64;
        let mut ppv_mean = vec![0.0; p];
        let mut power_mean = vec![0.0; p];
        for curve in &replicates {
            for c in 1..=p {
                ppv_mean[c - 1] += curve.ppv(c);
                power_mean[c - 1] += curve.power(c);
            }
        }
        for k in 0..p {
            ppv_mean[k] /= count;
            power_mean[k] /= count;
        }
        Ok(Self {
            replicates,
            ppv_mean,
            power_mean,
        })
    }

    /// Cutoffs 1..=p.
    pub fn cutoffs(&self) -> impl Iterator<Item = usize> {
        1..=self.ppv_mean.len()
    }
}
