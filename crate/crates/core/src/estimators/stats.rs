use nalgebra::{DMatrix, DVector};

use super::dataset::{Group, LabeledDataset};

/// Per-feature two-group summary: means, pooled variance, fold change and Student t.
#[derive(Debug, Clone)]
pub struct GroupStats {
    pub mu1: DVector<f64>,
    pub mu2: DVector<f64>,
    /// Pooled within-group variance with divisor n1 + n2 - 2.
    pub pooled_var: DVector<f64>,
    /// mu1 - mu2.
    pub fold_change: DVector<f64>,
    pub t: DVector<f64>,
    /// Features whose pooled variance is zero (up to rounding of the row's magnitude).
    pub zero_variance: Vec<bool>,
    pub n1: usize,
    pub n2: usize,
}

impl GroupStats {
    /// 1/n1 + 1/n2, the squared standard-error factor of a mean difference.
    pub fn se_factor(&self) -> f64 {
        1.0 / self.n1 as f64 + 1.0 / self.n2 as f64
    }

    /// t-scores of the stored fold changes against an arbitrary variance vector.
    ///
    /// A zero variance yields `0` for a vanishing fold change and a signed
    /// infinity otherwise.
    pub fn t_with_variances(&self, variances: &DVector<f64>) -> DVector<f64> {
        let c = self.se_factor();
        DVector::from_iterator(
            self.fold_change.len(),
            self.fold_change
                .iter()
                .zip(variances.iter())
                .map(|(&fc, &v)| {
                    if v > 0.0 {
                        fc / (c * v).sqrt()
                    } else {
                        sentinel(fc)
                    }
                }),
        )
    }

    /// Number of features.
    pub fn p(&self) -> usize {
        self.t.len()
    }
}

fn sentinel(fold_change: f64) -> f64 {
    if fold_change == 0.0 {
        0.0
    } else {
        fold_change.signum() * f64::INFINITY
    }
}

/// Group means and group-centered residuals (p × n).
pub(crate) fn group_centered(data: &LabeledDataset) -> (DVector<f64>, DVector<f64>, DMatrix<f64>) {
    let x = data.values();
    let (p, n) = x.shape();
    let labels = data.labels();
    let (n1, n2) = (data.n1() as f64, data.n2() as f64);

    let mut mu1 = DVector::zeros(p);
    let mut mu2 = DVector::zeros(p);
    for (j, col) in x.column_iter().enumerate() {
        match labels[j] {
            Group::One => mu1 += col,
            Group::Two => mu2 += col,
        }
    }
    mu1 /= n1;
    mu2 /= n2;

    let mut resid = DMatrix::zeros(p, n);
    for (j, label) in labels.iter().enumerate() {
        let mu = match label {
            Group::One => &mu1,
            Group::Two => &mu2,
        };
        let mut col = resid.column_mut(j);
        col.copy_from(&x.column(j));
        col -= mu;
    }
    (mu1, mu2, resid)
}

/// Relative rounding floor for deciding that a row carries no variation.
pub(crate) fn row_noise_floor(data: &LabeledDataset, i: usize) -> f64 {
    let scale = data
        .values()
        .row(i)
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    16.0 * f64::EPSILON * scale
}

/// Means, pooled variances, fold changes and Student t-scores for every feature.
///
/// Group sizes are validated by [`LabeledDataset`], so this cannot fail.
pub fn compute_group_stats(data: &LabeledDataset) -> GroupStats {
    let (mu1, mu2, resid) = group_centered(data);
    let p = data.p();
    let n = data.n();
    let df = (n - 2) as f64;
    let c = 1.0 / data.n1() as f64 + 1.0 / data.n2() as f64;

    let mut pooled_var = DVector::zeros(p);
    let mut zero_variance = vec![false; p];
    let mut fold_change = &mu1 - &mu2;
    let mut t = DVector::zeros(p);
    for i in 0..p {
        let ss: f64 = resid.row(i).iter().map(|r| r * r).sum();
        let floor = row_noise_floor(data, i);
        if ss <= n as f64 * floor * floor {
            zero_variance[i] = true;
            if fold_change[i].abs() <= floor {
                fold_change[i] = 0.0;
            }
            t[i] = sentinel(fold_change[i]);
        } else {
            pooled_var[i] = ss / df;
            t[i] = fold_change[i] / (c * pooled_var[i]).sqrt();
        }
    }

    GroupStats {
        mu1,
        mu2,
        pooled_var,
        fold_change,
        t,
        zero_variance,
        n1: data.n1(),
        n2: data.n2(),
    }
}
