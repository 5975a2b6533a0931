use nalgebra::DVector;

use super::geneset::CorrelationStructure;
use super::oracle::OracleCorrelation;
use crate::error::{Error, Result};
use crate::estimators::{
    compute_group_stats, shrink_correlation, shrink_variances, FactoredCorrelation, Group,
    LabeledDataset,
};

/// Correlation used by a discriminant model: a shrinkage estimate or a known matrix.
#[derive(Debug, Clone)]
pub enum CorrelationModel {
    Factored(FactoredCorrelation),
    Oracle(OracleCorrelation),
}

impl CorrelationStructure for CorrelationModel {
    fn dim(&self) -> usize {
        match self {
            CorrelationModel::Factored(c) => c.dim(),
            CorrelationModel::Oracle(c) => c.dim(),
        }
    }

    fn power_apply(&self, alpha: f64, v: &DVector<f64>) -> Result<DVector<f64>> {
        match self {
            CorrelationModel::Factored(c) => CorrelationStructure::power_apply(c, alpha, v),
            CorrelationModel::Oracle(c) => c.power_apply(alpha, v),
        }
    }

    fn row(&self, i: usize) -> DVector<f64> {
        match self {
            CorrelationModel::Factored(c) => c.row(i),
            CorrelationModel::Oracle(c) => CorrelationStructure::row(c, i),
        }
    }
}

/// Two-class linear discriminant with covariance `V^(1/2) P V^(1/2)`.
#[derive(Debug, Clone)]
pub struct LdaModel {
    mu1: DVector<f64>,
    mu2: DVector<f64>,
    correlation: CorrelationModel,
    variances: DVector<f64>,
    log_prior_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdaPrediction {
    pub delta: f64,
    pub class: Group,
}

impl LdaModel {
    pub fn new(
        mu1: DVector<f64>,
        mu2: DVector<f64>,
        correlation: CorrelationModel,
        variances: DVector<f64>,
        log_prior_ratio: f64,
    ) -> Result<Self> {
        let p = mu1.len();
        for len in [mu2.len(), correlation.dim(), variances.len()] {
            if len != p {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    actual: len,
                });
            }
        }
        if variances.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::invalid("model variances must be positive and finite"));
        }
        if !log_prior_ratio.is_finite() {
            return Err(Error::invalid("log prior ratio must be finite"));
        }
        Ok(Self {
            mu1,
            mu2,
            correlation,
            variances,
            log_prior_ratio,
        })
    }

    /// Group means, shrinkage variances and shrinkage correlation from
    /// training data; priors are the group proportions.
    pub fn fit(data: &LabeledDataset) -> Result<Self> {
        let stats = compute_group_stats(data);
        let variances = shrink_variances(&stats, data)?;
        let correlation = shrink_correlation(data)?;
        let log_prior_ratio = (data.n1() as f64 / data.n2() as f64).ln();
        Self::new(
            stats.mu1,
            stats.mu2,
            CorrelationModel::Factored(correlation),
            variances.v_shrink,
            log_prior_ratio,
        )
    }

    /// Feature weights `P^(-1/2) V^(-1/2) (mu1 - mu2)`.
    pub fn feature_weights(&self) -> Result<DVector<f64>> {
        let standardized = (&self.mu1 - &self.mu2).component_div(&self.std_devs());
        self.correlation.power_apply(-0.5, &standardized)
    }

    fn std_devs(&self) -> DVector<f64> {
        self.variances.map(f64::sqrt)
    }

    pub fn dim(&self) -> usize {
        self.mu1.len()
    }
}

/// Discriminant difference `omega^T delta(x) + log(pi1/pi2)`; class 1 when it is
/// nonnegative.
pub fn lda_predict(model: &LdaModel, x: &DVector<f64>) -> Result<LdaPrediction> {
    if x.len() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            actual: x.len(),
        });
    }
    let omega = model.feature_weights()?;
    let midpoint = (&model.mu1 + &model.mu2) * 0.5;
    let standardized = (x - midpoint).component_div(&model.std_devs());
    let distance = model.correlation.power_apply(-0.5, &standardized)?;
    let delta = omega.dot(&distance) + model.log_prior_ratio;
    let class = if delta >= 0.0 { Group::One } else { Group::Two };
    Ok(LdaPrediction { delta, class })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn ar_oracle(p: usize, rho: f64) -> OracleCorrelation {
        OracleCorrelation::new(DMatrix::from_fn(p, p, |i, j| rho.powi((i as i32 - j as i32).abs())))
            .unwrap()
    }

    fn model(p: usize, rho: f64, log_prior: f64) -> LdaModel {
        LdaModel::new(
            DVector::from_fn(p, |i, _| 0.5 * i as f64 - 1.0),
            DVector::from_fn(p, |i, _| (i as f64).sin()),
            CorrelationModel::Oracle(ar_oracle(p, rho)),
            DVector::from_fn(p, |i, _| 0.5 + i as f64),
            log_prior,
        )
        .unwrap()
    }

    /// Standard form: (mu1 - mu2)^T Sigma^-1 (x - (mu1 + mu2)/2) + log prior ratio.
    fn dense_delta(m: &LdaModel, p_mat: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
        let sd = m.variances.map(f64::sqrt);
        let sigma = DMatrix::from_diagonal(&sd) * p_mat * DMatrix::from_diagonal(&sd);
        let inv = sigma.try_inverse().unwrap();
        let diff = &m.mu1 - &m.mu2;
        let mid = (&m.mu1 + &m.mu2) * 0.5;
        (diff.transpose() * inv * (x - mid))[0] + m.log_prior_ratio
    }

    #[test]
    fn equal_means_give_zero_and_class_one() {
        let mu = DVector::from_vec(vec![1.0, 2.0]);
        let m = LdaModel::new(
            mu.clone(),
            mu,
            CorrelationModel::Oracle(OracleCorrelation::identity(2)),
            DVector::from_vec(vec![1.0, 3.0]),
            0.0,
        )
        .unwrap();
        let pred = lda_predict(&m, &DVector::from_vec(vec![5.0, -1.0])).unwrap();
        assert_eq!(pred.delta, 0.0);
        assert_eq!(pred.class, Group::One);
    }

    #[test]
    fn at_first_centroid_half_weight_norm() {
        let m = model(5, 0.6, 0.0);
        let omega = m.feature_weights().unwrap();
        let pred = lda_predict(&m, &m.mu1.clone()).unwrap();
        assert!((pred.delta - 0.5 * omega.norm_squared()).abs() < 1e-10);
        assert_eq!(pred.class, Group::One);
        let dense = dense_delta(&m, ar_oracle(5, 0.6).matrix(), &m.mu1);
        assert!((pred.delta - dense).abs() < 1e-10);
    }

    #[test]
    fn matches_dense_discriminant() {
        let m = model(6, -0.4, 0.3);
        for k in 0..5 {
            let x = DVector::from_fn(6, |i, _| ((i * 7 + k * 3) as f64).cos() * 2.0);
            let got = lda_predict(&m, &x).unwrap().delta;
            let dense = dense_delta(&m, ar_oracle(6, -0.4).matrix(), &x);
            assert!((got - dense).abs() < 1e-10);
        }
    }

    #[test]
    fn identity_correlation_matches_naive_bayes() {
        let m = model(4, 0.0, 0.0);
        let v = &m.variances;
        let dda = |mu: &DVector<f64>, x: &DVector<f64>| -> f64 {
            (0..4)
                .map(|i| mu[i] * x[i] / v[i] - 0.5 * mu[i] * mu[i] / v[i])
                .sum::<f64>()
                + 0.5_f64.ln()
        };
        for k in 0..20 {
            let x = DVector::from_fn(4, |i, _| ((i * 5 + k) as f64 * 0.37).sin() * 3.0);
            let naive = if dda(&m.mu1, &x) >= dda(&m.mu2, &x) { Group::One } else { Group::Two };
            assert_eq!(lda_predict(&m, &x).unwrap().class, naive);
        }
    }

    #[test]
    fn rejects_nonpositive_variance() {
        let r = LdaModel::new(
            DVector::zeros(2),
            DVector::zeros(2),
            CorrelationModel::Oracle(OracleCorrelation::identity(2)),
            DVector::from_vec(vec![1.0, 0.0]),
            0.0,
        );
        assert!(r.is_err());
    }
}
