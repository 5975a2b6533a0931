use nalgebra::DVector;

use super::dataset::LabeledDataset;
use super::stats::{group_centered, GroupStats};
use crate::error::{Error, Result};

/// James-Stein shrinkage of the pooled variances toward their median.
#[derive(Debug, Clone)]
pub struct ShrinkageVariance {
    pub v_shrink: DVector<f64>,
    /// Shrinkage intensity in [0, 1].
    pub lambda: f64,
    /// Median of the pooled variances.
    pub target: f64,
}

/// Median with the midpoint convention for even lengths.
pub(crate) fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Estimates the shrinkage intensity from the data and shrinks the pooled
/// variances toward their median.
///
/// The intensity is `sum_i Var(v_i) / sum_i (v_i - target)^2`, clipped to
/// [0, 1]. `Var(v_i)` is estimated from the squared group-centered residuals
/// `w_ki` as `n / (n-1)^3 * sum_k (w_ki - mean_k w_ki)^2`, which refers to the
/// variances on the `n - 1` divisor scale. The ratio is scale free, so the
/// intensity is the same for the pooled `n - 2` divisor.
pub fn shrink_variances(stats: &GroupStats, data: &LabeledDataset) -> Result<ShrinkageVariance> {
    let p = stats.p();
    if p < 2 {
        return Err(Error::invalid("variance shrinkage needs at least 2 features"));
    }
    if data.p() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            actual: data.p(),
        });
    }
    let (_, _, resid) = group_centered(data);
    let n = data.n() as f64;

    let mut v = Vec::with_capacity(p);
    let mut var_of_v = 0.0;
    for (i, row) in resid.row_iter().enumerate() {
        if stats.zero_variance[i] {
            v.push(0.0);
            continue;
        }
        let w_mean = row.iter().map(|r| r * r).sum::<f64>() / n;
        let dev2: f64 = row.iter().map(|r| (r * r - w_mean).powi(2)).sum();
        var_of_v += n / (n - 1.0).powi(3) * dev2;
        v.push(w_mean * n / (n - 1.0));
    }
    let target_unbiased = median(&v);
    let spread: f64 = v.iter().map(|x| (x - target_unbiased).powi(2)).sum();

    let lambda = if spread > 0.0 {
        (var_of_v / spread).clamp(0.0, 1.0)
    } else {
        1.0
    };
    shrink_variances_with_lambda(stats, lambda)
}

/// Shrinks toward the median of the pooled variances with a fixed intensity.
pub fn shrink_variances_with_lambda(stats: &GroupStats, lambda: f64) -> Result<ShrinkageVariance> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::invalid(format!("shrinkage intensity {lambda} outside [0, 1]")));
    }
    let target = median(stats.pooled_var.as_slice());
    let v_shrink = stats
        .pooled_var
        .map(|v| lambda * target + (1.0 - lambda) * v);
    Ok(ShrinkageVariance {
        v_shrink,
        lambda,
        target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::dataset::Group;
    use crate::estimators::stats::compute_group_stats;
    use nalgebra::DMatrix;

    fn dataset(rows: &[&[f64]], n1: usize) -> LabeledDataset {
        let n = rows[0].len();
        let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        let labels = (0..n)
            .map(|j| if j < n1 { Group::One } else { Group::Two })
            .collect();
        let names = (0..rows.len()).map(|i| format!("f{i}")).collect();
        LabeledDataset::new(DMatrix::from_row_slice(rows.len(), n, &flat), labels, names).unwrap()
    }

    /// Direct evaluation from the definition: pooled variances on the n-1
    /// scale, empirical variance of the squared residuals, factor n/(n-1)^3.
    fn lambda_oracle(rows: &[&[f64]], n1: usize) -> f64 {
        let n = rows[0].len();
        let nf = n as f64;
        let mut v = Vec::new();
        let mut num = 0.0;
        for row in rows {
            let m1 = row[..n1].iter().sum::<f64>() / n1 as f64;
            let m2 = row[n1..].iter().sum::<f64>() / (n - n1) as f64;
            let w: Vec<f64> = (0..n)
                .map(|k| {
                    let m = if k < n1 { m1 } else { m2 };
                    (row[k] - m) * (row[k] - m)
                })
                .collect();
            let wbar = w.iter().sum::<f64>() / nf;
            let mut s = 0.0;
            for wk in &w {
                s += (wk - wbar) * (wk - wbar);
            }
            num += nf / ((nf - 1.0) * (nf - 1.0) * (nf - 1.0)) * s;
            v.push(w.iter().sum::<f64>() / (nf - 1.0));
        }
        let mut sorted = v.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let target = sorted[sorted.len() / 2];
        let den: f64 = v.iter().map(|x| (x - target) * (x - target)).sum();
        (num / den).min(1.0)
    }

    #[test]
    fn lambda_matches_direct_oracle_p3() {
        let rows: [&[f64]; 3] = [
            &[1.0, 2.0, 4.0, 3.5, 0.5, 0.9, 2.2],
            &[10.0, 14.0, 9.0, 4.0, 1.0, -3.0, 0.0],
            &[0.1, 0.3, 0.2, 0.25, 0.15, 0.05, 0.2],
        ];
        let ds = dataset(&rows, 3);
        let stats = compute_group_stats(&ds);
        let sv = shrink_variances(&stats, &ds).unwrap();
        let expected = lambda_oracle(&rows, 3);
        assert!(expected > 0.0 && expected < 1.0, "oracle {expected}");
        assert!((sv.lambda - expected).abs() < 1e-12, "{} vs {}", sv.lambda, expected);
        assert_eq!(sv.target, stats.pooled_var[0]);
    }

    #[test]
    fn identical_variances_force_lambda_one() {
        // Two rows with the same residual pattern shifted by a constant.
        let rows: [&[f64]; 3] = [
            &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
            &[11.0, 12.0, 13.0, 14.0, 15.0, 16.0],
            &[-1.0, 0.0, 1.0, 2.0, 3.0, 4.0],
        ];
        let ds = dataset(&rows, 3);
        let stats = compute_group_stats(&ds);
        let sv = shrink_variances(&stats, &ds).unwrap();
        assert_eq!(sv.lambda, 1.0);
        for i in 0..3 {
            assert!((sv.v_shrink[i] - stats.pooled_var[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_lambda_is_identity() {
        let rows: [&[f64]; 2] = [&[1.0, 2.0, 4.0, 3.5, 0.5], &[10.0, 14.0, 9.0, 4.0, 1.0]];
        let stats = compute_group_stats(&dataset(&rows, 2));
        let sv = shrink_variances_with_lambda(&stats, 0.0).unwrap();
        assert_eq!(sv.v_shrink, stats.pooled_var);
    }

    #[test]
    fn rejects_single_feature() {
        let rows: [&[f64]; 1] = [&[1.0, 2.0, 4.0, 3.5]];
        let ds = dataset(&rows, 2);
        assert!(shrink_variances(&compute_group_stats(&ds), &ds).is_err());
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
