use nalgebra::{DMatrix, DVector};

use super::dataset::LabeledDataset;
use super::stats::{compute_group_stats, group_centered};
use crate::error::{Error, Result};

/// Default lower bound on the correlation shrinkage intensity. Keeps the
/// shrunk correlation matrix invertible.
pub const DEFAULT_GAMMA_FLOOR: f64 = 1e-4;

const ORTHONORMALITY_TOL: f64 = 1e-10;

/// Options for [`shrink_correlation_with`].
#[derive(Debug, Clone, Copy)]
pub struct CorrelationShrinkage {
    /// Smallest admissible intensity; estimated intensities are raised to it.
    pub gamma_floor: f64,
    /// Use this intensity instead of estimating one.
    pub fixed_gamma: Option<f64>,
}

impl Default for CorrelationShrinkage {
    fn default() -> Self {
        Self {
            gamma_floor: DEFAULT_GAMMA_FLOOR,
            fixed_gamma: None,
        }
    }
}

/// The shrinkage correlation `gamma * I + (1 - gamma) * R` held in factored
/// form, with `R = U diag(d) U^T` and `U` a p × m column-orthonormal basis.
#[derive(Debug, Clone)]
pub struct FactoredCorrelation {
    gamma: f64,
    u: DMatrix<f64>,
    d: DVector<f64>,
}

impl FactoredCorrelation {
    /// Validates and wraps a factorization. `u` must have orthonormal columns
    /// and `d` must be nonnegative with one entry per column.
    pub fn from_parts(gamma: f64, u: DMatrix<f64>, d: DVector<f64>) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::invalid(format!("shrinkage intensity {gamma} outside (0, 1]")));
        }
        if u.ncols() != d.len() {
            return Err(Error::DimensionMismatch {
                expected: u.ncols(),
                actual: d.len(),
            });
        }
        if u.ncols() > u.nrows() {
            return Err(Error::invalid(format!(
                "rank {} exceeds dimension {}",
                u.ncols(),
                u.nrows()
            )));
        }
        if d.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(Error::invalid("eigenvalues must be finite and nonnegative"));
        }
        let gram = u.tr_mul(&u);
        let err = (gram - DMatrix::identity(u.ncols(), u.ncols())).amax();
        if !(err <= ORTHONORMALITY_TOL) {
            return Err(Error::invalid(format!(
                "basis columns are not orthonormal (max deviation {err:e})"
            )));
        }
        Ok(Self { gamma, u, d })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// The p × m orthonormal basis `U`.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.u
    }

    /// The m nonnegative eigenvalues of the empirical correlation matrix.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.d
    }

    pub fn rank(&self) -> usize {
        self.d.len()
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    /// Same factorization with a different shrinkage intensity.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::invalid(format!("shrinkage intensity {gamma} outside (0, 1]")));
        }
        Ok(Self {
            gamma,
            ..self.clone()
        })
    }

    /// Row `i` of the shrunk correlation matrix, built in O(p·m).
    pub fn row(&self, i: usize) -> DVector<f64> {
        let scaled = self.u.row(i).transpose().component_mul(&self.d);
        let mut row = &self.u * scaled * (1.0 - self.gamma);
        row[i] += self.gamma;
        row
    }

    /// Densifies the shrunk correlation matrix. Only sensible for small p.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let p = self.dim();
        let ud = &self.u * DMatrix::from_diagonal(&self.d);
        let mut dense = ud * self.u.transpose() * (1.0 - self.gamma);
        for i in 0..p {
            dense[(i, i)] += self.gamma;
        }
        dense
    }
}

/// [`shrink_correlation_with`] using the default options.
pub fn shrink_correlation(data: &LabeledDataset) -> Result<FactoredCorrelation> {
    shrink_correlation_with(data, &CorrelationShrinkage::default())
}

/// Shrinkage estimate of the feature correlation matrix from group-centered
/// residuals, returned in factored form.
///
/// Each feature row is centered within its group and scaled to unit standard
/// deviation. The empirical correlation `R` of these residuals is never
/// formed; its eigenpairs come from a QR factorization of the standardized residual
/// matrix. The intensity is
/// `gamma = sum_{i!=j} Var(r_ij) / sum_{i!=j} r_ij^2` clipped to
/// `[gamma_floor, 1]`, where `Var(r_ij) = n / (n-1)^3 * sum_k (w_kij - mean w_ij)^2`
/// and `w_kij` is the product of standardized residuals of features i and j in
/// sample k. Both sums are evaluated through the n × n Gram matrix in
/// O(p·n²).
///
/// Zero-variance features carry no correlation information. They get a unit
/// basis vector with eigenvalue 1, which makes them uncorrelated with every
/// other feature while keeping the unit diagonal.
pub fn shrink_correlation_with(
    data: &LabeledDataset,
    options: &CorrelationShrinkage,
) -> Result<FactoredCorrelation> {
    let n = data.n();
    if n < 3 {
        return Err(Error::invalid(format!("correlation needs at least 3 samples, got {n}")));
    }
    if !(options.gamma_floor > 0.0 && options.gamma_floor <= 1.0) {
        return Err(Error::invalid(format!(
            "gamma floor {} outside (0, 1]",
            options.gamma_floor
        )));
    }
    let p = data.p();
    let stats = compute_group_stats(data);
    let active: Vec<usize> = (0..p).filter(|&i| !stats.zero_variance[i]).collect();
    if active.is_empty() {
        return Err(Error::ZeroRank);
    }

    let (_, _, resid) = group_centered(data);
    let nf = n as f64;
    let mut xs = DMatrix::zeros(active.len(), n);
    for (a, &i) in active.iter().enumerate() {
        let row = resid.row(i);
        let sd = (row.norm_squared() / (nf - 1.0)).sqrt();
        xs.row_mut(a).copy_from(&(row / sd));
    }

    let gamma = match options.fixed_gamma {
        Some(g) => {
            if !(g > 0.0 && g <= 1.0) {
                return Err(Error::invalid(format!("shrinkage intensity {g} outside (0, 1]")));
            }
            g
        }
        None => estimate_gamma(&xs).max(options.gamma_floor),
    };

    let (u_active, d) = correlation_eigenpairs(xs)?;
    let m = u_active.ncols();
    let excluded = p - active.len();
    let mut u = DMatrix::zeros(p, m + excluded);
    for (a, &i) in active.iter().enumerate() {
        u.view_mut((i, 0), (1, m)).copy_from(&u_active.row(a));
    }
    let mut dd = DVector::zeros(m + excluded);
    dd.rows_mut(0, m).copy_from(&d);
    for (k, i) in (0..p).filter(|&i| stats.zero_variance[i]).enumerate() {
        u[(i, m + k)] = 1.0;
        dd[m + k] = 1.0;
    }

    FactoredCorrelation::from_parts(gamma, u, dd)
}

/// Shrinkage intensity for standardized rows (each row has sum of squares n - 1).
fn estimate_gamma(xs: &DMatrix<f64>) -> f64 {
    let (p, n) = xs.shape();
    if p < 2 {
        return 1.0;
    }
    let nf = n as f64;
    let diag_norm = (nf - 1.0) * (nf - 1.0);
    let gram = xs.tr_mul(xs);
    let gram_fro2 = gram.norm_squared();
    // sum over all (i, j) of sum_k w_kij^2, minus the i == j terms.
    let sum_w2: f64 = (0..n).map(|k| gram[(k, k)] * gram[(k, k)]).sum();
    let sum_x4: f64 = xs.iter().map(|x| x.powi(4)).sum();
    // sum over i != j of (sum_k w_kij)^2.
    let off_sq = gram_fro2 - p as f64 * diag_norm;
    if off_sq <= 0.0 {
        return 1.0;
    }
    let dev = (sum_w2 - sum_x4) - off_sq / nf;
    let gamma = nf * dev / ((nf - 1.0) * off_sq);
    gamma.clamp(0.0, 1.0)
}

/// Nonzero eigenpairs of `R = Xs Xs^T / (n - 1)`.
///
/// A Householder QR `Xs = Q T` reduces the problem to the small symmetric
/// matrix `T T^T`, whose eigenvectors `W` give the basis `Q W`. Group-centered
/// data are always rank deficient, which is why the general SVD route is not
/// used: nalgebra's SVD can return wrong singular values when some of them
/// are exactly zero.
fn correlation_eigenpairs(xs: DMatrix<f64>) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let (p, n) = xs.shape();
    let qr = xs.qr();
    let q = qr.q();
    let t = qr.r();
    let eig = (&t * t.transpose()).symmetric_eigen();
    let lmax = eig.eigenvalues.iter().fold(0.0_f64, |m, &l| m.max(l));
    let tol = lmax * p.max(n) as f64 * f64::EPSILON;
    let mut keep: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&k| eig.eigenvalues[k] > tol)
        .collect();
    if keep.is_empty() {
        return Err(Error::ZeroRank);
    }
    keep.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let scale = (n - 1) as f64;
    let basis = q * eig.eigenvectors.select_columns(&keep);
    let d = DVector::from_iterator(keep.len(), keep.iter().map(|&k| eig.eigenvalues[k] / scale));
    Ok((basis, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::dataset::Group;

    fn dataset(rows: &[Vec<f64>], n1: usize) -> LabeledDataset {
        let n = rows[0].len();
        let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        let labels = (0..n)
            .map(|j| if j < n1 { Group::One } else { Group::Two })
            .collect();
        let names = (0..rows.len()).map(|i| format!("f{i}")).collect();
        LabeledDataset::new(DMatrix::from_row_slice(rows.len(), n, &flat), labels, names).unwrap()
    }

    /// Dense brute force: group-center, correlate, estimate Var(r_ij) by
    /// explicit loops over pairs and samples.
    fn dense_oracle(rows: &[Vec<f64>], n1: usize) -> (f64, DMatrix<f64>) {
        let p = rows.len();
        let n = rows[0].len();
        let nf = n as f64;
        let xs: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| {
                let m1 = r[..n1].iter().sum::<f64>() / n1 as f64;
                let m2 = r[n1..].iter().sum::<f64>() / (n - n1) as f64;
                let c: Vec<f64> = (0..n).map(|k| r[k] - if k < n1 { m1 } else { m2 }).collect();
                let sd = (c.iter().map(|x| x * x).sum::<f64>() / (nf - 1.0)).sqrt();
                c.iter().map(|x| x / sd).collect()
            })
            .collect();
        let mut r = DMatrix::zeros(p, p);
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..p {
            for j in 0..p {
                let w: Vec<f64> = (0..n).map(|k| xs[i][k] * xs[j][k]).collect();
                let wbar = w.iter().sum::<f64>() / nf;
                r[(i, j)] = w.iter().sum::<f64>() / (nf - 1.0);
                if i != j {
                    let s: f64 = w.iter().map(|x| (x - wbar) * (x - wbar)).sum();
                    num += nf / (nf - 1.0).powi(3) * s;
                    den += r[(i, j)] * r[(i, j)];
                }
            }
        }
        let gamma = (num / den).clamp(DEFAULT_GAMMA_FLOOR, 1.0);
        let shrunk = DMatrix::identity(p, p) * gamma + r * (1.0 - gamma);
        (gamma, shrunk)
    }

    fn lcg_rows(p: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut state = seed;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let base: Vec<f64> = (0..n).map(|_| next()).collect();
        (0..p)
            .map(|i| (0..n).map(|k| next() + 0.4 * (i % 2) as f64 * base[k]).collect())
            .collect()
    }

    #[test]
    fn matches_dense_oracle_p5_n100() {
        let rows = lcg_rows(5, 100, 42);
        let ds = dataset(&rows, 50);
        let fc = shrink_correlation(&ds).unwrap();
        let (gamma, dense) = dense_oracle(&rows, 50);
        assert!((fc.gamma() - gamma).abs() < 1e-12, "{} vs {}", fc.gamma(), gamma);
        let diff = (fc.to_dense() - dense).amax();
        assert!(diff < 1e-10, "max diff {diff:e}");
    }

    #[test]
    fn matches_dense_oracle_with_small_groups() {
        for seed in 0..40 {
            for &(p, n1, n2) in &[(10, 2, 3), (7, 2, 2), (25, 3, 2), (4, 4, 5)] {
                let rows = lcg_rows(p, n1 + n2, seed);
                let fc = shrink_correlation(&dataset(&rows, n1)).unwrap();
                let (_, dense) = dense_oracle(&rows, n1);
                let diff = (fc.to_dense() - dense).amax();
                assert!(diff < 1e-10, "seed {seed}, p {p}: max diff {diff:e}");
                assert!(fc.rank() <= n1 + n2 - 2);
            }
        }
    }

    #[test]
    fn matches_dense_oracle_p30_n10() {
        let rows = lcg_rows(30, 10, 7);
        let ds = dataset(&rows, 5);
        let fc = shrink_correlation(&ds).unwrap();
        let (gamma, dense) = dense_oracle(&rows, 5);
        assert!((fc.gamma() - gamma).abs() < 1e-12);
        assert!((fc.to_dense() - dense).amax() < 1e-10);
        assert!(fc.rank() <= 8);
    }

    #[test]
    fn unit_diagonal_and_eigen_floor() {
        let rows = lcg_rows(12, 9, 3);
        let fc = shrink_correlation(&dataset(&rows, 4)).unwrap();
        let dense = fc.to_dense();
        for i in 0..12 {
            assert!((dense[(i, i)] - 1.0).abs() < 1e-8);
        }
        let eig = dense.symmetric_eigenvalues();
        assert!(eig.min() >= fc.gamma() - 1e-10);
    }

    #[test]
    fn duplicate_pair_with_constant_magnitude_residuals_hits_floor() {
        // Residuals are +-1 in every sample, so the products w_k12 never vary.
        let row = vec![0.0, 2.0, 5.0, 7.0];
        let rows = vec![row.clone(), row];
        let fc = shrink_correlation(&dataset(&rows, 2)).unwrap();
        assert_eq!(fc.gamma(), DEFAULT_GAMMA_FLOOR);
        assert_eq!(fc.rank(), 1);
        assert!((fc.eigenvalues()[0] - 2.0).abs() < 1e-12);
        let (_, dense) = dense_oracle(&rows, 2);
        assert!((fc.to_dense() - dense).amax() < 1e-10);
    }

    #[test]
    fn duplicate_pair_general_residuals() {
        let row = vec![0.3, 2.0, 1.1, 5.0, 7.7, 6.1];
        let rows = vec![row.clone(), row];
        let fc = shrink_correlation(&dataset(&rows, 3)).unwrap();
        let (gamma, _) = dense_oracle(&rows, 3);
        assert_eq!(fc.rank(), 1);
        assert!((fc.eigenvalues()[0] - 2.0).abs() < 1e-12);
        assert!((fc.gamma() - gamma).abs() < 1e-12);
    }

    #[test]
    fn zero_variance_feature_is_isolated() {
        let mut rows = lcg_rows(4, 8, 11);
        rows.push(vec![1.0, 1.0, 1.0, 1.0, 3.0, 3.0, 3.0, 3.0]);
        let fc = shrink_correlation(&dataset(&rows, 4)).unwrap();
        let r = fc.row(4);
        assert!((r[4] - 1.0).abs() < 1e-12);
        for j in 0..4 {
            assert!(r[j].abs() < 1e-12);
        }
        let dense = fc.to_dense();
        for i in 0..5 {
            assert!((dense[(i, i)] - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn all_constant_features_report_zero_rank() {
        let rows = vec![vec![1.0, 1.0, 2.0, 2.0], vec![0.0, 0.0, 0.0, 0.0]];
        assert!(matches!(shrink_correlation(&dataset(&rows, 2)), Err(Error::ZeroRank)));
    }

    #[test]
    fn fixed_gamma_is_respected() {
        let rows = lcg_rows(6, 8, 5);
        let opts = CorrelationShrinkage {
            fixed_gamma: Some(1.0),
            ..Default::default()
        };
        let fc = shrink_correlation_with(&dataset(&rows, 4), &opts).unwrap();
        assert_eq!(fc.gamma(), 1.0);
        assert!((fc.to_dense() - DMatrix::identity(6, 6)).amax() < 1e-15);
    }

    #[test]
    fn from_parts_rejects_non_orthonormal() {
        let u = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(FactoredCorrelation::from_parts(0.5, u, DVector::from_vec(vec![1.0, 1.0])).is_err());
    }

    #[test]
    fn row_matches_dense() {
        let rows = lcg_rows(7, 10, 9);
        let fc = shrink_correlation(&dataset(&rows, 5)).unwrap();
        let dense = fc.to_dense();
        for i in 0..7 {
            let r = fc.row(i);
            for j in 0..7 {
                assert!((r[j] - dense[(i, j)]).abs() < 1e-14);
            }
        }
    }
}
