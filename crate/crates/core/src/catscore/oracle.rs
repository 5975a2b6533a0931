use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Smallest admissible eigenvalue of a known correlation matrix.
pub const ORACLE_EIGEN_FLOOR: f64 = 1e-10;

const SYMMETRY_TOL: f64 = 1e-12;

/// A known, full-rank correlation matrix together with its eigendecomposition
/// and lower Cholesky factor.
#[derive(Debug, Clone)]
pub struct OracleCorrelation {
    matrix: DMatrix<f64>,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
    cholesky: DMatrix<f64>,
}

impl OracleCorrelation {
    /// Validates symmetry, the unit diagonal and the eigenvalue floor.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let (p, q) = matrix.shape();
        if p != q {
            return Err(Error::invalid(format!("correlation matrix is {p} × {q}, not square")));
        }
        if p == 0 {
            return Err(Error::invalid("correlation matrix is empty"));
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("correlation matrix has non-finite entries"));
        }
        for i in 0..p {
            if (matrix[(i, i)] - 1.0).abs() > SYMMETRY_TOL {
                return Err(Error::invalid(format!(
                    "diagonal entry {} is {}, expected 1",
                    i + 1,
                    matrix[(i, i)]
                )));
            }
            for j in 0..i {
                if (matrix[(i, j)] - matrix[(j, i)]).abs() > SYMMETRY_TOL {
                    return Err(Error::invalid(format!(
                        "matrix is not symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }

        let is_diagonal = (0..p).all(|j| (0..p).all(|i| i == j || matrix[(i, j)] == 0.0));
        let (eigenvalues, eigenvectors) = if is_diagonal {
            (matrix.diagonal(), DMatrix::identity(p, p))
        } else {
            let eig = SymmetricEigen::new(matrix.clone());
            (eig.eigenvalues, eig.eigenvectors)
        };
        let min_eigenvalue = eigenvalues.min();
        if !(min_eigenvalue > ORACLE_EIGEN_FLOOR) {
            return Err(Error::NearSingular {
                min_eigenvalue,
                floor: ORACLE_EIGEN_FLOOR,
            });
        }
        let cholesky = Cholesky::new(matrix.clone())
            .ok_or_else(|| Error::NotPositiveDefinite("Cholesky factorization failed".into()))?
            .unpack();
        Ok(Self {
            matrix,
            eigenvalues,
            eigenvectors,
            cholesky,
        })
    }

    pub fn identity(p: usize) -> Self {
        Self::new(DMatrix::identity(p, p)).expect("identity is a valid correlation matrix")
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Lower-triangular `L` with `L L^T = P`.
    pub fn cholesky_factor(&self) -> &DMatrix<f64> {
        &self.cholesky
    }

    /// `P^alpha v` through the stored eigendecomposition.
    pub fn power_apply(&self, alpha: f64, v: &DVector<f64>) -> Result<DVector<f64>> {
        if !alpha.is_finite() {
            return Err(Error::invalid(format!("exponent {alpha} is not finite")));
        }
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: v.len(),
            });
        }
        let q = &self.eigenvectors;
        let coeffs = q.tr_mul(v).component_mul(&self.eigenvalues.map(|l| l.powf(alpha)));
        Ok(q * coeffs)
    }
}
