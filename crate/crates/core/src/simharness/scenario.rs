use std::path::PathBuf;

use nalgebra::DMatrix;

use crate::catscore::OracleCorrelation;
use crate::error::{Error, Result};
use crate::io::read_correlation_matrix;

/// How the sign of the autoregressive parameter alternates across blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BlockSign {
    /// Block b uses `rho_b = (-1)^(b+1) * rho`, so its entries are
    /// `rho_b^|i-j|`. Every block is a valid AR(1) correlation matrix.
    #[default]
    AlternatingRho,
    /// Block b multiplies every off-diagonal entry `rho^|i-j|` by
    /// `(-1)^(b+1)`. For rho near 1 the negative blocks are indefinite and
    /// building the scenario fails.
    AlternatingBlock,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioKind {
    /// No correlation.
    Identity,
    /// Block-diagonal with autoregressive decay `rho^|i-j|` inside each block.
    AutoregressiveBlocks {
        n_blocks: usize,
        rho: f64,
        sign: BlockSign,
    },
    /// Pairwise `rho_de` among the first `de_count` features, `rho_null`
    /// among the rest, zero across the two groups.
    TwoBlocks {
        de_count: usize,
        rho_de: f64,
        rho_null: f64,
    },
    /// Tab-separated p × p correlation matrix.
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub p: usize,
    pub kind: ScenarioKind,
}

impl ScenarioSpec {
    pub fn identity(p: usize) -> Self {
        Self {
            p,
            kind: ScenarioKind::Identity,
        }
    }

    /// Ten blocks with rho = 0.99 and alternating sign.
    pub fn autoregressive(p: usize) -> Self {
        Self {
            p,
            kind: ScenarioKind::AutoregressiveBlocks {
                n_blocks: 10,
                rho: 0.99,
                sign: BlockSign::default(),
            },
        }
    }

    /// 0.7 within the differential block, 0.3 within the rest.
    pub fn two_blocks(p: usize, de_count: usize) -> Self {
        Self {
            p,
            kind: ScenarioKind::TwoBlocks {
                de_count,
                rho_de: 0.7,
                rho_null: 0.3,
            },
        }
    }

    pub fn file(p: usize, path: impl Into<PathBuf>) -> Self {
        Self {
            p,
            kind: ScenarioKind::File(path.into()),
        }
    }
}

/// Builds the correlation matrix of a scenario and checks that it is
/// positive definite.
pub fn build_scenario(spec: &ScenarioSpec) -> Result<OracleCorrelation> {
    let p = spec.p;
    if p == 0 {
        return Err(Error::invalid("scenario dimension must be positive"));
    }
    let matrix = match &spec.kind {
        ScenarioKind::Identity => DMatrix::identity(p, p),
        ScenarioKind::AutoregressiveBlocks { n_blocks, rho, sign } => {
            if *n_blocks == 0 || !p.is_multiple_of(*n_blocks) {
                return Err(Error::invalid(format!(
                    "{p} features cannot be split into {n_blocks} equal blocks"
                )));
            }
            if !(rho.abs() < 1.0) {
                return Err(Error::invalid(format!("autoregressive rho {rho} must lie in (-1, 1)")));
            }
            let size = p / n_blocks;
            let mut m = DMatrix::zeros(p, p);
            for b in 0..*n_blocks {
                let negative = b % 2 == 1;
                for i in 0..size {
                    for j in 0..size {
                        let lag = i.abs_diff(j) as i32;
                        let value = match sign {
                            BlockSign::AlternatingRho => {
                                let r = if negative { -rho } else { *rho };
                                r.powi(lag)
                            }
                            BlockSign::AlternatingBlock => {
                                if lag == 0 || !negative {
                                    rho.powi(lag)
                                } else {
                                    -rho.powi(lag)
                                }
                            }
                        };
                        m[(b * size + i, b * size + j)] = value;
                    }
                }
            }
            m
        }
        ScenarioKind::TwoBlocks {
            de_count,
            rho_de,
            rho_null,
        } => {
            if *de_count > p {
                return Err(Error::invalid(format!("block size {de_count} exceeds p = {p}")));
            }
            DMatrix::from_fn(p, p, |i, j| {
                if i == j {
                    1.0
                } else if i < *de_count && j < *de_count {
                    *rho_de
                } else if i >= *de_count && j >= *de_count {
                    *rho_null
                } else {
                    0.0
                }
            })
        }
        ScenarioKind::File(path) => {
            let m = read_correlation_matrix(path)?;
            if m.nrows() != p {
                return Err(Error::invalid(format!(
                    "{} holds a {} × {} matrix but p = {p}",
                    path.display(),
                    m.nrows(),
                    m.ncols()
                )));
            }
            m
        }
    };
    OracleCorrelation::new(matrix).map_err(|e| match e {
        Error::NearSingular { min_eigenvalue, .. } => Error::NotPositiveDefinite(format!(
            "scenario correlation has smallest eigenvalue {min_eigenvalue:e}"
        )),
        other => other,
    })
}
