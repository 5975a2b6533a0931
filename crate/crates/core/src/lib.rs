//! Feature ranking with correlation-adjusted t-scores (cat scores).
//!
//! The crate covers the whole pipeline: two-group summary statistics,
//! shrinkage estimation of variances and correlations, cat scores computed
//! through a low-rank matrix-power identity, gene-set scores, a simulation
//! harness that measures ranking quality, and the tab-separated file formats
//! used by the command-line tool.

pub mod catscore;
pub mod error;
pub mod estimators;
pub mod io;
pub mod pipeline;
pub mod simharness;

pub use error::{Error, Result};
