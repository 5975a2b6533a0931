//! Tab-separated file formats: expression data with group labels,
//! correlation matrices, ranked score tables, Q-Q data and study curves.

mod correlation;
mod dataset;
mod format;
mod tables;

pub use correlation::{read_correlation_matrix, write_correlation_matrix};
pub use dataset::{load_dataset, write_dataset};
pub use format::format_significant;
pub use tables::{
    plotting_positions, read_ranked_table, read_study_table, write_study_table, QqData,
    RankedRow, RankedTable, StudyRow,
};
