//! Orientation x location contingency tables and per-cell post-hoc
//! chi-square tests with Bonferroni adjustment.

mod posthoc;
mod significance;
pub mod special;
mod table;

pub use posthoc::{chi_square_2x2, post_hoc_decompose, ChiSquare, PostHocTable};
pub use significance::{
    significance_map, Direction, SignificanceCell, SignificanceConfig, SignificanceReport, TableStatus,
};
pub use table::{accumulate, ContingencyTable, Counts, TableScope, TableSet, COLS, ROWS};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StatsError {
    #[error("table {0} has no observations")]
    EmptyTable(String),
    #[error("cannot merge table {left} with table {right}")]
    ScopeMismatch { left: String, right: String },
}
