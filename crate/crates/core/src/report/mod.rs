//! Relative-frequency matrices, significance maps and corpus comparisons.

mod compare;
mod frequency;
mod render;
mod svg;

use serde::{Deserialize, Serialize};

pub use compare::{compare_corpora, compare_languages, CorpusComparison, LanguageComparison};
pub use frequency::{relative_frequencies, FrequencyMatrix};
pub use render::{render_outputs, RenderOptions, RenderedFiles};

use crate::stats::{
    significance_map, ContingencyTable, Counts, SignificanceConfig, SignificanceReport, TableScope, TableSet,
};

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("table {0} has no observations")]
    EmptyTable(String),
    #[error("cannot compare hand {0} with hand {1}")]
    HandMismatch(String, String),
    #[error("cannot compare results at alpha {0} with results at alpha {1}")]
    AlphaMismatch(f64, f64),
    #[error("{}: {source}", path.display())]
    Io { path: std::path::PathBuf, source: std::io::Error },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRecord {
    pub scope: TableScope,
    pub grand_total: u64,
    pub counts: Counts,
}

impl From<&ContingencyTable> for TableRecord {
    fn from(t: &ContingencyTable) -> Self {
        Self { scope: t.scope.clone(), grand_total: t.grand_total(), counts: *t.counts() }
    }
}

/// Everything the reporting stage emits, in deterministic order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisResults {
    pub significance_config: SignificanceConfig,
    pub tables: Vec<TableRecord>,
    /// One per non-empty table, corpus and video scopes alike.
    pub frequencies: Vec<FrequencyMatrix>,
    /// Scopes without a single annotation.
    pub empty_scopes: Vec<TableScope>,
    /// One per (corpus, hand).
    pub significance: Vec<SignificanceReport>,
    /// One per unordered corpus pair.
    pub comparisons: Vec<CorpusComparison>,
}

/// Frequencies for every scope, significance maps per (corpus, hand) and
/// comparisons for every pair of corpora.
pub fn analyze(tables: &TableSet, config: &SignificanceConfig) -> AnalysisResults {
    let mut frequencies = Vec::new();
    let mut empty_scopes = Vec::new();
    for table in tables.iter() {
        match relative_frequencies(table) {
            Ok(m) => frequencies.push(m),
            Err(_) => empty_scopes.push(table.scope.clone()),
        }
    }
    let significance: Vec<SignificanceReport> = tables
        .corpus_tables()
        .map(|t| significance_map(t, config).unwrap_or_else(|_| SignificanceReport::empty(t.scope.clone(), config)))
        .collect();
    let corpora = tables.corpus_ids();
    let mut comparisons = Vec::new();
    for (i, a) in corpora.iter().enumerate() {
        for b in &corpora[i + 1..] {
            let side = |id: &str| significance.iter().filter(|r| r.scope.corpus_id == id).cloned().collect::<Vec<_>>();
            comparisons.push(compare_corpora(a, b, &side(a), &side(b)).expect("reports share one config"));
        }
    }
    AnalysisResults {
        significance_config: *config,
        tables: tables.iter().map(TableRecord::from).collect(),
        frequencies,
        empty_scopes,
        significance,
        comparisons,
    }
}
