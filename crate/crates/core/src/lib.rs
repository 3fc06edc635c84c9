//! Phonological annotation of 2D sign-language pose streams.
//!
//! Keypoint files are parsed ([`ingest`]), quality-filtered ([`filter`]),
//! reduced to per-hand location and extended-finger orientation bins
//! ([`phonology`]), counted into orientation x location contingency tables
//! and tested cell by cell with Bonferroni-adjusted chi-square tests
//! ([`stats`]), then rendered as frequency matrices, significance maps and
//! cross-corpus comparisons ([`report`]). [`synth`] produces synthetic
//! corpora with known ground truth, and [`pipeline`] wires the stages.

pub mod dump;
pub mod filter;
pub mod geometry;
pub mod ingest;
pub mod phonology;
pub mod pipeline;
pub mod report;
pub mod stats;
pub mod synth;

/// An invalid configuration value.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(String);

impl ConfigError {
    pub fn new(msg: impl Into<String>) -> Self {
        Self(msg.into())
    }
}
