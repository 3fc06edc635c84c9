use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::ingest::HandSide;
use crate::phonology::{Cell, LocationBin, OrientationBin, PhonologicalAnnotation};

pub const ROWS: usize = OrientationBin::ALL.len();
pub const COLS: usize = LocationBin::ALL.len();

pub type Counts = [[u64; COLS]; ROWS];

/// What a table counts: one hand of one corpus, optionally narrowed to a video.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TableScope {
    pub corpus_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub video_id: Option<String>,
    pub hand: HandSide,
}

impl TableScope {
    pub fn corpus(corpus_id: &str, hand: HandSide) -> Self {
        Self { corpus_id: corpus_id.into(), video_id: None, hand }
    }

    pub fn video(corpus_id: &str, video_id: &str, hand: HandSide) -> Self {
        Self { corpus_id: corpus_id.into(), video_id: Some(video_id.into()), hand }
    }

    /// File-name stem, e.g. `ASL__left` or `ASL__song-1__left`.
    pub fn file_stem(&self) -> String {
        match &self.video_id {
            Some(v) => format!("{}__{}__{}", self.corpus_id, v, self.hand),
            None => format!("{}__{}", self.corpus_id, self.hand),
        }
    }
}

impl std::fmt::Display for TableScope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.video_id {
            Some(v) => write!(f, "{}/{}/{}", self.corpus_id, v, self.hand),
            None => write!(f, "{}/{}", self.corpus_id, self.hand),
        }
    }
}

/// Orientation (rows) x location (columns) occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyTable {
    pub scope: TableScope,
    counts: Counts,
}

impl ContingencyTable {
    pub fn new(scope: TableScope) -> Self {
        Self { scope, counts: [[0; COLS]; ROWS] }
    }

    pub fn from_counts(scope: TableScope, counts: Counts) -> Self {
        Self { scope, counts }
    }

    pub fn counts(&self) -> &Counts {
        &self.counts
    }

    pub fn add(&mut self, cell: Cell) {
        self.counts[cell.orientation.index()][cell.location.index()] += 1;
    }

    pub fn count(&self, cell: Cell) -> u64 {
        self.counts[cell.orientation.index()][cell.location.index()]
    }

    pub fn row_total(&self, orientation: OrientationBin) -> u64 {
        self.counts[orientation.index()].iter().sum()
    }

    pub fn col_total(&self, location: LocationBin) -> u64 {
        self.counts.iter().map(|row| row[location.index()]).sum()
    }

    pub fn grand_total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.grand_total() == 0
    }

    /// Element-wise sum. Both tables must describe the same scope.
    pub fn merge(&mut self, other: &ContingencyTable) -> Result<(), StatsError> {
        if self.scope != other.scope {
            return Err(StatsError::ScopeMismatch { left: self.scope.to_string(), right: other.scope.to_string() });
        }
        for (row, other_row) in self.counts.iter_mut().zip(&other.counts) {
            for (c, o) in row.iter_mut().zip(other_row) {
                *c += o;
            }
        }
        Ok(())
    }
}

/// Tables keyed by scope, holding corpus-level and per-video tables side by
/// side. Merging is element-wise, so partial sets built on separate workers
/// combine to the single-pass result in any order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TableSet {
    tables: BTreeMap<TableScope, ContingencyTable>,
}

impl TableSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers zero tables for both hands of a corpus and of each of its videos,
    /// so that empty scopes are still reported.
    pub fn register<'a>(&mut self, corpus_id: &str, video_ids: impl IntoIterator<Item = &'a str>) {
        let videos: Vec<&str> = video_ids.into_iter().collect();
        for hand in HandSide::ALL {
            self.ensure(TableScope::corpus(corpus_id, hand));
            for v in &videos {
                self.ensure(TableScope::video(corpus_id, v, hand));
            }
        }
    }

    fn ensure(&mut self, scope: TableScope) -> &mut ContingencyTable {
        self.tables.entry(scope.clone()).or_insert_with(|| ContingencyTable::new(scope))
    }

    pub fn record(&mut self, annotation: &PhonologicalAnnotation) {
        let cell = annotation.cell();
        self.ensure(TableScope::corpus(&annotation.corpus_id, annotation.hand)).add(cell);
        self.ensure(TableScope::video(&annotation.corpus_id, &annotation.video_id, annotation.hand)).add(cell);
    }

    pub fn merge(mut self, other: TableSet) -> TableSet {
        for (scope, table) in other.tables {
            match self.tables.get_mut(&scope) {
                Some(mine) => mine.merge(&table).expect("keys carry the scope"),
                None => {
                    self.tables.insert(scope, table);
                }
            }
        }
        self
    }

    pub fn get(&self, scope: &TableScope) -> Option<&ContingencyTable> {
        self.tables.get(scope)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ContingencyTable> {
        self.tables.values()
    }

    /// Corpus-level tables in (corpus, hand) order.
    pub fn corpus_tables(&self) -> impl Iterator<Item = &ContingencyTable> {
        self.tables.values().filter(|t| t.scope.video_id.is_none())
    }

    pub fn video_tables(&self) -> impl Iterator<Item = &ContingencyTable> {
        self.tables.values().filter(|t| t.scope.video_id.is_some())
    }

    pub fn corpus_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self.tables.keys().map(|s| s.corpus_id.as_str()).collect();
        ids.dedup();
        ids
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }
}

impl<'a> Extend<&'a PhonologicalAnnotation> for TableSet {
    fn extend<I: IntoIterator<Item = &'a PhonologicalAnnotation>>(&mut self, iter: I) {
        for a in iter {
            self.record(a);
        }
    }
}

/// Counts annotations per (corpus, hand) and per (corpus, video, hand).
pub fn accumulate<'a>(annotations: impl IntoIterator<Item = &'a PhonologicalAnnotation>) -> TableSet {
    let mut set = TableSet::new();
    set.extend(annotations);
    set
}
