use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::ReportError;
use crate::ingest::HandSide;
use crate::phonology::Cell;
use crate::stats::SignificanceReport;

/// Over-represented cells of two corpora for one hand, split three ways.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanguageComparison {
    pub corpus_a: String,
    pub corpus_b: String,
    pub hand: HandSide,
    pub alpha: f64,
    pub shared: BTreeSet<Cell>,
    pub only_a: BTreeSet<Cell>,
    pub only_b: BTreeSet<Cell>,
}

pub fn compare_languages(a: &SignificanceReport, b: &SignificanceReport) -> Result<LanguageComparison, ReportError> {
    if a.scope.hand != b.scope.hand {
        return Err(ReportError::HandMismatch(a.scope.hand.to_string(), b.scope.hand.to_string()));
    }
    if a.alpha != b.alpha {
        return Err(ReportError::AlphaMismatch(a.alpha, b.alpha));
    }
    let set_a: BTreeSet<Cell> = a.over_represented().collect();
    let set_b: BTreeSet<Cell> = b.over_represented().collect();
    Ok(LanguageComparison {
        corpus_a: a.scope.corpus_id.clone(),
        corpus_b: b.scope.corpus_id.clone(),
        hand: a.scope.hand,
        alpha: a.alpha,
        shared: set_a.intersection(&set_b).copied().collect(),
        only_a: set_a.difference(&set_b).copied().collect(),
        only_b: set_b.difference(&set_a).copied().collect(),
    })
}

/// Both hands of two corpora.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusComparison {
    pub corpus_a: String,
    pub corpus_b: String,
    pub hands: Vec<LanguageComparison>,
}

impl CorpusComparison {
    pub fn file_stem(&self) -> String {
        format!("{}__vs__{}", self.corpus_a, self.corpus_b)
    }

    pub fn to_text(&self) -> String {
        let cells = |s: &BTreeSet<Cell>| {
            if s.is_empty() {
                "-".to_string()
            } else {
                s.iter().map(Cell::to_string).collect::<Vec<_>>().join(" ")
            }
        };
        let mut out = format!("over-represented co-dependences: {} vs {}\n", self.corpus_a, self.corpus_b);
        for h in &self.hands {
            let _ = writeln!(out, "\n[{} hand, alpha {}]", h.hand, h.alpha);
            let _ = writeln!(out, "shared:      {}", cells(&h.shared));
            let _ = writeln!(out, "only {}: {}", self.corpus_a, cells(&h.only_a));
            let _ = writeln!(out, "only {}: {}", self.corpus_b, cells(&h.only_b));
        }
        out
    }
}

/// Pairs up the per-hand reports of two corpora by hand.
pub fn compare_corpora(
    corpus_a: &str,
    corpus_b: &str,
    reports_a: &[SignificanceReport],
    reports_b: &[SignificanceReport],
) -> Result<CorpusComparison, ReportError> {
    let mut hands = Vec::new();
    for hand in HandSide::ALL {
        let find = |rs: &[SignificanceReport]| rs.iter().find(|r| r.scope.hand == hand).cloned();
        if let (Some(a), Some(b)) = (find(reports_a), find(reports_b)) {
            hands.push(compare_languages(&a, &b)?);
        }
    }
    Ok(CorpusComparison { corpus_a: corpus_a.into(), corpus_b: corpus_b.into(), hands })
}
