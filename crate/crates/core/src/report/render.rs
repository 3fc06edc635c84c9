//! Output tree:
//!
//! ```text
//! results.json                          everything below in one document
//! frequencies/<corpus>__<hand>.csv      and <corpus>__<video>__<hand>.csv
//! significance/<corpus>__<hand>.json    plus a .csv with one row per cell
//! comparisons/<a>__vs__<b>.json         plus a .txt summary
//! heatmaps/<stem>__frequency.svg        and <corpus>__<hand>__significance.svg
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::svg::{frequency_heatmap, significance_heatmap};
use super::{AnalysisResults, FrequencyMatrix, ReportError};
use crate::phonology::{LocationBin, OrientationBin};
use crate::stats::{SignificanceReport, TableScope, TableStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RenderOptions {
    pub heatmaps: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self { heatmaps: true }
    }
}

/// Paths written, relative to the output directory, in write order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RenderedFiles {
    pub files: Vec<PathBuf>,
}

struct Writer<'a> {
    root: &'a Path,
    written: Vec<PathBuf>,
}

impl Writer<'_> {
    fn write(&mut self, relative: impl AsRef<Path>, bytes: &[u8]) -> Result<(), ReportError> {
        let relative = relative.as_ref();
        let path = self.root.join(relative);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|source| ReportError::Io { path: parent.to_path_buf(), source })?;
        }
        fs::write(&path, bytes).map_err(|source| ReportError::Io { path: path.clone(), source })?;
        self.written.push(relative.to_path_buf());
        Ok(())
    }

    fn write_json(&mut self, relative: impl AsRef<Path>, value: &impl Serialize) -> Result<(), ReportError> {
        let mut bytes = serde_json::to_vec_pretty(value).expect("report values serialize");
        bytes.push(b'\n');
        self.write(relative, &bytes)
    }
}

fn header_row(first: &str) -> Vec<String> {
    std::iter::once(first.to_string()).chain(LocationBin::ALL.iter().map(|l| l.to_string())).collect()
}

fn csv_bytes(comment: Option<&str>, rows: Vec<Vec<String>>) -> Vec<u8> {
    let mut out = Vec::new();
    if let Some(c) = comment {
        out.extend_from_slice(format!("# {c}\n").as_bytes());
    }
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.write_record(&row).expect("in-memory csv");
    }
    w.into_inner().expect("in-memory csv")
}

fn frequency_csv(m: &FrequencyMatrix) -> Vec<u8> {
    let mut rows = vec![header_row("orientation")];
    for (o, values) in OrientationBin::ALL.iter().zip(&m.values) {
        rows.push(std::iter::once(o.to_string()).chain(values.iter().map(|v| v.to_string())).collect());
    }
    csv_bytes(Some(&format!("relative frequencies {} n={}", m.scope, m.total)), rows)
}

fn empty_frequency_csv(scope: &TableScope) -> Vec<u8> {
    csv_bytes(Some(&format!("empty: no annotations for {scope}")), vec![header_row("orientation")])
}

fn significance_csv(r: &SignificanceReport) -> Vec<u8> {
    let header = [
        "orientation",
        "location",
        "count",
        "a",
        "b",
        "c",
        "d",
        "expected",
        "chi2",
        "p_raw",
        "p_adjusted",
        "verdict",
        "direction",
    ];
    let mut rows = vec![header.iter().map(|s| s.to_string()).collect::<Vec<_>>()];
    for c in &r.cells {
        let direction = serde_json::to_value(c.direction).expect("enum serializes");
        rows.push(vec![
            c.cell.orientation.to_string(),
            c.cell.location.to_string(),
            c.a.to_string(),
            c.a.to_string(),
            c.b.to_string(),
            c.c.to_string(),
            c.d.to_string(),
            c.expected_a.to_string(),
            c.chi2.to_string(),
            c.p_raw.to_string(),
            c.p_adjusted.to_string(),
            c.verdict().to_string(),
            direction.as_str().unwrap_or_default().to_string(),
        ]);
    }
    let comment = match r.status {
        TableStatus::Ok => format!(
            "significance {} n={} tests={} alpha={} min_expected={}",
            r.scope, r.grand_total, r.tests, r.alpha, r.min_expected
        ),
        TableStatus::Empty => format!("empty: no annotations for {}", r.scope),
    };
    csv_bytes(Some(&comment), rows)
}

/// Writes every report file below `out_dir`. Identical results and options
/// give identical bytes.
pub fn render_outputs(
    results: &AnalysisResults,
    out_dir: &Path,
    options: &RenderOptions,
) -> Result<RenderedFiles, ReportError> {
    let mut w = Writer { root: out_dir, written: Vec::new() };
    w.write_json("results.json", results)?;

    for m in &results.frequencies {
        w.write(format!("frequencies/{}.csv", m.scope.file_stem()), &frequency_csv(m))?;
    }
    for scope in &results.empty_scopes {
        log::warn!("no annotations for {scope}");
        w.write(format!("frequencies/{}.csv", scope.file_stem()), &empty_frequency_csv(scope))?;
    }
    for r in &results.significance {
        let stem = r.scope.file_stem();
        w.write_json(format!("significance/{stem}.json"), r)?;
        w.write(format!("significance/{stem}.csv"), &significance_csv(r))?;
    }
    for c in &results.comparisons {
        w.write_json(format!("comparisons/{}.json", c.file_stem()), c)?;
        w.write(format!("comparisons/{}.txt", c.file_stem()), c.to_text().as_bytes())?;
    }
    if options.heatmaps {
        for m in &results.frequencies {
            w.write(format!("heatmaps/{}__frequency.svg", m.scope.file_stem()), frequency_heatmap(m).as_bytes())?;
        }
        for r in results.significance.iter().filter(|r| r.status == TableStatus::Ok) {
            w.write(format!("heatmaps/{}__significance.svg", r.scope.file_stem()), significance_heatmap(r).as_bytes())?;
        }
    }
    Ok(RenderedFiles { files: w.written })
}
