//! Stage wiring: ingest, filter, annotate, accumulate, test, report.
//!
//! Every stage is also callable on its own so the command line can run them
//! separately with the annotation dump as the intermediate file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dump::{write_annotation_dump, AnnotationDump, DumpError, VideoScope};
use crate::filter::{filter_frame, FilterConfig, FilterReport, FilterVerdict, RejectReason, VideoFilterStats};
use crate::ingest::{resolve_sources, CorpusManifest, HandSide, ManifestError, SkippedFile, VideoSource};
use crate::phonology::{annotate_frame, LocationConfig, PhonologicalAnnotation, PhonologyConfig};
use crate::report::{analyze, render_outputs, AnalysisResults, RenderOptions, RenderedFiles, ReportError};
use crate::stats::{SignificanceConfig, TableSet};
use crate::ConfigError;

pub const RUN_MANIFEST_FILE: &str = "run_manifest.json";
pub const FILTER_REPORT_TEXT: &str = "filter_report.txt";
pub const FILTER_REPORT_JSON: &str = "filter_report.json";
pub const ANNOTATION_DUMP_FILE: &str = "annotations.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputOptions {
    pub heatmaps: bool,
    pub annotation_dump: bool,
}

impl Default for OutputOptions {
    fn default() -> Self {
        Self { heatmaps: true, annotation_dump: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub manifest: PathBuf,
    pub output_dir: PathBuf,
    pub filter: FilterConfig,
    pub location: LocationConfig,
    pub stats: SignificanceConfig,
    pub outputs: OutputOptions,
    /// Size of the worker pool for parsing and annotation.
    pub workers: usize,
    pub warn_acceptance_below: Option<f64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            manifest: PathBuf::new(),
            output_dir: PathBuf::from("signphon-out"),
            filter: FilterConfig::default(),
            location: LocationConfig::default(),
            stats: SignificanceConfig::default(),
            outputs: OutputOptions::default(),
            workers: default_workers(),
            warn_acceptance_below: None,
        }
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::new(format!("invalid configuration: {e}")))
    }

    /// Reads a config file; relative paths inside it are taken relative to its directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|e| ConfigError::new(format!("{}: {e}", path.display())))?;
        let mut config = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut config.manifest, &mut config.output_dir] {
            if !p.as_os_str().is_empty() && p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(config)
    }

    pub fn phonology(&self) -> PhonologyConfig {
        PhonologyConfig::new(self.filter.min_keypoint_confidence, self.location)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.manifest.as_os_str().is_empty() {
            return Err(ConfigError::new("no manifest given"));
        }
        self.validate_settings()
    }

    /// Everything except the manifest, for stages that start from a dump.
    pub fn validate_settings(&self) -> Result<(), ConfigError> {
        if self.output_dir.as_os_str().is_empty() {
            return Err(ConfigError::new("no output directory given"));
        }
        if self.workers == 0 {
            return Err(ConfigError::new("workers must be at least 1"));
        }
        if let Some(w) = self.warn_acceptance_below {
            if !(0.0..=1.0).contains(&w) {
                return Err(ConfigError::new(format!("warn_acceptance_below {w} must lie in [0, 1]")));
            }
        }
        self.filter.validate()?;
        self.location.validate()?;
        self.stats.validate()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    Dump(#[from] DumpError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("worker pool: {0}")]
    Pool(String),
}

impl PipelineError {
    /// 1 for configuration problems, 2 for manifest and data problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 1,
            _ => 2,
        }
    }
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io { path: path.to_path_buf(), source }
}

/// Output of the annotation stage.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnnotationOutcome {
    pub tables: TableSet,
    pub filter: FilterReport,
    pub skipped_files: Vec<SkippedFile>,
    /// Accepted hands that still could not be binned.
    pub skipped_hands: u64,
    /// Filled only when requested.
    pub dump: AnnotationDump,
}

#[derive(Default)]
struct Partial {
    tables: TableSet,
    videos: BTreeMap<usize, VideoFilterStats>,
    skipped_files: Vec<SkippedFile>,
    skipped_hands: u64,
    annotations: Vec<PhonologicalAnnotation>,
}

impl Partial {
    // Concatenation keeps order because rayon reduces adjacent pieces.
    fn merge(mut self, other: Partial) -> Partial {
        self.tables = self.tables.merge(other.tables);
        for (i, stats) in other.videos {
            self.videos.entry(i).or_default().merge(&stats);
        }
        self.skipped_files.extend(other.skipped_files);
        self.skipped_hands += other.skipped_hands;
        self.annotations.extend(other.annotations);
        self
    }
}

fn worker_pool(workers: usize) -> Result<rayon::ThreadPool, PipelineError> {
    rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| PipelineError::Pool(e.to_string()))
}

fn process_file(
    sources: &[VideoSource],
    (v, i): (usize, usize),
    filter: &FilterConfig,
    phonology: &PhonologyConfig,
    keep_annotations: bool,
) -> Partial {
    let source = &sources[v];
    let mut part = Partial::default();
    let stats = part.videos.entry(v).or_default();
    stats.files = 1;
    match source.read_frame(i) {
        Err(e) => {
            stats.parse_failures = 1;
            log::warn!("skipping {}: {e}", source.files[i].display());
            part.skipped_files.push(SkippedFile {
                corpus_id: source.corpus_id.clone(),
                video_id: source.video_id.clone(),
                path: source.files[i].clone(),
                reason: e.to_string(),
            });
        }
        Ok(frame) => {
            let verdict = filter_frame(&frame, filter);
            stats.record(&verdict);
            if let FilterVerdict::Accept(_) = verdict {
                let result = annotate_frame(&source.corpus_id, &source.video_id, &frame, &verdict, phonology);
                part.skipped_hands = u64::from(result.skipped_hands);
                part.tables.extend(&result.annotations);
                if keep_annotations {
                    part.annotations = result.annotations;
                }
            }
        }
    }
    part
}

fn registered_tables(manifest: &CorpusManifest) -> TableSet {
    let mut tables = TableSet::new();
    for c in &manifest.corpora {
        tables.register(&c.id, c.videos.iter().map(|v| v.id.as_str()));
    }
    tables
}

/// Parses, filters and annotates every frame named by `manifest` on a pool of
/// `workers` threads. The result does not depend on `workers`.
pub fn annotate_corpus(
    manifest: &CorpusManifest,
    filter: &FilterConfig,
    phonology: &PhonologyConfig,
    workers: usize,
    keep_annotations: bool,
) -> Result<AnnotationOutcome, PipelineError> {
    let sources = resolve_sources(manifest)?;
    let jobs: Vec<(usize, usize)> =
        sources.iter().enumerate().flat_map(|(v, s)| (0..s.files.len()).map(move |i| (v, i))).collect();
    let pool = worker_pool(workers.max(1))?;
    let partial = pool.install(|| {
        jobs.par_iter()
            .map(|&job| process_file(&sources, job, filter, phonology, keep_annotations))
            .reduce(Partial::default, Partial::merge)
    });

    let videos = sources
        .iter()
        .enumerate()
        .map(|(v, s)| {
            let mut stats = partial.videos.get(&v).cloned().unwrap_or_default();
            stats.corpus_id = s.corpus_id.clone();
            stats.video_id = s.video_id.clone();
            stats
        })
        .collect();
    let scopes =
        sources.iter().map(|s| VideoScope { corpus_id: s.corpus_id.clone(), video_id: s.video_id.clone() }).collect();
    Ok(AnnotationOutcome {
        tables: registered_tables(manifest).merge(partial.tables),
        filter: FilterReport { videos, warn_acceptance_below: None },
        skipped_files: partial.skipped_files,
        skipped_hands: partial.skipped_hands,
        dump: AnnotationDump { scopes, annotations: partial.annotations },
    })
}

/// Tables for a dump, including every scope it lists.
pub fn tables_from_dump(dump: &AnnotationDump) -> TableSet {
    let mut tables = TableSet::new();
    for s in &dump.scopes {
        tables.register(&s.corpus_id, [s.video_id.as_str()]);
    }
    tables.extend(&dump.annotations);
    tables
}

/// Tests and renders `tables` below `out_dir`.
pub fn report_tables(
    tables: &TableSet,
    stats: &SignificanceConfig,
    out_dir: &Path,
    options: &RenderOptions,
) -> Result<(AnalysisResults, RenderedFiles), PipelineError> {
    let results = analyze(tables, stats);
    let files = render_outputs(&results, out_dir, options)?;
    Ok((results, files))
}

pub fn write_filter_report(report: &FilterReport, out_dir: &Path) -> Result<Vec<PathBuf>, PipelineError> {
    fs::create_dir_all(out_dir).map_err(io_error(out_dir))?;
    let text = out_dir.join(FILTER_REPORT_TEXT);
    fs::write(&text, report.to_text_table()).map_err(io_error(&text))?;
    let json = out_dir.join(FILTER_REPORT_JSON);
    fs::write(&json, to_json(report)).map_err(io_error(&json))?;
    Ok(vec![PathBuf::from(FILTER_REPORT_TEXT), PathBuf::from(FILTER_REPORT_JSON)])
}

pub fn write_dump_file(dump: &AnnotationDump, path: &Path) -> Result<(), PipelineError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_error(parent))?;
    }
    let file = fs::File::create(path).map_err(io_error(path))?;
    write_annotation_dump(std::io::BufWriter::new(file), dump)?;
    Ok(())
}

fn to_json(value: &impl Serialize) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("plain data serializes");
    bytes.push(b'\n');
    bytes
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationCount {
    pub corpus_id: String,
    pub hand: HandSide,
    pub annotations: u64,
}

/// Totals of one run. Everything except `timestamp_unix` is a function of the
/// configuration and the input files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub timestamp_unix: u64,
    pub config: PipelineConfig,
    pub files: u64,
    pub parse_failures: u64,
    pub frames_read: u64,
    pub frames_accepted: u64,
    pub rejected: BTreeMap<RejectReason, u64>,
    pub skipped_hands: u64,
    pub annotations: Vec<AnnotationCount>,
    pub skipped_files: Vec<SkippedFile>,
    pub low_acceptance_videos: Vec<VideoScope>,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    fn new(config: &PipelineConfig, outcome: &AnnotationOutcome, outputs: Vec<PathBuf>) -> Self {
        let totals = outcome.filter.totals();
        let annotations = outcome
            .tables
            .corpus_tables()
            .map(|t| AnnotationCount {
                corpus_id: t.scope.corpus_id.clone(),
                hand: t.scope.hand,
                annotations: t.grand_total(),
            })
            .collect();
        Self {
            timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            config: config.clone(),
            files: totals.files,
            parse_failures: totals.parse_failures,
            frames_read: totals.parsed(),
            frames_accepted: totals.accepted,
            rejected: RejectReason::ALL.iter().map(|&r| (r, totals.rejected(r))).collect(),
            skipped_hands: outcome.skipped_hands,
            annotations,
            skipped_files: outcome.skipped_files.clone(),
            low_acceptance_videos: outcome
                .filter
                .low_acceptance_videos()
                .into_iter()
                .map(|v| VideoScope { corpus_id: v.corpus_id.clone(), video_id: v.video_id.clone() })
                .collect(),
            outputs,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub manifest: RunManifest,
    pub results: AnalysisResults,
}

/// Runs every stage and writes the full output tree plus the run manifest.
pub fn run_pipeline(config: &PipelineConfig) -> Result<RunSummary, PipelineError> {
    config.validate()?;
    let manifest = CorpusManifest::load(&config.manifest)?;
    let mut outcome = annotate_corpus(
        &manifest,
        &config.filter,
        &config.phonology(),
        config.workers,
        config.outputs.annotation_dump,
    )?;
    outcome.filter.warn_acceptance_below = config.warn_acceptance_below;
    for v in outcome.filter.low_acceptance_videos() {
        log::warn!("low acceptance in {}/{}: {:.4}", v.corpus_id, v.video_id, v.acceptance_ratio().unwrap_or_default());
    }

    let out = &config.output_dir;
    let mut outputs = write_filter_report(&outcome.filter, out)?;
    if config.outputs.annotation_dump {
        write_dump_file(&outcome.dump, &out.join(ANNOTATION_DUMP_FILE))?;
        outputs.push(PathBuf::from(ANNOTATION_DUMP_FILE));
    }
    let (results, rendered) =
        report_tables(&outcome.tables, &config.stats, out, &RenderOptions { heatmaps: config.outputs.heatmaps })?;
    outputs.extend(rendered.files);
    outputs.push(PathBuf::from(RUN_MANIFEST_FILE));

    let run = RunManifest::new(config, &outcome, outputs);
    let path = out.join(RUN_MANIFEST_FILE);
    fs::write(&path, to_json(&run)).map_err(io_error(&path))?;
    Ok(RunSummary { manifest: run, results })
}
