use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use signphon::dump::read_annotation_dump;
use signphon::ingest::CorpusManifest;
use signphon::pipeline::{
    annotate_corpus, report_tables, run_pipeline, tables_from_dump, write_dump_file, write_filter_report,
    PipelineConfig, PipelineError,
};
use signphon::report::{compare_languages, CorpusComparison, RenderOptions};
use signphon::stats::SignificanceReport;
use signphon::synth::{generate_corpus, SynthError, SynthPlan, SynthSpec};
use signphon::ConfigError;

/// Output directory used when neither the config file nor a flag sets one.
const OUTPUT_DIR_ENV: &str = "SIGNPHON_OUTPUT_DIR";

#[derive(Parser)]
#[command(name = "signphon", version, about = "Phonological co-dependence analysis of sign-language pose data")]
struct Cli {
    /// Log progress (repeat for more detail). RUST_LOG takes precedence.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every stage and write the full report tree.
    Run(RunArgs),
    /// Parse and filter only; print the per-video filter report.
    IngestCheck(RunArgs),
    /// Write the annotation dump without running statistics.
    Annotate {
        #[command(flatten)]
        run: RunArgs,
        /// Dump file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Statistics and reports from an annotation dump.
    Stats {
        #[arg(long)]
        dump: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Generate a synthetic corpus with a manifest and ground truth.
    Synth(SynthArgs),
    /// Compare two significance files of the same hand.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Also write the comparison as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long, env = OUTPUT_DIR_ENV)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    min_confidence: Option<f64>,
    #[arg(long)]
    min_hand_points: Option<usize>,
    /// Neutral-space threshold as a fraction of the image diagonal.
    #[arg(long)]
    threshold_fraction: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    min_expected: Option<f64>,
    #[arg(long)]
    continuity_correction: bool,
    #[arg(long)]
    no_heatmaps: bool,
    /// Also write annotations.csv next to the reports.
    #[arg(long)]
    dump_annotations: bool,
    #[arg(long)]
    warn_acceptance_below: Option<f64>,
}

impl RunArgs {
    fn config(&self) -> Result<PipelineConfig, ConfigError> {
        let mut c = match &self.config {
            Some(path) => PipelineConfig::load(path)?,
            None => PipelineConfig::default(),
        };
        if let Some(v) = &self.manifest {
            c.manifest = v.clone();
        }
        if let Some(v) = &self.output_dir {
            c.output_dir = v.clone();
        }
        if let Some(v) = self.workers {
            c.workers = v;
        }
        if let Some(v) = self.min_confidence {
            c.filter.min_keypoint_confidence = v;
        }
        if let Some(v) = self.min_hand_points {
            c.filter.min_valid_hand_points = v;
        }
        if let Some(v) = self.threshold_fraction {
            c.location.threshold_fraction = v;
        }
        if let Some(v) = self.alpha {
            c.stats.alpha = v;
        }
        if let Some(v) = self.min_expected {
            c.stats.min_expected = v;
        }
        if let Some(v) = self.warn_acceptance_below {
            c.warn_acceptance_below = Some(v);
        }
        c.stats.continuity_correction |= self.continuity_correction;
        c.outputs.heatmaps &= !self.no_heatmaps;
        c.outputs.annotation_dump |= self.dump_annotations;
        Ok(c)
    }
}

#[derive(Args)]
struct SynthArgs {
    /// TOML plan with one [[corpus]] table per corpus. Without it a single
    /// corpus is built from the flags below.
    #[arg(long)]
    plan: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "synth")]
    corpus: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    frames: usize,
    #[arg(long, default_value_t = 1)]
    videos: usize,
    #[arg(long, default_value_t = 0.0)]
    noise_px: f64,
}

impl SynthArgs {
    fn plan(&self) -> Result<SynthPlan, Failure> {
        match &self.plan {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
                SynthPlan::from_toml_str(&text).map_err(|e| Failure::config(e.to_string()))
            }
            None => {
                let mut spec = SynthSpec::new(&self.corpus, self.seed, self.frames);
                spec.videos = self.videos;
                spec.noise_px = self.noise_px;
                Ok(SynthPlan { corpora: vec![spec] })
            }
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }

    fn data(message: impl std::fmt::Display) -> Self {
        Self { code: 2, message: message.to_string() }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Self { code: e.exit_code() as u8, message: e.to_string() }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::config(e.to_string())
    }
}

fn validated(run: &RunArgs) -> Result<PipelineConfig, Failure> {
    let c = run.config()?;
    c.validate()?;
    Ok(c)
}

fn load_manifest(path: &Path) -> Result<CorpusManifest, Failure> {
    CorpusManifest::load(path).map_err(Failure::data)
}

fn read_report(path: &Path) -> Result<SignificanceReport, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
    serde_json::from_slice(&bytes).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run(run) => {
            let summary = run_pipeline(&validated(&run)?)?;
            let m = &summary.manifest;
            println!(
                "{} files, {} accepted, {} annotations; reports in {}",
                m.files,
                m.frames_accepted,
                m.annotations.iter().map(|a| a.annotations).sum::<u64>(),
                m.config.output_dir.display()
            );
        }
        Command::IngestCheck(run) => {
            let c = validated(&run)?;
            let manifest = load_manifest(&c.manifest)?;
            let mut outcome = annotate_corpus(&manifest, &c.filter, &c.phonology(), c.workers, false)?;
            outcome.filter.warn_acceptance_below = c.warn_acceptance_below;
            print!("{}", outcome.filter.to_text_table());
            if run.output_dir.is_some() || run.config.is_some() {
                write_filter_report(&outcome.filter, &c.output_dir)?;
            }
        }
        Command::Annotate { run, out } => {
            let c = validated(&run)?;
            let manifest = load_manifest(&c.manifest)?;
            let outcome = annotate_corpus(&manifest, &c.filter, &c.phonology(), c.workers, true)?;
            write_dump_file(&outcome.dump, &out)?;
            println!("{} annotations written to {}", outcome.dump.annotations.len(), out.display());
        }
        Command::Stats { dump, run } => {
            let c = run.config()?;
            c.validate_settings()?;
            let file = fs::File::open(&dump).map_err(|e| Failure::data(format!("{}: {e}", dump.display())))?;
            let parsed = read_annotation_dump(std::io::BufReader::new(file)).map_err(Failure::data)?;
            let tables = tables_from_dump(&parsed);
            report_tables(&tables, &c.stats, &c.output_dir, &RenderOptions { heatmaps: c.outputs.heatmaps })?;
            println!("reports in {}", c.output_dir.display());
        }
        Command::Synth(args) => {
            let plan = args.plan()?;
            let out = generate_corpus(&plan, &args.out).map_err(|e| match e {
                SynthError::Io { .. } => Failure::data(e),
                _ => Failure::config(e.to_string()),
            })?;
            println!(
                "{} annotations planned; manifest at {}",
                out.truth.annotations.len(),
                out.manifest_path.display()
            );
        }
        Command::Compare { a, b, out } => {
            let (ra, rb) = (read_report(&a)?, read_report(&b)?);
            let c = compare_languages(&ra, &rb).map_err(Failure::data)?;
            let text =
                CorpusComparison { corpus_a: c.corpus_a.clone(), corpus_b: c.corpus_b.clone(), hands: vec![c.clone()] }
                    .to_text();
            print!("{text}");
            if let Some(path) = out {
                let mut bytes = serde_json::to_vec_pretty(&c).expect("comparison serializes");
                bytes.push(b'\n');
                fs::write(&path, bytes).map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
