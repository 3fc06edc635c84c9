use std::fs;
use std::path::Path;

use signphon::ingest::{load_corpus, CorpusManifest};
use signphon::pipeline::{run_pipeline, PipelineConfig};
use signphon::synth::{generate_corpus, SynthPlan, SynthSpec};

fn synth(dir: &Path, corpora: &[(&str, usize)]) -> CorpusManifest {
    let plan = SynthPlan {
        corpora: corpora.iter().enumerate().map(|(i, (id, frames))| SynthSpec::new(id, i as u64, *frames)).collect(),
    };
    generate_corpus(&plan, dir).unwrap().manifest
}

#[test]
fn malformed_file_is_skipped_and_the_rest_stream() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth(dir.path(), &[("A", 10)]);
    let video_dir = &manifest.corpora[0].videos[0].frames;
    let mut files: Vec<_> = fs::read_dir(video_dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    fs::write(&files[4], b"{\"people\": [").unwrap();

    let mut frames = load_corpus(&manifest).unwrap();
    let ids: Vec<u64> = frames.by_ref().map(|f| f.frame.frame_id).collect();
    assert_eq!(ids, vec![0, 1, 2, 3, 5, 6, 7, 8, 9]);
    assert_eq!(frames.total_files(), 10);
    assert_eq!(frames.skipped().len(), 1);
    assert_eq!(frames.skipped()[0].path, files[4]);
}

#[test]
fn malformed_files_never_abort_the_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    synth(&dir.path().join("data"), &[("A", 10)]);
    let video_dir = dir.path().join("data/A/video-000");
    fs::write(video_dir.join("video-000_000000000003_keypoints.json"), b"not json").unwrap();
    let config = PipelineConfig {
        manifest: dir.path().join("data/manifest.toml"),
        output_dir: dir.path().join("out"),
        workers: 2,
        ..Default::default()
    };
    let run = run_pipeline(&config).unwrap().manifest;
    assert_eq!((run.files, run.parse_failures, run.frames_read), (10, 1, 9));
    assert_eq!(run.skipped_files.len(), 1);
}

#[test]
fn empty_video_directory() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth(dir.path(), &[("A", 0)]);
    let mut frames = load_corpus(&manifest).unwrap();
    assert!(frames.next().is_none());
    assert_eq!(frames.total_files(), 0);

    let config = PipelineConfig {
        manifest: dir.path().join("manifest.toml"),
        output_dir: dir.path().join("out"),
        ..Default::default()
    };
    let summary = run_pipeline(&config).unwrap();
    assert_eq!(summary.results.frequencies.len(), 0);
    assert_eq!(summary.results.empty_scopes.len(), 4);
    let csv = fs::read_to_string(dir.path().join("out/frequencies/A__left.csv")).unwrap();
    assert!(csv.starts_with("# empty"));
}

#[test]
fn two_corpora_stream_in_manifest_order() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth(dir.path(), &[("B", 3), ("A", 3)]);
    let frames: Vec<_> = load_corpus(&manifest).unwrap().map(|f| (f.corpus_id, f.frame.frame_id)).collect();
    let want: Vec<(String, u64)> =
        [("B", 0), ("B", 1), ("B", 2), ("A", 0), ("A", 1), ("A", 2)].map(|(c, i)| (c.to_string(), i)).into();
    assert_eq!(frames, want);
}

#[test]
fn missing_directory_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let mut manifest = synth(dir.path(), &[("A", 2)]);
    manifest.corpora[0].videos[0].frames = dir.path().join("gone");
    let err = load_corpus(&manifest).err().expect("missing directory");
    assert!(err.to_string().contains("gone"), "{err}");
}
