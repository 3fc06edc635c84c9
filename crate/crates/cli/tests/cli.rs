use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const PLAN: &str = r#"
[[corpus]]
corpus_id = "ASL"
seed = 11
frames = 900
videos = 3
noise_px = 1.0
[corpus.right]
kind = "planted"
orientation = "N"
location = "neck"
probability = 0.3

[[corpus]]
corpus_id = "Libras"
seed = 12
frames = 600
videos = 2
second_person_rate = 0.1
[corpus.left]
kind = "planted"
orientation = "E"
location = "abdomen"
probability = 0.3
"#;

fn signphon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_signphon"))
        .args(args)
        .env_remove("SIGNPHON_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn ok(out: Output) -> Output {
    assert!(
        out.status.success(),
        "status {:?}\nstdout: {}\nstderr: {}",
        out.status,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Synthesizes the two-corpus plan and returns its manifest path.
fn corpus(dir: &Path) -> PathBuf {
    let plan = dir.join("plan.toml");
    fs::write(&plan, PLAN).unwrap();
    let data = dir.join("data");
    ok(signphon(&["synth", "--plan", s(&plan), "--out", s(&data)]));
    data.join("manifest.toml")
}

fn tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for e in fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                out.insert(p.strip_prefix(root).unwrap().to_path_buf(), fs::read(&p).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

#[test]
fn two_corpus_run_writes_the_full_tree() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = corpus(dir.path());
    let out = dir.path().join("out");
    ok(signphon(&["run", "--manifest", s(&manifest), "--output-dir", s(&out), "--workers", "2"]));
    for f in [
        "run_manifest.json",
        "filter_report.txt",
        "filter_report.json",
        "results.json",
        "frequencies/ASL__right.csv",
        "frequencies/ASL__video-002__left.csv",
        "significance/Libras__left.json",
        "significance/Libras__left.csv",
        "comparisons/ASL__vs__Libras.json",
        "comparisons/ASL__vs__Libras.txt",
        "heatmaps/ASL__right__significance.svg",
        "heatmaps/ASL__right__frequency.svg",
    ] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let run: serde_json::Value = serde_json::from_slice(&fs::read(out.join("run_manifest.json")).unwrap()).unwrap();
    assert_eq!(run["files"], 1500);
    assert_eq!(run["frames_read"], 1500);
    let rejected = run["rejected"]["multiple_people"].as_u64().unwrap();
    assert!(rejected > 20 && rejected < 110, "{rejected}");
    assert_eq!(run["frames_accepted"].as_u64().unwrap(), 1500 - rejected);
    let asl_right = run["annotations"]
        .as_array()
        .unwrap()
        .iter()
        .find(|a| a["corpus_id"] == "ASL" && a["hand"] == "right")
        .unwrap();
    assert_eq!(asl_right["annotations"], 900);

    let sig: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("significance/ASL__right.json")).unwrap()).unwrap();
    let neck_n = sig["cells"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["cell"]["orientation"] == "N" && c["cell"]["location"] == "neck")
        .unwrap();
    assert_eq!(neck_n["significant"], true);
    assert_eq!(neck_n["direction"], "over_represented");
    let cmp = fs::read_to_string(out.join("comparisons/ASL__vs__Libras.txt")).unwrap();
    assert!(cmp.contains("only ASL: N/neck"), "{cmp}");
}

#[test]
fn missing_frames_directory_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("manifest.toml");
    fs::write(
        &manifest,
        "[[corpus]]\nid = \"A\"\n[[corpus.video]]\nid = \"v\"\nframes = \"nowhere/v1\"\nwidth = 640\nheight = 480\n",
    )
    .unwrap();
    let out = signphon(&["run", "--manifest", s(&manifest), "--output-dir", s(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("nowhere/v1"), "{err}");
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = corpus(dir.path());
    let out = signphon(&["run", "--manifest", s(&manifest), "--output-dir", s(&dir.path().join("o")), "--alpha", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "unknown_key = 3\n").unwrap();
    assert_eq!(signphon(&["run", "--config", s(&bad)]).status.code(), Some(1));
    assert_eq!(signphon(&["run", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(signphon(&["run"]).status.code(), Some(1));
}

#[test]
fn repeated_runs_match_except_for_the_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = corpus(dir.path());
    let out = dir.path().join("out");
    let args = ["run", "--manifest", s(&manifest), "--output-dir", s(&out)];
    ok(signphon(&args));
    let first = tree(&out);
    ok(signphon(&args));
    let second = tree(&out);
    assert_eq!(first.keys().collect::<Vec<_>>(), second.keys().collect::<Vec<_>>());
    for (path, bytes) in &first {
        if path == Path::new("run_manifest.json") {
            let strip = |b: &[u8]| {
                let mut v: serde_json::Value = serde_json::from_slice(b).unwrap();
                v.as_object_mut().unwrap().remove("timestamp_unix");
                v
            };
            assert_eq!(strip(bytes), strip(&second[path]));
        } else {
            assert_eq!(bytes, &second[path], "{path:?}");
        }
    }
}

#[test]
fn staged_commands_match_the_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = corpus(dir.path());
    let (full, staged) = (dir.path().join("full"), dir.path().join("staged"));
    ok(signphon(&["run", "--manifest", s(&manifest), "--output-dir", s(&full), "--dump-annotations"]));
    let dump = dir.path().join("annotations.csv");
    ok(signphon(&["annotate", "--manifest", s(&manifest), "--out", s(&dump), "--workers", "3"]));
    assert_eq!(fs::read(&dump).unwrap(), fs::read(full.join("annotations.csv")).unwrap());
    ok(signphon(&["stats", "--dump", s(&dump), "--output-dir", s(&staged)]));

    let full_tree = tree(&full);
    let staged_tree = tree(&staged);
    let reports: Vec<_> = full_tree
        .keys()
        .filter(|p| !p.starts_with("filter_report.txt") && !p.starts_with("filter_report.json"))
        .filter(|p| *p != Path::new("run_manifest.json") && *p != Path::new("annotations.csv"))
        .collect();
    assert_eq!(reports, staged_tree.keys().collect::<Vec<_>>());
    for p in reports {
        assert_eq!(full_tree[p], staged_tree[p], "{p:?}");
    }

    // the synthetic ground truth is what the annotator recovers
    let truth = fs::read(dir.path().join("data/truth.csv")).unwrap();
    assert_eq!(fs::read(&dump).unwrap(), truth);
}

#[test]
fn heatmaps_can_be_switched_off() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = corpus(dir.path());
    let out = dir.path().join("out");
    ok(signphon(&["run", "--manifest", s(&manifest), "--output-dir", s(&out), "--no-heatmaps"]));
    assert!(out.join("results.json").is_file());
    assert!(!out.join("heatmaps").exists());
}

#[test]
fn output_dir_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = corpus(dir.path());
    let config = dir.path().join("config.toml");
    fs::write(&config, format!("manifest = {:?}\noutput_dir = \"from-config\"\n", s(&manifest))).unwrap();

    ok(signphon(&["ingest-check", "--config", s(&config)]));
    assert!(dir.path().join("from-config/filter_report.txt").is_file());

    let env_dir = dir.path().join("from-env");
    let out = Command::new(env!("CARGO_BIN_EXE_signphon"))
        .args(["ingest-check", "--config", s(&config)])
        .env("SIGNPHON_OUTPUT_DIR", &env_dir)
        .output()
        .unwrap();
    ok(out);
    assert!(env_dir.join("filter_report.txt").is_file());

    let flag_dir = dir.path().join("from-flag");
    let out = Command::new(env!("CARGO_BIN_EXE_signphon"))
        .args(["ingest-check", "--config", s(&config), "--output-dir", s(&flag_dir)])
        .env("SIGNPHON_OUTPUT_DIR", &env_dir)
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&ok(out).stdout).to_string();
    assert!(flag_dir.join("filter_report.json").is_file());
    assert!(stdout.contains("Libras") && stdout.contains("multi_people"), "{stdout}");
}

#[test]
fn compare_two_significance_files() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = corpus(dir.path());
    let out = dir.path().join("out");
    ok(signphon(&["run", "--manifest", s(&manifest), "--output-dir", s(&out), "--no-heatmaps"]));
    let json = dir.path().join("cmp.json");
    let res = ok(signphon(&[
        "compare",
        s(&out.join("significance/ASL__right.json")),
        s(&out.join("significance/Libras__right.json")),
        "--out",
        s(&json),
    ]));
    let text = String::from_utf8_lossy(&res.stdout);
    assert!(text.contains("only ASL: N/neck"), "{text}");
    let c: serde_json::Value = serde_json::from_slice(&fs::read(&json).unwrap()).unwrap();
    assert_eq!(c["hand"], "right");

    let mismatch = signphon(&[
        "compare",
        s(&out.join("significance/ASL__right.json")),
        s(&out.join("significance/Libras__left.json")),
    ]);
    assert_eq!(mismatch.status.code(), Some(2));
}
