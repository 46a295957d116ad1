//! End-to-end tests of the `har` binary: pipeline wiring, output
//! determinism, and the exit-code contract (0 ok, 1 runtime, 2 usage).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn har(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_har"))
        .args(args)
        .output()
        .expect("spawn har")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write_spec(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("spec.json");
    fs::write(&path, body).unwrap();
    path
}

/// Sorted (relative path, bytes) pairs, skipping the run manifest: it
/// records wall time, everything else must be bit-reproducible.
fn tree_without_run_manifest(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else if path.file_name().unwrap() != "run_manifest.json" {
                files.push((
                    path.strip_prefix(root).unwrap().to_string_lossy().into_owned(),
                    fs::read(&path).unwrap(),
                ));
            }
        }
    }
    files.sort();
    files
}

fn synth_small(dir: &Path) -> PathBuf {
    let spec = write_spec(
        dir,
        r#"{"n_participants": 6, "bouts_per_class": 1, "bout_seconds": 60.0, "seed": 3}"#,
    );
    let out_dir = dir.join("ds");
    assert_ok(&har(&[
        "synth",
        "--config",
        spec.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]));
    out_dir
}

fn preprocess(dataset: &Path, out: &Path) -> String {
    let res = har(&[
        "preprocess",
        "--manifest",
        dataset.join("manifest.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_ok(&res);
    String::from_utf8(res.stdout).unwrap()
}

#[test]
fn synth_reruns_produce_identical_trees() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = write_spec(tmp.path(), r#"{"n_participants": 3, "bout_seconds": 30.0}"#);
    for name in ["a", "b"] {
        assert_ok(&har(&[
            "synth",
            "--config",
            spec.to_str().unwrap(),
            "--out-dir",
            tmp.path().join(name).to_str().unwrap(),
        ]));
    }
    assert_eq!(
        tree_without_run_manifest(&tmp.path().join("a")),
        tree_without_run_manifest(&tmp.path().join("b"))
    );
}

#[test]
fn malformed_spec_json_is_a_usage_error_with_position() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = write_spec(tmp.path(), r#"{"n_participants": }"#);
    let out = har(&[
        "synth",
        "--config",
        spec.to_str().unwrap(),
        "--out-dir",
        tmp.path().join("ds").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
    let stderr = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(stderr.contains("line 1 column"), "stderr: {stderr}");
}

#[test]
fn missing_manifest_is_a_usage_error_listing_the_path() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nowhere/manifest.json");
    let out = har(&[
        "preprocess",
        "--manifest",
        missing.to_str().unwrap(),
        "--out",
        tmp.path().join("w.bin").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("nowhere"));
}

#[test]
fn unknown_task_is_a_usage_error() {
    let out = har(&[
        "nested-cv",
        "--archive",
        "w.bin",
        "--task",
        "dancing",
        "--out-dir",
        "out",
    ]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn preprocess_reports_counts_and_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    // One participant, one 10-minute 100 Hz bout per class.
    let spec = write_spec(
        tmp.path(),
        r#"{"n_participants": 1, "bouts_per_class": 1, "bout_seconds": 600.0, "seed": 9}"#,
    );
    let ds = tmp.path().join("ds");
    assert_ok(&har(&[
        "synth",
        "--config",
        spec.to_str().unwrap(),
        "--out-dir",
        ds.to_str().unwrap(),
    ]));

    let stdout = preprocess(&ds, &tmp.path().join("w1.bin"));
    assert!(
        stdout.contains("33 activities, 29 eligible"),
        "stdout: {stdout}"
    );
    // 600 s / 15 s = 40 windows per bout.
    assert!(stdout.contains("windows[sedentary]: 40"), "stdout: {stdout}");
    assert!(stdout.contains("windows: 120 total"), "stdout: {stdout}");

    preprocess(&ds, &tmp.path().join("w2.bin"));
    assert_eq!(
        fs::read(tmp.path().join("w1.bin")).unwrap(),
        fs::read(tmp.path().join("w2.bin")).unwrap(),
        "archives from identical inputs must match byte for byte"
    );
}

#[test]
fn empty_archive_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let archive = tmp.path().join("empty.bin");
    har_core::io::write_windows(&archive, &[]).unwrap();
    let out = har(&[
        "train",
        "--archive",
        archive.to_str().unwrap(),
        "--task",
        "sedentary",
        "--out",
        tmp.path().join("m.ckpt").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no windows"));
}

#[test]
fn train_predict_round_trip_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = synth_small(tmp.path());
    let archive = tmp.path().join("w.bin");
    preprocess(&ds, &archive);

    let train_cfg = tmp.path().join("train.json");
    fs::write(&train_cfg, r#"{"epochs": 2, "batch_size": 8}"#).unwrap();
    let ckpt = tmp.path().join("m.ckpt");
    assert_ok(&har(&[
        "train",
        "--archive",
        archive.to_str().unwrap(),
        "--task",
        "sedentary",
        "--config",
        train_cfg.to_str().unwrap(),
        "--seed",
        "5",
        "--out",
        ckpt.to_str().unwrap(),
    ]));
    assert!(tmp.path().join("m.manifest.json").is_file());

    let preds: Vec<Vec<u8>> = ["p1.csv", "p2.csv"]
        .iter()
        .map(|name| {
            let out = tmp.path().join(name);
            assert_ok(&har(&[
                "predict",
                "--checkpoint",
                ckpt.to_str().unwrap(),
                "--archive",
                archive.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
            ]));
            fs::read(&out).unwrap()
        })
        .collect();
    assert_eq!(preds[0], preds[1], "checkpoint round trip must be stable");
    let text = String::from_utf8(preds[0].clone()).unwrap();
    assert!(text.starts_with("window_id,score\n0,"), "{text}");
}

#[test]
fn checkpoint_version_mismatch_is_a_runtime_error() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = synth_small(tmp.path());
    let archive = tmp.path().join("w.bin");
    preprocess(&ds, &archive);

    let ckpt = tmp.path().join("m.ckpt");
    let config = har_core::model::ModelConfig::new(har_core::model::Task::Sedentary);
    let network = har_core::model::build_network(config.task, 1).unwrap();
    har_core::io::save_checkpoint(&ckpt, &config, &network).unwrap();
    let mut bytes = fs::read(&ckpt).unwrap();
    bytes[8] ^= 0xff;
    fs::write(&ckpt, bytes).unwrap();

    let out = har(&[
        "predict",
        "--checkpoint",
        ckpt.to_str().unwrap(),
        "--archive",
        archive.to_str().unwrap(),
        "--out",
        tmp.path().join("p.csv").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("version"));
}

#[test]
fn nested_cv_emits_report_and_roc_files() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = synth_small(tmp.path());
    let archive = tmp.path().join("w.bin");
    preprocess(&ds, &archive);

    let cv_cfg = tmp.path().join("cv.json");
    fs::write(
        &cv_cfg,
        r#"{"n_batches": 3, "epochs": 1, "batch_size": 8, "seed": 11}"#,
    )
    .unwrap();
    let out_dir = tmp.path().join("cv");
    let res = har(&[
        "nested-cv",
        "--archive",
        archive.to_str().unwrap(),
        "--task",
        "sedentary",
        "--config",
        cv_cfg.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_ok(&res);
    let stdout = String::from_utf8(res.stdout).unwrap();
    assert!(stdout.contains("runs: 6"), "stdout: {stdout}");

    assert!(out_dir.join("report.json").is_file());
    assert!(out_dir.join("roc_mean.csv").is_file());
    assert!(out_dir.join("run_manifest.json").is_file());
    for k in 0..6 {
        assert!(out_dir.join(format!("roc_run_{k}.csv")).is_file());
    }
    let roc = fs::read_to_string(out_dir.join("roc_mean.csv")).unwrap();
    assert!(roc.starts_with("fpr,tpr\n"));

    // The manifest records concurrency and epochs; the report must not
    // depend on them.
    let manifest = fs::read_to_string(out_dir.join("run_manifest.json")).unwrap();
    assert!(manifest.contains("\"workers\""), "{manifest}");
    assert!(manifest.contains("\"epochs\""), "{manifest}");
    let report = fs::read_to_string(out_dir.join("report.json")).unwrap();
    assert!(!report.contains("workers"), "report must omit worker count");

    // `report` re-prints the stored summary.
    let reprint = har(&[
        "report",
        "--report",
        out_dir.join("report.json").to_str().unwrap(),
    ]);
    assert_ok(&reprint);
    assert!(String::from_utf8_lossy(&reprint.stdout).contains("runs: 6"));
}
