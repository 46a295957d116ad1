//! Acceptance gate for the whole pipeline: nine checks, one test (and so
//! one pass/fail line) per check. Passing tests also print a `[PASS]`
//! summary with the measured numbers, visible under `--nocapture`.
//!
//! Checks 6 and 7 share one set of real cross-validation runs driven
//! through the `har` binary; on a single core they take roughly half an
//! hour of training. Everything else finishes in seconds. To run only
//! the quick checks:
//!
//! ```text
//! cargo test --test acceptance -- --skip check_6 --skip check_7
//! ```

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use har_core::evaluate::{make_fold_plan, roc_auc, ConfusionCounts, CvReport};
use har_core::io::read_windows;
use har_core::model::{
    architecture, build_network, task_targets, train, ModelConfig, Task,
};
use har_core::nn::{
    check_network_gradients, mse, weighted_bce, Activation, GradCheckSettings, LayerSpec,
    LossKind,
};
use har_core::preprocess::{
    preprocess_dataset, resample_to_30hz, ActivityBout, ClassFlags, ParticipantRecord,
    ResampleMethod, WindowSample, AXES, WINDOW_LEN,
};
use har_core::Tensor;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

fn pass(check: &str, detail: String) {
    println!("[PASS] {check}: {detail}");
}

fn within(start: Instant, budget: Duration, check: &str) {
    let elapsed = start.elapsed();
    assert!(
        elapsed <= budget,
        "{check} exceeded its time budget: {elapsed:.2?} > {budget:.2?}"
    );
}

// ---------------------------------------------------------------------------
// Check 1: the network builds with exactly the documented parameter census.
// ---------------------------------------------------------------------------

#[test]
fn check_1_architecture_census() {
    let start = Instant::now();
    let expected_per_layer = [400, 4128, 16448, 23000, 510, 11];
    let expected_total: usize = expected_per_layer.iter().sum();
    assert_eq!(expected_total, 44_497);

    for task in [
        Task::Sedentary,
        Task::Locomotion,
        Task::Lifestyle,
        Task::MetRegression,
    ] {
        let specs = architecture(task);
        let per_layer: Vec<usize> = specs.iter().map(|s| s.parameter_count()).collect();
        assert_eq!(per_layer, expected_per_layer, "{task:?} per-layer census");
        let net = build_network(task, 0).unwrap();
        assert_eq!(net.parameter_count(), expected_total, "{task:?} total census");
    }

    within(start, Duration::from_secs(1), "check 1");
    pass(
        "check 1/9 architecture census",
        format!("44,497 parameters ({expected_per_layer:?}) for all four tasks"),
    );
}

// ---------------------------------------------------------------------------
// Check 2: analytic gradients agree with central finite differences for each
// layer family and for the full stack, over >= 100 coordinates x 5 seeds.
// ---------------------------------------------------------------------------

fn rand_input(shape: &[usize], seed: u64) -> Tensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = shape.iter().product();
    let data: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Tensor::from_vec(shape, data).unwrap()
}

fn gradcheck_family(
    name: &str,
    specs: &[LayerSpec],
    input: &Tensor,
    target: f64,
    loss: LossKind,
) -> f64 {
    let mut worst = 0.0f64;
    for seed in 0..5u64 {
        let net = har_core::nn::Network::from_specs(specs, 40 + seed).unwrap();
        let settings = GradCheckSettings {
            coords: 100,
            seed: 90 + seed,
            ..GradCheckSettings::default()
        };
        let report = check_network_gradients(&net, input, target, loss, &settings).unwrap();
        assert_eq!(report.checked, 100, "{name}: seed {seed} checked coords");
        assert!(
            report.max_rel_err < 1e-4,
            "{name}: seed {seed} worst coord {} rel err {}",
            report.worst_coord,
            report.max_rel_err
        );
        worst = worst.max(report.max_rel_err);
    }
    worst
}

#[test]
fn check_2_gradient_suite() {
    let start = Instant::now();
    let seq = rand_input(&[20, 3], 7);

    let conv = vec![
        LayerSpec::Conv1d {
            in_channels: 3,
            out_channels: 8,
            kernel_width: 8,
            activation: Activation::ReLU,
        },
        LayerSpec::Lstm {
            in_features: 8,
            hidden: 6,
        },
        LayerSpec::Dense {
            in_features: 6,
            out_features: 1,
            activation: Activation::Sigmoid,
        },
    ];
    let w_conv = gradcheck_family("conv1d", &conv, &seq, 1.0, LossKind::WeightedBce);

    let lstm = vec![
        LayerSpec::Lstm {
            in_features: 3,
            hidden: 12,
        },
        LayerSpec::Dense {
            in_features: 12,
            out_features: 1,
            activation: Activation::Sigmoid,
        },
    ];
    let w_lstm = gradcheck_family("lstm", &lstm, &seq, 0.0, LossKind::WeightedBce);

    // Networks must open on sequence input, so the dense family rides
    // behind a minimal LSTM; dense coordinates still dominate the census.
    let dense = vec![
        LayerSpec::Lstm {
            in_features: 3,
            hidden: 4,
        },
        LayerSpec::Dense {
            in_features: 4,
            out_features: 32,
            activation: Activation::ReLU,
        },
        LayerSpec::Dense {
            in_features: 32,
            out_features: 1,
            activation: Activation::Linear,
        },
    ];
    let w_dense = gradcheck_family("dense", &dense, &seq, 1.5, LossKind::Mse);

    let window = rand_input(&[450, 3], 9);
    let w_full_cls = gradcheck_family(
        "full stack (classification)",
        &architecture(Task::Sedentary),
        &window,
        1.0,
        LossKind::WeightedBce,
    );
    let w_full_reg = gradcheck_family(
        "full stack (regression)",
        &architecture(Task::MetRegression),
        &window,
        3.0,
        LossKind::Mse,
    );

    within(start, Duration::from_secs(60), "check 2");
    pass(
        "check 2/9 gradient suite",
        format!(
            "worst rel err conv {w_conv:.2e}, lstm {w_lstm:.2e}, dense {w_dense:.2e}, \
             full {:.2e} (100 coords x 5 seeds each, tol 1e-4)",
            w_full_cls.max(w_full_reg)
        ),
    );
}

// ---------------------------------------------------------------------------
// Check 3: loss implementations match direct-summation oracles.
// ---------------------------------------------------------------------------

fn bce_oracle(preds: &[f64], targets: &[f64], weights: Option<&[f64]>) -> f64 {
    // Same definition, evaluated term by term and summed in reverse order
    // so agreement is not an artifact of identical accumulation.
    let terms: Vec<f64> = preds
        .iter()
        .zip(targets)
        .enumerate()
        .map(|(i, (&p, &y))| {
            let w = weights.map_or(1.0, |w| w[i]);
            let p = p.clamp(1e-7, 1.0 - 1e-7);
            -w * (y * p.ln() + (1.0 - y) * (1.0 - p).ln())
        })
        .collect();
    terms.iter().rev().sum::<f64>() / preds.len() as f64
}

fn mse_oracle(preds: &[f64], targets: &[f64]) -> f64 {
    let terms: Vec<f64> = preds
        .iter()
        .zip(targets)
        .map(|(&p, &t)| (p - t) * (p - t))
        .collect();
    terms.iter().rev().sum::<f64>() / preds.len() as f64
}

#[test]
fn check_3_loss_oracles() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut worst = 0.0f64;

    for _ in 0..1000 {
        let n = rng.gen_range(1..=16);
        let targets: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(0..=1))).collect();
        let preds: Vec<f64> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.1) {
                    // Saturated score: exercises the log clamp.
                    f64::from(rng.gen_range(0..=1))
                } else {
                    rng.gen_range(0.001..0.999)
                }
            })
            .collect();
        let weights: Option<Vec<f64>> = rng
            .gen_bool(0.5)
            .then(|| (0..n).map(|_| rng.gen_range(0.0..2.0)).collect());

        let (bce, _) = weighted_bce(&preds, &targets, weights.as_deref()).unwrap();
        worst = worst.max((bce - bce_oracle(&preds, &targets, weights.as_deref())).abs());

        let reg_preds: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let reg_targets: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let (m, _) = mse(&reg_preds, &reg_targets).unwrap();
        worst = worst.max((m - mse_oracle(&reg_preds, &reg_targets)).abs());
    }
    assert!(worst <= 1e-12, "worst oracle gap {worst:e}");

    let (ln2, _) = weighted_bce(&[0.5], &[1.0], None).unwrap();
    let ln2_err = (ln2 - std::f64::consts::LN_2).abs();
    assert!(ln2_err <= 1e-9, "BCE(1, 0.5) - ln 2 = {ln2_err:e}");

    within(start, Duration::from_secs(5), "check 3");
    pass(
        "check 3/9 loss oracles",
        format!("1000 random batches, worst gap {worst:.1e}; BCE(1, 0.5) off ln 2 by {ln2_err:.1e}"),
    );
}

// ---------------------------------------------------------------------------
// Check 4: ranking and confusion metrics match independent oracles.
// ---------------------------------------------------------------------------

fn pairwise_auc(scores: &[f64], labels: &[f64]) -> f64 {
    let mut pairs = 0.0;
    let mut credit = 0.0;
    for (i, &si) in scores.iter().enumerate() {
        if labels[i] != 1.0 {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if labels[j] != 0.0 {
                continue;
            }
            pairs += 1.0;
            credit += if si > sj {
                1.0
            } else if si == sj {
                0.5
            } else {
                0.0
            };
        }
    }
    credit / pairs
}

#[test]
fn check_4_metric_oracles() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut worst = 0.0f64;

    for _ in 0..200 {
        let n = rng.gen_range(5..=60);
        // Scores quantized to eighths so ties are common.
        let scores: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(0..=8)) / 8.0).collect();
        let mut labels: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(0..=1))).collect();
        labels[0] = 1.0;
        labels[n - 1] = 0.0;

        let (_, auc) = roc_auc(&scores, &labels).unwrap();
        worst = worst.max((auc - pairwise_auc(&scores, &labels)).abs());
    }
    assert!(worst <= 1e-12, "worst AUC gap {worst:e}");

    // Sensitivity 0.80 with specificity 0.98 must combine to a balanced
    // accuracy of 0.89.
    fn instance(blocks: &[(usize, f64, f64)]) -> (Vec<f64>, Vec<f64>) {
        let mut scores = Vec::new();
        let mut labels = Vec::new();
        for &(count, score, label) in blocks {
            scores.extend(std::iter::repeat_n(score, count));
            labels.extend(std::iter::repeat_n(label, count));
        }
        (scores, labels)
    }

    let (scores, labels) = instance(&[
        (80, 0.9, 1.0),
        (20, 0.1, 1.0),
        (2, 0.9, 0.0),
        (98, 0.1, 0.0),
    ]);
    let counts = ConfusionCounts::from_scores(&scores, &labels).unwrap();
    let metrics = har_core::evaluate::confusion_metrics(&counts);
    let ba = metrics.balanced_accuracy.unwrap();
    assert!((metrics.sensitivity.unwrap() - 0.80).abs() <= 0.005);
    assert!((metrics.specificity.unwrap() - 0.98).abs() <= 0.005);
    assert!((ba - 0.89).abs() <= 0.005, "balanced accuracy {ba}");

    // Precision 0.85 with recall 0.80 must combine to an F1 of 0.82.
    let (scores, labels) = instance(&[
        (68, 0.9, 1.0),
        (17, 0.1, 1.0),
        (12, 0.9, 0.0),
        (3, 0.1, 0.0),
    ]);
    let counts = ConfusionCounts::from_scores(&scores, &labels).unwrap();
    let metrics = har_core::evaluate::confusion_metrics(&counts);
    let f1 = metrics.f1.unwrap();
    assert!((metrics.precision.unwrap() - 0.85).abs() <= 0.005);
    assert!((metrics.sensitivity.unwrap() - 0.80).abs() <= 0.005);
    assert!((f1 - 0.82).abs() <= 0.005, "f1 {f1}");

    within(start, Duration::from_secs(5), "check 4");
    pass(
        "check 4/9 metric oracles",
        format!("200 tied instances, worst AUC gap {worst:.1e}; BA 0.89 and F1 {f1:.4} identities hold"),
    );
}

// ---------------------------------------------------------------------------
// Check 5: 145 participants split into 9 batches of 15 plus 1 of 10, giving
// exactly 90 runs whose batches never overlap.
// ---------------------------------------------------------------------------

#[test]
fn check_5_fold_protocol() {
    let start = Instant::now();
    let ids: Vec<String> = (1..=145).map(|i| format!("S{i:03}")).collect();
    let plan = make_fold_plan(&ids, 10, 42).unwrap();

    let mut sizes: Vec<usize> = plan.batches.iter().map(Vec::len).collect();
    sizes.sort_unstable();
    assert_eq!(sizes, [10, 15, 15, 15, 15, 15, 15, 15, 15, 15]);
    assert_eq!(plan.runs.len(), 90);
    plan.check_integrity(&ids).unwrap();

    let mut seen = std::collections::HashSet::new();
    for &(test, val) in &plan.runs {
        assert_ne!(test, val);
        assert!(seen.insert((test, val)), "duplicate run ({test}, {val})");
        let overlap = plan.batches[test]
            .iter()
            .any(|id| plan.batches[val].contains(id));
        assert!(!overlap, "test/val batches share a participant");
    }

    within(start, Duration::from_secs(1), "check 5");
    pass(
        "check 5/9 fold protocol",
        "145 ids -> 9x15 + 1x10 batches, 90 unique disjoint runs".into(),
    );
}

// ---------------------------------------------------------------------------
// Checks 6 and 7 share one expensive set of cross-validation runs, driven
// through the real binary so the whole pipeline is on the hook.
// ---------------------------------------------------------------------------

struct CvArtifacts {
    _dir: TempDir,
    sed_w4_report: Vec<u8>,
    sed_w1_report: Vec<u8>,
    sed: CvReport,
    reg: CvReport,
    archive_mets: Vec<f64>,
    sed_manifest: String,
    /// Wall time of the two scored runs (classification + regression).
    scored_wall: Duration,
    /// Wall time of the workers=1 determinism rerun.
    rerun_wall: Duration,
}

static CV: OnceLock<CvArtifacts> = OnceLock::new();

fn har(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_har"))
        .args(args)
        .output()
        .expect("spawn har")
}

fn assert_ok(out: &Output, what: &str) {
    assert!(
        out.status.success(),
        "{what} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn cv_artifacts() -> &'static CvArtifacts {
    CV.get_or_init(|| {
        let dir = TempDir::new().unwrap();
        let root = dir.path();

        // 20 participants, low noise; two bouts per class spread the
        // amplitude envelope so MET targets cover the full [1, 8] range.
        let spec = root.join("spec.json");
        std::fs::write(
            &spec,
            concat!(
                "{\n",
                "  \"n_participants\": 20,\n",
                "  \"bouts_per_class\": 2,\n",
                "  \"bout_seconds\": 15.0,\n",
                "  \"seed\": 404\n",
                "}\n"
            ),
        )
        .unwrap();

        let cv_config = |lr: f64| {
            format!(
                concat!(
                    "{{\n",
                    "  \"n_batches\": 10,\n",
                    "  \"seed\": 11,\n",
                    "  \"epochs\": 10,\n",
                    "  \"patience\": 5,\n",
                    "  \"batch_size\": 4,\n",
                    "  \"optimizer\": {{ \"learning_rate\": {}, \"beta1\": 0.9, ",
                    "\"beta2\": 0.999, \"epsilon\": 1e-7 }}\n",
                    "}}\n"
                ),
                lr
            )
        };
        let sed_config = root.join("cv_sedentary.json");
        std::fs::write(&sed_config, cv_config(0.003)).unwrap();
        let reg_config = root.join("cv_regression.json");
        std::fs::write(&reg_config, cv_config(0.01)).unwrap();

        let data = root.join("data");
        let archive = root.join("windows.bin");
        assert_ok(
            &har(&["synth", "--config", path_str(&spec), "--out-dir", path_str(&data)]),
            "synth",
        );
        assert_ok(
            &har(&[
                "preprocess",
                "--manifest",
                path_str(&data.join("manifest.json")),
                "--out",
                path_str(&archive),
            ]),
            "preprocess",
        );
        let archive_mets: Vec<f64> = read_windows(&archive)
            .unwrap()
            .iter()
            .filter_map(|w| w.met)
            .collect();

        let sed_w4 = root.join("cv_sed_w4");
        let reg_out = root.join("cv_reg");
        let scored_start = Instant::now();
        assert_ok(
            &har(&[
                "nested-cv",
                "--archive",
                path_str(&archive),
                "--task",
                "sedentary",
                "--out-dir",
                path_str(&sed_w4),
                "--config",
                path_str(&sed_config),
                "--workers",
                "4",
            ]),
            "sedentary nested-cv (workers 4)",
        );
        assert_ok(
            &har(&[
                "nested-cv",
                "--archive",
                path_str(&archive),
                "--task",
                "met-regression",
                "--out-dir",
                path_str(&reg_out),
                "--config",
                path_str(&reg_config),
                "--workers",
                "4",
            ]),
            "regression nested-cv",
        );
        let scored_wall = scored_start.elapsed();

        let sed_w1 = root.join("cv_sed_w1");
        let rerun_start = Instant::now();
        assert_ok(
            &har(&[
                "nested-cv",
                "--archive",
                path_str(&archive),
                "--task",
                "sedentary",
                "--out-dir",
                path_str(&sed_w1),
                "--config",
                path_str(&sed_config),
                "--workers",
                "1",
            ]),
            "sedentary nested-cv (workers 1)",
        );
        let rerun_wall = rerun_start.elapsed();

        let sed_w4_report = std::fs::read(sed_w4.join("report.json")).unwrap();
        let sed_w1_report = std::fs::read(sed_w1.join("report.json")).unwrap();
        let reg_report = std::fs::read(reg_out.join("report.json")).unwrap();
        CvArtifacts {
            sed: serde_json::from_slice(&sed_w4_report).unwrap(),
            reg: serde_json::from_slice(&reg_report).unwrap(),
            sed_manifest: std::fs::read_to_string(sed_w4.join("run_manifest.json")).unwrap(),
            sed_w4_report,
            sed_w1_report,
            archive_mets,
            scored_wall,
            rerun_wall,
            _dir: dir,
        }
    })
}

#[test]
fn check_6_end_to_end_learning() {
    let cv = cv_artifacts();

    assert_eq!(cv.sed.runs.len(), 90, "sedentary CV run count");
    assert_eq!(cv.reg.runs.len(), 90, "regression CV run count");

    let ba = cv.sed.summary.balanced_accuracy.as_ref().unwrap().mean;
    let auc = cv.sed.summary.auc.as_ref().unwrap().mean;
    assert!(ba >= 0.90, "mean balanced accuracy {ba}");
    assert!(auc >= 0.95, "mean AUC {auc}");

    let rmse = cv.reg.summary.rmse.as_ref().unwrap().mean;
    assert!(rmse <= 0.5, "mean RMSE {rmse}");

    let lo = cv.archive_mets.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = cv.archive_mets.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!(lo <= 1.0 + 1e-9 && hi >= 8.0 - 1e-9, "MET targets span [{lo}, {hi}]");

    assert!(
        cv.sed_manifest.contains("\"epochs\": 10"),
        "run manifest records the epoch budget"
    );
    assert!(
        cv.scored_wall <= Duration::from_secs(30 * 60),
        "scored runs took {:?}",
        cv.scored_wall
    );

    pass(
        "check 6/9 end-to-end learning",
        format!(
            "sedentary BA {ba:.4} (>= 0.90), AUC {auc:.4} (>= 0.95); MET RMSE {rmse:.3} \
             (<= 0.5) on targets spanning [{lo:.1}, {hi:.1}]; 2x90 runs in {:.0?}",
            cv.scored_wall
        ),
    );
}

#[test]
fn check_7_determinism() {
    let cv = cv_artifacts();

    assert!(!cv.sed_w4_report.is_empty());
    assert_eq!(
        cv.sed_w4_report, cv.sed_w1_report,
        "report.json differs between --workers 4 and --workers 1"
    );

    pass(
        "check 7/9 determinism",
        format!(
            "two executions (same seed, workers 4 vs 1) produced byte-identical \
             {}-byte report.json; rerun took {:.0?}",
            cv.sed_w4_report.len(),
            cv.rerun_wall
        ),
    );
}

// ---------------------------------------------------------------------------
// Check 8: preprocessing conserves what it should.
// ---------------------------------------------------------------------------

fn tone_amplitude(xs: &[f64], rate_hz: f64, freq_hz: f64) -> f64 {
    let n = xs.len() as f64;
    let (mut re, mut im) = (0.0, 0.0);
    for (k, &x) in xs.iter().enumerate() {
        let phase = 2.0 * PI * freq_hz * k as f64 / rate_hz;
        re += x * phase.cos();
        im -= x * phase.sin();
    }
    2.0 * (re * re + im * im).sqrt() / n
}

#[test]
fn check_8_preprocessing_conservation() {
    let start = Instant::now();

    // A 10-minute 100 Hz bout must yield exactly 40 windows of 450 x 3.
    let n = 60_000;
    let data: Vec<f64> = (0..n * AXES)
        .map(|i| {
            let t = (i / AXES) as f64 / 100.0;
            0.3 * (2.0 * PI * 1.3 * t + (i % AXES) as f64).sin()
        })
        .collect();
    let record = ParticipantRecord {
        participant_id: "P1".into(),
        bouts: vec![ActivityBout::new(
            "TV WATCHING",
            100.0,
            Tensor::from_vec(&[n, AXES], data).unwrap(),
            None,
            ClassFlags {
                sedentary: true,
                ..ClassFlags::NONE
            },
        )
        .unwrap()],
        demographics: None,
    };
    let outcome = preprocess_dataset(&[record], ResampleMethod::default()).unwrap();
    assert_eq!(outcome.windows.len(), 40, "window count from 10 min at 100 Hz");
    assert_eq!(outcome.discarded_samples, 0);
    for w in &outcome.windows {
        assert_eq!(w.values.shape(), [WINDOW_LEN, AXES]);
    }

    // Resampling a 30 Hz signal is the identity.
    let m = 900;
    let native: Vec<f64> = (0..m * AXES)
        .map(|i| ((i as f64) * 0.37).sin() + 0.1 * (i % AXES) as f64)
        .collect();
    let native = Tensor::from_vec(&[m, AXES], native).unwrap();
    let resampled = resample_to_30hz(&native, 30.0).unwrap();
    assert_eq!(resampled.data(), native.data(), "30 Hz input must pass through");

    // A 2 Hz tone keeps its amplitude through 100 -> 30 Hz resampling.
    let secs = 30.0;
    let n100 = (100.0 * secs) as usize;
    let tone: Vec<f64> = (0..n100 * AXES)
        .map(|i| {
            let t = (i / AXES) as f64 / 100.0;
            (2.0 * PI * 2.0 * t).sin()
        })
        .collect();
    let tone = Tensor::from_vec(&[n100, AXES], tone).unwrap();
    let out = resample_to_30hz(&tone, 100.0).unwrap();
    let axis0_in: Vec<f64> = (0..n100).map(|r| tone.data()[r * AXES]).collect();
    let axis0_out: Vec<f64> = (0..out.shape()[0]).map(|r| out.data()[r * AXES]).collect();
    let amp_in = tone_amplitude(&axis0_in, 100.0, 2.0);
    let amp_out = tone_amplitude(&axis0_out, 30.0, 2.0);
    let amp_err = (amp_out - amp_in).abs() / amp_in;
    assert!(amp_err <= 0.02, "2 Hz amplitude error {amp_err}");

    within(start, Duration::from_secs(10), "check 8");
    pass(
        "check 8/9 preprocessing conservation",
        format!("40 windows from 10 min; 30 Hz identity exact; 2 Hz amplitude error {amp_err:.2e}"),
    );
}

// ---------------------------------------------------------------------------
// Check 9: the optimizer and backprop integrate well enough to overfit a
// small set within 50 epochs.
// ---------------------------------------------------------------------------

fn wave_window(freq_hz: f64, amp: f64, phase: f64, sedentary: bool) -> WindowSample {
    let mut data = Vec::with_capacity(WINDOW_LEN * AXES);
    for i in 0..WINDOW_LEN {
        let t = i as f64 / 30.0;
        for axis in 0..AXES {
            data.push(amp * (2.0 * PI * freq_hz * t + phase + axis as f64 * 0.7).sin());
        }
    }
    let (flags, activity) = if sedentary {
        (
            ClassFlags {
                sedentary: true,
                ..ClassFlags::NONE
            },
            "COMPUTER WORK",
        )
    } else {
        (
            ClassFlags {
                lifestyle: true,
                ..ClassFlags::NONE
            },
            "SWEEPING",
        )
    };
    WindowSample::new(
        Tensor::from_vec(&[WINDOW_LEN, AXES], data).unwrap(),
        flags,
        None,
        "P1",
        activity,
    )
    .unwrap()
}

#[test]
fn check_9_overfit_integration() {
    let start = Instant::now();

    let mut windows = Vec::new();
    for i in 0..10 {
        windows.push(wave_window(0.3, 0.05, 0.13 * i as f64, true));
        windows.push(wave_window(3.0, 1.0, 0.19 * i as f64, false));
    }

    let mut config = ModelConfig::new(Task::Sedentary);
    config.epochs = 50;
    config.patience = 50;
    config.batch_size = 4;
    config.seed = 9;
    config.optimizer.learning_rate = 3e-3;

    let model = train(&windows, &windows, &config).unwrap();
    assert!(model.stopped_epoch <= 50);

    let scores = model.predict(&windows).unwrap();
    let targets = task_targets(&windows, Task::Sedentary).unwrap();
    let correct = scores
        .iter()
        .zip(&targets)
        .filter(|(s, t)| (**s >= 0.5) == (**t == 1.0))
        .count();
    let accuracy = correct as f64 / windows.len() as f64;
    assert!(accuracy >= 0.95, "training accuracy {accuracy}");

    within(start, Duration::from_secs(120), "check 9");
    pass(
        "check 9/9 overfit integration",
        format!(
            "training accuracy {accuracy:.2} on 20 windows after {} epochs",
            model.stopped_epoch
        ),
    );
}
