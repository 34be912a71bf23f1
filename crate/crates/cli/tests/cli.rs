use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eeg-lstm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const TINY: &str = "n=10,len=12";

fn train_tiny(out_dir: &Path, model: &str) -> Output {
    run(&[
        "train",
        "--synthetic",
        TINY,
        "--model",
        model,
        "--hidden",
        "3",
        "--epochs",
        "2",
        "--folds",
        "2",
        "--seed",
        "4",
        "--out",
        out_dir.to_str().unwrap(),
    ])
}

#[test]
fn missing_data_source_is_usage_error() {
    let out = run(&["train", "--model", "1"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--data"));
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(code(&run(&["train", "--bogus"])), 2);
    assert_eq!(code(&run(&["train", "--synthetic", "--model", "3"])), 2);
    assert_eq!(code(&run(&["train", "--synthetic", "--folds", "x"])), 2);
    assert_eq!(code(&run(&["train", "--data", "somewhere"])), 2);
    assert_eq!(code(&run(&["train", "--synthetic", "f9=1"])), 2);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn missing_corpus_is_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["train", "--data", dir.path().to_str().unwrap(), "--pair", "A,E"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn synthetic_training_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = train_tiny(dir.path(), "1");
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("effective configuration:"));
    for key in [
        "\"learning_rate\": 0.001",
        "\"batch_size\": 4",
        "\"beta2\": 0.999",
        "\"jobs\": 1",
        "\"standardize\": false",
    ] {
        assert!(text.contains(key), "config echo lacks {key}");
    }

    let results = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    let lines: Vec<&str> = results.lines().collect();
    assert_eq!(
        lines[0],
        "pair,model,val_acc,test_acc,sensitivity,specificity,precision,auc"
    );
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("synthetic,1,"));
    assert_eq!(lines[1].split(',').count(), 8);

    let curves = std::fs::read_to_string(dir.path().join("curves.csv")).unwrap();
    assert_eq!(
        curves.lines().next(),
        Some("fold,epoch,train_loss,val_loss,val_accuracy")
    );
    assert_eq!(curves.lines().count(), 1 + 2 * 2);

    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("results.json")).unwrap()).unwrap();
    assert_eq!(json[0]["folds"].as_array().unwrap().len(), 2);
    assert!(dir.path().join("checkpoints/fold_00.json").is_file());
    assert!(dir.path().join("checkpoints/fold_01.json").is_file());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(code(&train_tiny(a.path(), "2")), 0);
    assert_eq!(code(&train_tiny(b.path(), "2")), 0);
    for file in ["results.csv", "curves.csv", "results.json"] {
        let x = std::fs::read(a.path().join(file)).unwrap();
        let y = std::fs::read(b.path().join(file)).unwrap();
        assert_eq!(x, y, "{file} differs");
    }
}

#[test]
fn evaluate_checks_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&train_tiny(dir.path(), "1")), 0);
    let ckpt = dir.path().join("checkpoints/fold_00.json");
    let ckpt_arg = ckpt.to_str().unwrap();

    let ok = run(&[
        "evaluate",
        "--checkpoint",
        ckpt_arg,
        "--synthetic",
        TINY,
        "--model",
        "1",
    ]);
    assert_eq!(code(&ok), 0, "{}", stderr(&ok));
    assert!(stdout(&ok).contains("\"accuracy\""));

    let wrong = run(&[
        "evaluate",
        "--checkpoint",
        ckpt_arg,
        "--synthetic",
        TINY,
        "--model",
        "2",
    ]);
    assert_eq!(code(&wrong), 1);
    assert!(stderr(&wrong).contains("model_config.variant"));

    let text = std::fs::read_to_string(&ckpt).unwrap();
    let cut = dir.path().join("cut.json");
    std::fs::write(&cut, &text[..text.len() / 3]).unwrap();
    let truncated = run(&["evaluate", "--checkpoint", cut.to_str().unwrap(), "--synthetic", TINY]);
    assert_eq!(code(&truncated), 1);
    assert!(stderr(&truncated).contains("checkpoint"));
}

#[test]
fn gradcheck_default_and_sized() {
    let out = run(&["gradcheck"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert_eq!(stdout(&out).matches(": max relative error").count(), 8);
    assert!(stdout(&out).contains("lstm_1.W_i"));

    let sized = run(&["gradcheck", "--hidden", "8", "--steps", "20"]);
    assert_eq!(code(&sized), 0);
}

#[test]
fn gradcheck_negative_control_fails() {
    let out = run(&["gradcheck", "--hidden", "3", "--steps", "4", "--perturb-backward"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("FAILED"));
}

#[test]
fn exported_synthetic_corpus_trains_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    let gen = run(&[
        "gen-synth",
        "--synthetic",
        "len=4097",
        "--pair",
        "A,E",
        "--out",
        corpus.to_str().unwrap(),
    ]);
    assert_eq!(code(&gen), 0, "{}", stderr(&gen));
    assert_eq!(std::fs::read_dir(corpus.join("A")).unwrap().count(), 100);
    let first = std::fs::read_to_string(corpus.join("E/S001.txt")).unwrap();
    assert_eq!(first.lines().count(), 4097);

    let out_dir = dir.path().join("run");
    let out = run(&[
        "train",
        "--data",
        corpus.to_str().unwrap(),
        "--pair",
        "A,E",
        "--seq-len",
        "16",
        "--standardize",
        "--hidden",
        "2",
        "--epochs",
        "1",
        "--folds",
        "1",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let results = std::fs::read_to_string(out_dir.join("results.csv")).unwrap();
    assert!(results.lines().nth(1).unwrap().starts_with("A/E,1,"));
    let json = std::fs::read_to_string(out_dir.join("results.json")).unwrap();
    assert!(json.contains("\"standardized\": true"));
}
