mod args;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use args::{
    Cli, Command, EvaluateArgs, GenSynthArgs, GradcheckArgs, ReproduceArgs, SourceArgs, TrainArgs, TrainingArgs,
};
use eeg_lstm::checkpoint::{Checkpoint, Provenance};
use eeg_lstm::data::{
    gen_synthetic, load_pair_dataset, parse_pair, write_bonn_set, LoadOptions, PairDataset, SetId, SyntheticSpec,
    REFERENCE_PAIRS,
};
use eeg_lstm::gradcheck::{default_suite, gradcheck, GradcheckSpec};
use eeg_lstm::harness::{
    evaluate, results_csv, run_experiment, write_curves_csv, write_results_csv, write_results_json, ExperimentConfig,
    ExperimentOutput, ExperimentResult,
};
use eeg_lstm::nn::{ModelConfig, ModelVariant, CANONICAL_SEQ_LEN};
use eeg_lstm::optim::TrainConfig;

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<eeg_lstm::Error> for Failure {
    fn from(e: eeg_lstm::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(Failure::Usage(msg.into()))
}

fn parse_variant(s: &str) -> CliResult<ModelVariant> {
    s.parse().map_err(|e: eeg_lstm::Error| Failure::Usage(e.to_string()))
}

fn print_config(value: &serde_json::Value) {
    println!("effective configuration:");
    println!("{}", serde_json::to_string_pretty(value).expect("config serializes"));
}

/// Where the samples come from, resolved from the flags.
enum Source {
    Bonn { root: PathBuf, pair: (SetId, SetId) },
    Synthetic(SyntheticSpec),
}

impl Source {
    fn from_args(args: &SourceArgs) -> CliResult<Self> {
        match (&args.synthetic, &args.data) {
            (Some(_), Some(_)) => usage("--data and --synthetic are mutually exclusive"),
            (None, None) => usage("one of --data DIR or --synthetic [SPEC] is required"),
            (Some(spec), None) => {
                let mut spec: SyntheticSpec = spec
                    .parse()
                    .map_err(|e: eeg_lstm::Error| Failure::Usage(e.to_string()))?;
                if let Some(len) = args.seq_len {
                    spec.seq_len = len;
                }
                spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
                Ok(Source::Synthetic(spec))
            }
            (None, Some(root)) => {
                let Some(pair) = &args.pair else {
                    return usage("--pair X,Y is required with --data");
                };
                let pair = parse_pair(pair).map_err(|e| Failure::Usage(e.to_string()))?;
                Ok(Source::Bonn {
                    root: root.clone(),
                    pair,
                })
            }
        }
    }

    fn seq_len(&self, requested: Option<usize>) -> usize {
        match self {
            Source::Bonn { .. } => requested.unwrap_or(CANONICAL_SEQ_LEN),
            Source::Synthetic(spec) => spec.seq_len,
        }
    }

    fn describe(&self) -> serde_json::Value {
        match self {
            Source::Bonn { root, pair } => json!({
                "kind": "bonn",
                "root": root,
                "pair": format!("{},{}", pair.0, pair.1),
            }),
            Source::Synthetic(spec) => json!({ "kind": "synthetic", "spec": spec.to_string() }),
        }
    }

    fn load(&self, seq_len: usize, standardize: bool) -> CliResult<PairDataset> {
        let data = match self {
            Source::Bonn { root, pair } => load_pair_dataset(root, *pair, &LoadOptions::default())?,
            Source::Synthetic(spec) => gen_synthetic(spec)?,
        };
        let data = data.truncated(seq_len)?;
        Ok(if standardize { data.standardized() } else { data })
    }
}

fn experiment_config(t: &TrainingArgs, variant: ModelVariant, seq_len: usize) -> CliResult<ExperimentConfig> {
    let cfg = ExperimentConfig {
        model: ModelConfig::scaled(variant, t.hidden, seq_len),
        train: TrainConfig {
            learning_rate: t.lr,
            batch_size: t.batch,
            epochs: t.epochs,
            seed: t.seed,
            ..TrainConfig::default()
        },
        folds: t.folds,
        seed: t.seed,
        jobs: t.jobs,
    };
    let check = |r: eeg_lstm::Result<()>| r.map_err(|e| Failure::Usage(e.to_string()));
    check(cfg.model.validate())?;
    check(cfg.train.validate())?;
    if cfg.folds == 0 || cfg.jobs == 0 {
        return usage("--folds and --jobs must be at least 1");
    }
    Ok(cfg)
}

fn save_checkpoints(dir: &Path, prefix: &str, out: &ExperimentOutput<f64>) -> CliResult {
    fs::create_dir_all(dir)?;
    for (fold, model) in out.result.folds.iter().zip(&out.best_models) {
        let provenance = Provenance {
            seed: fold.seed,
            epoch: fold.best_epoch,
            val_accuracy: fold.best_val_accuracy,
        };
        let path = dir.join(format!("{prefix}fold_{:02}.json", fold.fold));
        Checkpoint::from_model(model, out.result.standardized, provenance).save(&path)?;
    }
    Ok(())
}

fn print_summary(results: &[ExperimentResult]) {
    print!("{}", results_csv(results));
}

fn cmd_train(args: TrainArgs) -> CliResult {
    let source = Source::from_args(&args.source)?;
    let variant = parse_variant(&args.model)?;
    let seq_len = source.seq_len(args.source.seq_len);
    let cfg = experiment_config(&args.training, variant, seq_len)?;
    print_config(&json!({
        "command": "train",
        "source": source.describe(),
        "standardize": args.source.standardize,
        "experiment": cfg,
        "out": args.training.out,
    }));

    let data = source.load(seq_len, args.source.standardize)?;
    let out = run_experiment::<f64>(&data, &cfg)?;
    let dir = &args.training.out;
    fs::create_dir_all(dir)?;
    let results = [out.result.clone()];
    write_results_csv(&dir.join("results.csv"), &results)?;
    write_results_json(&dir.join("results.json"), &results)?;
    write_curves_csv(&dir.join("curves.csv"), &out.result)?;
    save_checkpoints(&dir.join("checkpoints"), "", &out)?;
    print_summary(&results);
    Ok(())
}

fn cmd_reproduce(args: ReproduceArgs) -> CliResult {
    let Some(root) = args.data.clone() else {
        return usage("--data DIR is required");
    };
    let seq_len = args.seq_len.unwrap_or(CANONICAL_SEQ_LEN);
    let configs = REFERENCE_PAIRS
        .iter()
        .map(|&(a, b, m)| {
            let variant = parse_variant(&m.to_string())?;
            Ok(((a, b), experiment_config(&args.training, variant, seq_len)?))
        })
        .collect::<CliResult<Vec<_>>>()?;
    print_config(&json!({
        "command": "reproduce",
        "root": root,
        "seq_len": seq_len,
        "standardize": args.standardize,
        "runs": configs.iter().map(|(p, c)| json!({ "pair": format!("{},{}", p.0, p.1), "experiment": c })).collect::<Vec<_>>(),
        "out": args.training.out,
    }));

    let dir = &args.training.out;
    fs::create_dir_all(dir)?;
    let mut results = Vec::new();
    for (pair, cfg) in &configs {
        let source = Source::Bonn {
            root: root.clone(),
            pair: *pair,
        };
        let data = source.load(seq_len, args.standardize)?;
        let out = run_experiment::<f64>(&data, cfg)?;
        let tag = format!("{}{}_m{}", pair.0, pair.1, cfg.model.variant);
        write_curves_csv(&dir.join(format!("curves_{tag}.csv")), &out.result)?;
        save_checkpoints(&dir.join("checkpoints"), &format!("{tag}_"), &out)?;
        println!("finished {}/{} with model {}", pair.0, pair.1, cfg.model.variant);
        results.push(out.result);
    }
    write_results_csv(&dir.join("results.csv"), &results)?;
    write_results_json(&dir.join("results.json"), &results)?;
    print_summary(&results);
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> CliResult {
    let source = Source::from_args(&args.source)?;
    let wanted = args.model.as_deref().map(parse_variant).transpose()?;
    let ckpt = Checkpoint::load(&args.checkpoint)?;
    let seq_len = ckpt.seq_len;
    if let Some(requested) = args.source.seq_len.filter(|&l| l != seq_len) {
        return usage(format!(
            "--seq-len {requested} conflicts with the checkpoint's seq_len {seq_len}"
        ));
    }
    let standardize = ckpt.standardize || args.source.standardize;
    print_config(&json!({
        "command": "evaluate",
        "checkpoint": args.checkpoint,
        "source": source.describe(),
        "model": wanted.map(|v| v.to_string()),
        "seq_len": seq_len,
        "standardize": standardize,
        "threshold": args.threshold,
        "out": args.out,
    }));

    let expected = wanted.map(|variant| ModelConfig {
        variant,
        ..ckpt.model_config.clone()
    });
    let model = ckpt.to_model::<f64>(expected.as_ref())?;
    let data = source.load(seq_len, standardize)?;
    let (report, _) = evaluate(&model, &data.samples, args.threshold)?;
    let text =
        serde_json::to_string_pretty(&json!({ "dataset": data.name, "metrics": report })).expect("report serializes");
    println!("{text}");
    if let Some(path) = &args.out {
        fs::write(path, text)?;
    }
    Ok(())
}

fn cmd_gen_synth(args: GenSynthArgs) -> CliResult {
    let spec: SyntheticSpec = args
        .synthetic
        .parse()
        .map_err(|e: eeg_lstm::Error| Failure::Usage(e.to_string()))?;
    let pair = parse_pair(&args.pair).map_err(|e| Failure::Usage(e.to_string()))?;
    if !(args.scale.is_finite() && args.scale > 0.0) {
        return usage("--scale must be positive");
    }
    print_config(&json!({
        "command": "gen-synth",
        "spec": spec.to_string(),
        "pair": format!("{},{}", pair.0, pair.1),
        "scale": args.scale,
        "out": args.out,
    }));

    let data = gen_synthetic(&spec)?;
    for (label, set) in [(0u8, pair.0), (1u8, pair.1)] {
        let scaled: Vec<Vec<f64>> = data
            .samples
            .iter()
            .filter(|s| s.label == label)
            .map(|s| s.values.iter().map(|v| v * args.scale).collect())
            .collect();
        let dir = args.out.join(set.to_string());
        let files = write_bonn_set(&dir, set, scaled.iter().map(Vec::as_slice))?;
        println!("wrote {} files to {}", files.len(), dir.display());
    }
    Ok(())
}

fn cmd_gradcheck(args: GradcheckArgs) -> CliResult {
    let variants = match args.model.as_deref() {
        Some(m) => vec![parse_variant(m)?],
        None => vec![ModelVariant::Model1, ModelVariant::Model2],
    };
    let mut specs: Vec<GradcheckSpec> = if args.hidden.is_none() && args.steps.is_none() {
        default_suite(args.seed)
            .into_iter()
            .filter(|s| variants.contains(&s.variant))
            .collect()
    } else {
        let hidden = args.hidden.unwrap_or(4);
        let steps = args.steps.unwrap_or(5);
        if hidden == 0 || steps == 0 {
            return usage("--hidden and --steps must be positive");
        }
        variants
            .iter()
            .map(|&v| GradcheckSpec::new(v, hidden, steps, args.seed))
            .collect()
    };
    for s in &mut specs {
        s.perturb_backward = args.perturb_backward;
    }
    print_config(&json!({ "command": "gradcheck", "cases": specs }));

    let mut all_passed = true;
    for spec in &specs {
        let report = gradcheck(spec)?;
        println!(
            "model {} hidden {} steps {}: max relative error {:.3e} {}",
            spec.variant,
            spec.hidden,
            spec.steps,
            report.max_error,
            if report.passed { "ok" } else { "FAILED" }
        );
        for b in &report.blocks {
            println!("  {:<14} {:.3e}", b.name, b.max_error);
        }
        all_passed &= report.passed;
    }
    if all_passed {
        Ok(())
    } else {
        Err(Failure::Runtime(format!(
            "gradient check exceeded tolerance {:e}",
            specs[0].tolerance
        )))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Reproduce(a) => cmd_reproduce(a),
        Command::GenSynth(a) => cmd_gen_synth(a),
        Command::Gradcheck(a) => cmd_gradcheck(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
