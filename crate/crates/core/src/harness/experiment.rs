//! Multi-fold experiment over one pair dataset.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{MetricsReport, DEFAULT_THRESHOLD};
use super::train::{evaluate, train_model, EpochRecord};
use crate::data::{kfold_split, FoldSplit, PairDataset, SetId};
use crate::error::{Error, Result};
use crate::nn::{Model, ModelConfig, ModelVariant};
use crate::optim::TrainConfig;
use crate::scalar::Scalar;
use crate::seed::{derive_seed, stream};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    /// `train.seed` is ignored; each fold gets a seed derived from `seed`.
    pub train: TrainConfig,
    pub folds: usize,
    pub seed: u64,
    /// Worker threads for fold-level parallelism. Does not affect results.
    pub jobs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub seed: u64,
    pub best_epoch: usize,
    pub best_val_accuracy: f64,
    /// Best checkpoint on the validation indices.
    pub val: MetricsReport,
    /// Best checkpoint on the held-out test indices.
    pub test: MetricsReport,
    pub curves: Vec<EpochRecord>,
    pub split: FoldSplit,
}

/// Mean over the folds where the metric is defined.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanValue {
    pub mean: Option<f64>,
    pub defined_folds: usize,
    pub total_folds: usize,
}

impl MeanValue {
    fn of(values: impl Iterator<Item = Option<f64>>) -> Self {
        let mut sum = 0.0;
        let (mut defined, mut total) = (0, 0);
        for v in values {
            total += 1;
            if let Some(v) = v {
                sum += v;
                defined += 1;
            }
        }
        Self {
            mean: (defined > 0).then(|| sum / defined as f64),
            defined_folds: defined,
            total_folds: total,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub val_accuracy: MeanValue,
    pub test_accuracy: MeanValue,
    pub sensitivity: MeanValue,
    pub specificity: MeanValue,
    pub precision: MeanValue,
    pub auc: MeanValue,
}

impl Aggregate {
    pub fn from_folds(folds: &[FoldResult]) -> Self {
        Self {
            val_accuracy: MeanValue::of(folds.iter().map(|f| Some(f.best_val_accuracy))),
            test_accuracy: MeanValue::of(folds.iter().map(|f| Some(f.test.accuracy))),
            sensitivity: MeanValue::of(folds.iter().map(|f| f.test.sensitivity)),
            specificity: MeanValue::of(folds.iter().map(|f| f.test.specificity)),
            precision: MeanValue::of(folds.iter().map(|f| f.test.precision)),
            auc: MeanValue::of(folds.iter().map(|f| f.test.auc)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub dataset: String,
    pub pair: Option<(SetId, SetId)>,
    pub model_variant: ModelVariant,
    pub standardized: bool,
    pub config: ExperimentConfig,
    pub folds: Vec<FoldResult>,
    pub aggregate: Aggregate,
}

pub struct ExperimentOutput<T> {
    pub result: ExperimentResult,
    /// Best checkpoint of each fold, in fold order.
    pub best_models: Vec<Model<T>>,
}

fn run_fold<T: Scalar>(
    cfg: &ExperimentConfig,
    split: &FoldSplit,
    data: &PairDataset,
) -> Result<(FoldResult, Model<T>)> {
    let seed = derive_seed(cfg.seed, stream::FOLD, split.fold_index as u64);
    let tcfg = TrainConfig {
        seed,
        ..cfg.train.clone()
    };
    let outcome = train_model::<T>(&cfg.model, &tcfg, split, data)?;
    let (val, _) = evaluate(
        &outcome.best_model,
        split.val.iter().map(|&i| &data.samples[i]),
        DEFAULT_THRESHOLD,
    )?;
    let (test, _) = evaluate(
        &outcome.best_model,
        split.test.iter().map(|&i| &data.samples[i]),
        DEFAULT_THRESHOLD,
    )?;
    Ok((
        FoldResult {
            fold: split.fold_index,
            seed,
            best_epoch: outcome.best_epoch,
            best_val_accuracy: outcome.best_val_accuracy,
            val,
            test,
            curves: outcome.curves,
            split: split.clone(),
        },
        outcome.best_model,
    ))
}

/// Splits `data` into `cfg.folds` stratified folds, trains a freshly seeded
/// model on each and reports best-checkpoint metrics plus their fold means.
pub fn run_experiment<T: Scalar>(data: &PairDataset, cfg: &ExperimentConfig) -> Result<ExperimentOutput<T>> {
    data.validate()?;
    let splits = kfold_split(data.n_per_class(), cfg.folds, cfg.seed)?;
    let job = |split: &FoldSplit| {
        run_fold::<T>(cfg, split, data).map_err(|e| Error::Fold {
            fold: split.fold_index,
            source: Box::new(e),
        })
    };
    let runs: Vec<(FoldResult, Model<T>)> = if cfg.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| Error::State(format!("thread pool: {e}")))?;
        pool.install(|| splits.par_iter().map(job).collect::<Result<Vec<_>>>())?
    } else {
        splits.iter().map(job).collect::<Result<Vec<_>>>()?
    };
    let (folds, best_models): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
    Ok(ExperimentOutput {
        result: ExperimentResult {
            dataset: data.name.clone(),
            pair: data.pair,
            model_variant: cfg.model.variant,
            standardized: data.standardized,
            config: cfg.clone(),
            aggregate: Aggregate::from_folds(&folds),
            folds,
        },
        best_models,
    })
}
