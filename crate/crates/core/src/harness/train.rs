use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::metrics::{metrics_from_scores, MetricsReport};
use crate::data::{FoldSplit, LabeledSequence, PairDataset};
use crate::error::{Error, Result};
use crate::nn::{init_params, Mode, Model, ModelConfig};
use crate::optim::{adam_step, bce_loss, AdamState, TrainConfig};
use crate::scalar::Scalar;
use crate::seed::{derive_seed, stream};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    /// 1-based.
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub val_accuracy: f64,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome<T> {
    pub final_model: Model<T>,
    /// Snapshot with the highest validation accuracy; the earliest epoch wins ties.
    pub best_model: Model<T>,
    /// 0 when no epoch ran and the best model is the initialization.
    pub best_epoch: usize,
    pub best_val_accuracy: f64,
    pub curves: Vec<EpochRecord>,
}

/// Model scores plus mean BCE for a list of samples, in eval mode.
pub fn score<T: Scalar>(model: &Model<T>, samples: &[&LabeledSequence]) -> Result<(Vec<f64>, f64)> {
    let mut scores = Vec::with_capacity(samples.len());
    let mut loss = 0.0;
    for s in samples {
        let input: Vec<T> = s.values.iter().map(|&v| T::of(v)).collect();
        let p = model.predict(&input)?;
        loss += bce_loss(p, s.label)?.0.as_f64();
        scores.push(p.as_f64());
    }
    Ok((scores, loss / samples.len().max(1) as f64))
}

/// Scores every sample and derives the metrics at `threshold`.
pub fn evaluate<'a, T: Scalar>(
    model: &Model<T>,
    samples: impl IntoIterator<Item = &'a LabeledSequence>,
    threshold: f64,
) -> Result<(MetricsReport, Vec<f64>)> {
    let samples: Vec<&LabeledSequence> = samples.into_iter().collect();
    if let Some(s) = samples
        .iter()
        .find(|s| s.values.len() != model.config().seq_len * model.config().input_dim)
    {
        return Err(Error::Shape {
            op: "evaluate",
            left: (model.config().seq_len, model.config().input_dim),
            right: (s.values.len(), 1),
        });
    }
    let (scores, _) = score(model, &samples)?;
    let labels: Vec<u8> = samples.iter().map(|s| s.label).collect();
    Ok((metrics_from_scores(&scores, &labels, threshold)?, scores))
}

fn pick<'a>(data: &'a PairDataset, idx: &[usize]) -> Vec<&'a LabeledSequence> {
    idx.iter().map(|&i| &data.samples[i]).collect()
}

/// Mini-batch Adam on the training indices of `split`, evaluating on the
/// validation indices after every epoch.
///
/// All randomness (initialization, shuffling, dropout masks) is derived from
/// `tcfg.seed`.
pub fn train_model<T: Scalar>(
    config: &ModelConfig,
    tcfg: &TrainConfig,
    split: &FoldSplit,
    data: &PairDataset,
) -> Result<TrainOutcome<T>> {
    config.validate()?;
    tcfg.validate()?;
    split.validate(data.len())?;
    if split.train.is_empty() || split.val.is_empty() {
        return Err(Error::argument("training and validation sets must be non-empty"));
    }
    if data.seq_len() != config.seq_len * config.input_dim {
        return Err(Error::Shape {
            op: "train_model",
            left: (config.seq_len, config.input_dim),
            right: (data.seq_len(), 1),
        });
    }

    let mut model: Model<T> = init_params(config, derive_seed(tcfg.seed, stream::INIT, 0))?;
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(derive_seed(tcfg.seed, stream::SHUFFLE, 0));
    let mut dropout_rng = ChaCha8Rng::seed_from_u64(derive_seed(tcfg.seed, stream::DROPOUT, 0));

    let inputs: Vec<Vec<T>> = data
        .samples
        .iter()
        .map(|s| s.values.iter().map(|&v| T::of(v)).collect())
        .collect();
    let val = pick(data, &split.val);
    let val_labels: Vec<u8> = val.iter().map(|s| s.label).collect();

    let mut flat = model.params().flatten();
    let mut adam = AdamState::new(flat.len());
    let mut grad_sum = vec![T::zero(); flat.len()];
    let mut order = split.train.clone();
    let mut curves = Vec::with_capacity(tcfg.epochs);
    let mut best_model = model.clone();
    let mut best_epoch = 0;
    let mut best_val_accuracy = f64::NEG_INFINITY;

    for epoch in 1..=tcfg.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut loss_sum = 0.0;
        for batch in order.chunks(tcfg.batch_size) {
            grad_sum.iter_mut().for_each(|g| *g = T::zero());
            for &i in batch {
                let cache = model.forward(&inputs[i], Mode::Train, &mut dropout_rng)?;
                let (loss, d_prob) = bce_loss(cache.prob, data.samples[i].label)?;
                loss_sum += loss.as_f64();
                let grads = model.backward(&cache, d_prob)?;
                for (acc, g) in grad_sum.iter_mut().zip(grads.flatten()) {
                    *acc += g;
                }
            }
            let scale = T::one() / T::of(batch.len() as f64);
            grad_sum.iter_mut().for_each(|g| *g *= scale);
            adam_step(&mut flat, &grad_sum, &mut adam, tcfg)?;
            model.params_mut().set_flat(&flat)?;
        }

        let (scores, val_loss) = score(&model, &val)?;
        let val_accuracy = metrics_from_scores(&scores, &val_labels, super::metrics::DEFAULT_THRESHOLD)?.accuracy;
        curves.push(EpochRecord {
            epoch,
            train_loss: loss_sum / order.len() as f64,
            val_loss,
            val_accuracy,
        });
        if val_accuracy > best_val_accuracy {
            best_val_accuracy = val_accuracy;
            best_epoch = epoch;
            best_model = model.clone();
        }
    }

    if tcfg.epochs == 0 {
        let (scores, _) = score(&model, &val)?;
        best_val_accuracy = metrics_from_scores(&scores, &val_labels, super::metrics::DEFAULT_THRESHOLD)?.accuracy;
    }

    Ok(TrainOutcome {
        final_model: model,
        best_model,
        best_epoch,
        best_val_accuracy,
        curves,
    })
}
