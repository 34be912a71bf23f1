//! The two classifier architectures: a single LSTM layer (Model 1) or two
//! stacked LSTM layers with dropout (Model 2), each read out at the last time
//! step through a sigmoid unit.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::dense::DenseParams;
use super::dropout::{check_prob, DropoutMask, Mode};
use super::lstm::{LstmLayerParams, LstmTrace};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Matrix;

/// Length of a Bonn recording.
pub const CANONICAL_SEQ_LEN: usize = 4097;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelVariant {
    /// One LSTM layer of 64 units.
    Model1,
    /// LSTM(128) → dropout → LSTM(64) → dropout.
    Model2,
}

impl ModelVariant {
    pub fn number(self) -> u8 {
        match self {
            ModelVariant::Model1 => 1,
            ModelVariant::Model2 => 2,
        }
    }

    pub fn layer_count(self) -> usize {
        match self {
            ModelVariant::Model1 => 1,
            ModelVariant::Model2 => 2,
        }
    }
}

impl fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl FromStr for ModelVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" | "model1" | "Model1" => Ok(ModelVariant::Model1),
            "2" | "model2" | "Model2" => Ok(ModelVariant::Model2),
            other => Err(Error::argument(format!(
                "unknown model variant `{other}` (expected 1 or 2)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub variant: ModelVariant,
    /// Hidden units per LSTM layer, bottom to top.
    pub hidden: Vec<usize>,
    /// Applied after every LSTM layer in train mode.
    pub dropout_prob: f64,
    pub input_dim: usize,
    pub seq_len: usize,
}

impl ModelConfig {
    pub fn model1(seq_len: usize) -> Self {
        Self::scaled(ModelVariant::Model1, 64, seq_len)
    }

    pub fn model2(seq_len: usize) -> Self {
        Self::scaled(ModelVariant::Model2, 64, seq_len)
    }

    pub fn for_variant(variant: ModelVariant, seq_len: usize) -> Self {
        Self::scaled(variant, 64, seq_len)
    }

    /// Same topology with the top layer at `hidden` units (Model 2's lower
    /// layer gets twice as many, as in the full-size network).
    pub fn scaled(variant: ModelVariant, hidden: usize, seq_len: usize) -> Self {
        match variant {
            ModelVariant::Model1 => Self {
                variant,
                hidden: vec![hidden],
                dropout_prob: 0.0,
                input_dim: 1,
                seq_len,
            },
            ModelVariant::Model2 => Self {
                variant,
                hidden: vec![2 * hidden, hidden],
                dropout_prob: 0.35,
                input_dim: 1,
                seq_len,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.hidden.len() != self.variant.layer_count() {
            return Err(Error::argument(format!(
                "model {} expects {} LSTM layer(s), config lists {}",
                self.variant,
                self.variant.layer_count(),
                self.hidden.len()
            )));
        }
        if self.hidden.contains(&0) || self.input_dim == 0 || self.seq_len == 0 {
            return Err(Error::argument("layer sizes, input_dim and seq_len must be positive"));
        }
        check_prob(self.dropout_prob)
    }

    pub fn top_hidden(&self) -> usize {
        *self.hidden.last().expect("validated config has a layer")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LayerCount {
    pub name: String,
    pub params: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParamCount {
    pub layers: Vec<LayerCount>,
    pub total: usize,
}

/// Trainable parameters per layer, with zero-parameter dropout rows where the
/// architecture has them.
pub fn param_count(config: &ModelConfig) -> ParamCount {
    let mut layers = Vec::new();
    let mut input_dim = config.input_dim;
    for (i, &h) in config.hidden.iter().enumerate() {
        layers.push(LayerCount {
            name: format!("LSTM_{}", i + 1),
            params: LstmLayerParams::<f64>::count_for(input_dim, h),
        });
        if config.dropout_prob > 0.0 {
            layers.push(LayerCount {
                name: format!("Dropout_{}", i + 1),
                params: 0,
            });
        }
        input_dim = h;
    }
    layers.push(LayerCount {
        name: "Dense_1".into(),
        params: input_dim + 1,
    });
    let total = layers.iter().map(|l| l.params).sum();
    ParamCount { layers, total }
}

/// A named view of one parameter tensor.
#[derive(Debug)]
pub struct ParamBlock<'a, T> {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: &'a [T],
}

/// All trainable tensors of a model. Also used to carry gradients.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams<T> {
    pub lstm: Vec<LstmLayerParams<T>>,
    pub dense: DenseParams<T>,
}

impl<T: Scalar> ModelParams<T> {
    pub fn zeros(config: &ModelConfig) -> Self {
        let mut input_dim = config.input_dim;
        let mut lstm = Vec::with_capacity(config.hidden.len());
        for &h in &config.hidden {
            lstm.push(LstmLayerParams::zeros(input_dim, h));
            input_dim = h;
        }
        Self {
            lstm,
            dense: DenseParams::zeros(input_dim),
        }
    }

    pub fn param_count(&self) -> usize {
        self.lstm.iter().map(LstmLayerParams::param_count).sum::<usize>() + self.dense.param_count()
    }

    /// Blocks in flattening order, named `lstm_<k>.<tensor>` and `dense.w`/`dense.b`.
    pub fn blocks(&self) -> Vec<ParamBlock<'_, T>> {
        let mut out = Vec::new();
        for (i, layer) in self.lstm.iter().enumerate() {
            for (name, shape, data) in layer.blocks() {
                out.push(ParamBlock {
                    name: format!("lstm_{}.{name}", i + 1),
                    shape,
                    data,
                });
            }
        }
        out.push(ParamBlock {
            name: "dense.w".into(),
            shape: vec![1, self.dense.input_dim()],
            data: self.dense.weights.as_slice(),
        });
        out.push(ParamBlock {
            name: "dense.b".into(),
            shape: vec![],
            data: std::slice::from_ref(&self.dense.bias),
        });
        out
    }

    pub fn blocks_mut(&mut self) -> Vec<&mut [T]> {
        let mut out: Vec<&mut [T]> = Vec::new();
        for layer in &mut self.lstm {
            out.extend(layer.blocks_mut());
        }
        out.push(self.dense.weights.as_mut_slice());
        out.push(std::slice::from_mut(&mut self.dense.bias));
        out
    }

    pub fn flatten(&self) -> Vec<T> {
        let mut flat = Vec::with_capacity(self.param_count());
        for b in self.blocks() {
            flat.extend_from_slice(b.data);
        }
        flat
    }

    pub fn set_flat(&mut self, flat: &[T]) -> Result<()> {
        if flat.len() != self.param_count() {
            return Err(Error::Shape {
                op: "set_flat",
                left: (self.param_count(), 1),
                right: (flat.len(), 1),
            });
        }
        let mut offset = 0;
        for block in self.blocks_mut() {
            block.copy_from_slice(&flat[offset..offset + block.len()]);
            offset += block.len();
        }
        Ok(())
    }

    /// `self += alpha * other`, block by block.
    pub fn add_scaled(&mut self, alpha: T, other: &Self) {
        let src = other.flatten();
        let mut offset = 0;
        for block in self.blocks_mut() {
            for v in block.iter_mut() {
                *v += alpha * src[offset];
                offset += 1;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Model<T> {
    config: ModelConfig,
    params: ModelParams<T>,
}

/// Retained state of one forward pass.
#[derive(Clone, Debug)]
pub struct ForwardCache<T> {
    traces: Vec<LstmTrace<T>>,
    /// Dropout mask applied after each LSTM layer, if any was sampled.
    masks: Vec<Option<DropoutMask<T>>>,
    /// Input to the dense unit (top layer's last hidden state after dropout).
    features: Vec<T>,
    pub logit: T,
    pub prob: T,
}

impl<T: Scalar> ForwardCache<T> {
    pub fn traces(&self) -> &[LstmTrace<T>] {
        &self.traces
    }

    pub fn masks(&self) -> &[Option<DropoutMask<T>>] {
        &self.masks
    }
}

impl<T: Scalar> Model<T> {
    /// A model with every parameter zero.
    pub fn zeros(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        let params = ModelParams::zeros(&config);
        Ok(Self { config, params })
    }

    pub fn from_params(config: ModelConfig, params: ModelParams<T>) -> Result<Self> {
        config.validate()?;
        let expected = ModelParams::<T>::zeros(&config);
        let shapes = |p: &ModelParams<T>| p.blocks().into_iter().map(|b| b.shape).collect::<Vec<_>>();
        if shapes(&expected) != shapes(&params) {
            return Err(Error::argument("parameter shapes do not match the model config"));
        }
        Ok(Self { config, params })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut ModelParams<T> {
        &mut self.params
    }

    pub fn param_count(&self) -> usize {
        self.params.param_count()
    }

    fn check_input(&self, seq: &[T]) -> Result<Matrix<T>> {
        let expected = self.config.seq_len * self.config.input_dim;
        if seq.len() != expected {
            return Err(Error::Shape {
                op: "model input",
                left: (self.config.seq_len, self.config.input_dim),
                right: (seq.len(), 1),
            });
        }
        Matrix::new(self.config.seq_len, self.config.input_dim, seq.to_vec())
    }

    /// Forward pass over one sequence (`seq_len × input_dim` values,
    /// row-major). Dropout masks are drawn from `rng` in train mode only.
    pub fn forward(&self, seq: &[T], mode: Mode, rng: &mut dyn RngCore) -> Result<ForwardCache<T>> {
        match mode {
            Mode::Train => self.run(seq, Some(rng)),
            Mode::Eval => self.run(seq, None),
        }
    }

    /// Eval-mode probability for one sequence.
    pub fn predict(&self, seq: &[T]) -> Result<T> {
        Ok(self.run(seq, None)?.prob)
    }

    fn run(&self, seq: &[T], mut rng: Option<&mut dyn RngCore>) -> Result<ForwardCache<T>> {
        let mut inputs = self.check_input(seq)?;
        let p = self.config.dropout_prob;
        let n = self.params.lstm.len();
        let mut traces = Vec::with_capacity(n);
        let mut masks = Vec::with_capacity(n);
        let mut features = Vec::new();
        for (l, layer) in self.params.lstm.iter().enumerate() {
            let trace = layer.forward_trace(&inputs)?;
            let mut out = if l + 1 < n {
                trace.hidden().clone().into_vec()
            } else {
                trace.last_hidden().into_vec()
            };
            let mask = if let (Some(rng), true) = (rng.as_deref_mut(), p > 0.0) {
                let m = DropoutMask::sample(out.len(), p, rng)?;
                m.apply(&mut out);
                Some(m)
            } else {
                None
            };
            if l + 1 < n {
                inputs = Matrix::new(trace.steps(), layer.hidden_dim(), out)?;
            } else {
                features = out;
            }
            traces.push(trace);
            masks.push(mask);
        }
        let logit = self.params.dense.logit(&features)?;
        Ok(ForwardCache {
            traces,
            masks,
            features,
            logit,
            prob: logit.sigmoid(),
        })
    }

    /// Exact gradients of a scalar loss given dL/dp for the cached forward pass.
    pub fn backward(&self, cache: &ForwardCache<T>, d_prob: T) -> Result<ModelParams<T>> {
        let n = self.params.lstm.len();
        if cache.traces.len() != n || cache.masks.len() != n {
            return Err(Error::State(format!(
                "forward cache holds {} layer(s), model has {n}",
                cache.traces.len()
            )));
        }
        let p = cache.prob;
        let d_logit = d_prob * p * (T::one() - p);
        let (dense_grads, mut d_top) = self.params.dense.backward(&cache.features, d_logit);

        let mut grads = ModelParams {
            lstm: Vec::with_capacity(n),
            dense: dense_grads,
        };
        let mut layer_grads = Vec::with_capacity(n);

        // dL/d(hidden sequence) of the layer being processed.
        let top = &cache.traces[n - 1];
        if let Some(mask) = &cache.masks[n - 1] {
            mask.apply(&mut d_top);
        }
        let mut d_hidden = Matrix::zeros(top.steps(), self.params.lstm[n - 1].hidden_dim());
        d_hidden.row_mut(top.steps() - 1).copy_from_slice(&d_top);

        for l in (0..n).rev() {
            let (g, mut d_inputs) = self.params.lstm[l].backward(&cache.traces[l], &d_hidden)?;
            layer_grads.push(g);
            if l > 0 {
                if let Some(mask) = &cache.masks[l - 1] {
                    mask.apply(d_inputs.as_mut_slice());
                }
                d_hidden = d_inputs;
            }
        }
        layer_grads.reverse();
        grads.lstm = layer_grads;
        Ok(grads)
    }
}
