//! JSON checkpoints: model config, named flat tensors and training provenance.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{Model, ModelConfig};
use crate::scalar::Scalar;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorRecord {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub epoch: usize,
    pub val_accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format_version: u32,
    pub model_config: ModelConfig,
    pub seq_len: usize,
    pub standardize: bool,
    pub tensors: Vec<TensorRecord>,
    pub provenance: Provenance,
}

impl Checkpoint {
    pub fn from_model<T: Scalar>(model: &Model<T>, standardize: bool, provenance: Provenance) -> Self {
        let tensors = model
            .params()
            .blocks()
            .into_iter()
            .map(|b| TensorRecord {
                name: b.name,
                shape: b.shape,
                data: b.data.iter().map(|v| v.as_f64()).collect(),
            })
            .collect();
        Self {
            format_version: FORMAT_VERSION,
            model_config: model.config().clone(),
            seq_len: model.config().seq_len,
            standardize,
            tensors,
            provenance,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::checkpoint("document", e.to_string()))?;
        match value.get("format_version").and_then(serde_json::Value::as_u64) {
            Some(v) if v == u64::from(FORMAT_VERSION) => {}
            Some(v) => {
                return Err(Error::checkpoint(
                    "format_version",
                    format!("unsupported version {v}, expected {FORMAT_VERSION}"),
                ))
            }
            None => return Err(Error::checkpoint("format_version", "missing")),
        }
        let ckpt: Self = serde_json::from_value(value).map_err(|e| Error::checkpoint("document", e.to_string()))?;
        if ckpt.seq_len != ckpt.model_config.seq_len {
            return Err(Error::checkpoint(
                "seq_len",
                format!(
                    "{} disagrees with model_config.seq_len {}",
                    ckpt.seq_len, ckpt.model_config.seq_len
                ),
            ));
        }
        Ok(ckpt)
    }

    /// Rebuilds the model, checking every tensor against the shapes implied
    /// by the stored config and, if given, against `expected`.
    pub fn to_model<T: Scalar>(&self, expected: Option<&ModelConfig>) -> Result<Model<T>> {
        let config = &self.model_config;
        if let Some(want) = expected {
            if want.variant != config.variant {
                return Err(Error::checkpoint(
                    "model_config.variant",
                    format!(
                        "checkpoint holds model {}, requested model {}",
                        config.variant, want.variant
                    ),
                ));
            }
            if want.hidden != config.hidden || want.input_dim != config.input_dim {
                return Err(Error::checkpoint(
                    "model_config.hidden",
                    format!("checkpoint layers {:?}, requested {:?}", config.hidden, want.hidden),
                ));
            }
            if want.seq_len != config.seq_len {
                return Err(Error::checkpoint(
                    "seq_len",
                    format!("checkpoint seq_len {}, requested {}", config.seq_len, want.seq_len),
                ));
            }
        }
        config
            .validate()
            .map_err(|e| Error::checkpoint("model_config", e.to_string()))?;

        let mut model = Model::<T>::zeros(config.clone())?;
        let layout: Vec<(String, Vec<usize>)> =
            model.params().blocks().into_iter().map(|b| (b.name, b.shape)).collect();
        if layout.len() != self.tensors.len() {
            return Err(Error::checkpoint(
                "tensors",
                format!("expected {} tensors, found {}", layout.len(), self.tensors.len()),
            ));
        }
        let mut flat = Vec::with_capacity(model.param_count());
        for ((name, shape), rec) in layout.iter().zip(&self.tensors) {
            let field = format!("tensors.{name}");
            if &rec.name != name {
                return Err(Error::checkpoint(
                    field,
                    format!("found tensor `{}` in its place", rec.name),
                ));
            }
            if &rec.shape != shape {
                return Err(Error::checkpoint(
                    field,
                    format!("shape {:?}, expected {:?}", rec.shape, shape),
                ));
            }
            if rec.data.len() != shape.iter().product::<usize>() {
                return Err(Error::checkpoint(
                    field,
                    format!("{} values for shape {:?}", rec.data.len(), shape),
                ));
            }
            flat.extend(rec.data.iter().map(|&v| T::of(v)));
        }
        model.params_mut().set_flat(&flat)?;
        Ok(model)
    }
}
