//! Seeded parameter initialization mirroring the usual Keras defaults:
//! Glorot-uniform input kernels, orthogonal recurrent kernels, zero biases
//! with a unit forget-gate bias.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::lstm::{Gate, LstmLayerParams};
use super::model::{Model, ModelConfig, ModelParams};
use crate::error::Result;
use crate::scalar::Scalar;
use crate::tensor::Matrix;

fn glorot_limit(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

fn init_lstm<T: Scalar>(layer: &mut LstmLayerParams<T>, rng: &mut ChaCha8Rng) -> Result<()> {
    let d = layer.input_dim();
    let h = layer.hidden_dim();

    // Input kernel laid out as one (d × 4h) matrix, gates side by side.
    let limit = glorot_limit(d, 4 * h);
    let kernel = Matrix::from_fn(d, 4 * h, |_, _| rng.random_range(-limit..limit));

    // Recurrent kernel: orthonormal columns of a (4h × h) Gaussian matrix.
    let gaussian = Matrix::from_fn(4 * h, h, |_, _| rng.sample::<f64, _>(StandardNormal));
    let q = gaussian.orthonormal_columns()?;

    for (gi, g) in Gate::ALL.into_iter().enumerate() {
        let w = layer.w_mut(g);
        for k in 0..h {
            for j in 0..d {
                w[k * d + j] = T::of(kernel[(j, gi * h + k)]);
            }
        }
        let u = layer.u_mut(g);
        for k in 0..h {
            for j in 0..h {
                u[k * h + j] = T::of(q[(gi * h + k, j)]);
            }
        }
        let fill = if g == Gate::Forget { T::one() } else { T::zero() };
        layer.b_mut(g).iter_mut().for_each(|b| *b = fill);
    }
    Ok(())
}

/// Fresh parameters for `config`, fully determined by `seed`.
pub fn init_params<T: Scalar>(config: &ModelConfig, seed: u64) -> Result<Model<T>> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = ModelParams::<T>::zeros(config);
    for layer in &mut params.lstm {
        init_lstm(layer, &mut rng)?;
    }
    let limit = glorot_limit(params.dense.input_dim(), 1);
    for w in params.dense.weights.as_mut_slice() {
        *w = T::of(rng.random_range(-limit..limit));
    }
    params.dense.bias = T::zero();
    Model::from_params(config.clone(), params)
}
