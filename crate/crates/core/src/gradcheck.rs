//! Finite-difference check of the model's backward pass.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::Result;
use crate::nn::{init_params, Mode, Model, ModelConfig, ModelVariant};
use crate::optim::bce_loss;
use crate::seed::{derive_seed, stream};

/// Denominator floor for [`relative_error`]. Below this magnitude both
/// gradients are effectively zero and the absolute difference is compared.
pub const RELATIVE_FLOOR: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradcheckSpec {
    pub variant: ModelVariant,
    /// Top-layer width; Model 2's lower layer is twice as wide.
    pub hidden: usize,
    pub steps: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub tolerance: f64,
    /// Scales every analytic gradient by 1.001 before comparing. Exists so a
    /// broken backward pass can be shown to fail the check.
    pub perturb_backward: bool,
}

impl GradcheckSpec {
    pub fn new(variant: ModelVariant, hidden: usize, steps: usize, seed: u64) -> Self {
        Self {
            variant,
            hidden,
            steps,
            seed,
            epsilon: 1e-5,
            tolerance: 1e-5,
            perturb_backward: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockError {
    pub name: String,
    pub max_error: f64,
    pub worst_index: usize,
    pub analytic: f64,
    pub numeric: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradcheckReport {
    pub spec: GradcheckSpec,
    pub blocks: Vec<BlockError>,
    pub max_error: f64,
    pub passed: bool,
}

/// `|a - n| / max(|a|, |n|, RELATIVE_FLOOR)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(RELATIVE_FLOOR)
}

/// h ∈ {4, 8} × steps ∈ {5, 20} × both variants.
pub fn default_suite(seed: u64) -> Vec<GradcheckSpec> {
    let mut out = Vec::new();
    for variant in [ModelVariant::Model1, ModelVariant::Model2] {
        for hidden in [4, 8] {
            for steps in [5, 20] {
                out.push(GradcheckSpec::new(variant, hidden, steps, seed));
            }
        }
    }
    out
}

/// A seeded model with every bias moved off its initial value, plus a
/// Gaussian input sequence and a label.
pub fn probe(spec: &GradcheckSpec) -> Result<(Model<f64>, Vec<f64>, u8)> {
    let config = ModelConfig::scaled(spec.variant, spec.hidden, spec.steps);
    let mut model = init_params::<f64>(&config, derive_seed(spec.seed, stream::INIT, 0))?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, stream::INIT, 1));
    let mut flat = model.params().flatten();
    for v in &mut flat {
        *v += 0.1 * rng.sample::<f64, _>(StandardNormal);
    }
    model.params_mut().set_flat(&flat)?;
    let input: Vec<f64> = (0..spec.steps).map(|_| rng.sample(StandardNormal)).collect();
    let label = rng.random_range(0..2u8);
    Ok((model, input, label))
}

fn loss(model: &Model<f64>, input: &[f64], label: u8) -> Result<f64> {
    Ok(bce_loss(model.predict(input)?, label)?.0)
}

pub fn gradcheck(spec: &GradcheckSpec) -> Result<GradcheckReport> {
    let (mut model, input, label) = probe(spec)?;
    let mut unused = ChaCha8Rng::seed_from_u64(0);
    let cache = model.forward(&input, Mode::Eval, &mut unused)?;
    let (_, d_prob) = bce_loss(cache.prob, label)?;
    let mut analytic = model.backward(&cache, d_prob)?.flatten();
    if spec.perturb_backward {
        analytic.iter_mut().for_each(|g| *g *= 1.001);
    }

    let base = model.params().flatten();
    let layout: Vec<(String, usize)> = model
        .params()
        .blocks()
        .into_iter()
        .map(|b| (b.name, b.data.len()))
        .collect();
    let mut blocks = Vec::with_capacity(layout.len());
    let mut probe = base.clone();
    let mut offset = 0;
    for (name, len) in layout {
        let mut worst = BlockError {
            name,
            max_error: 0.0,
            worst_index: 0,
            analytic: 0.0,
            numeric: 0.0,
        };
        for i in offset..offset + len {
            probe[i] = base[i] + spec.epsilon;
            model.params_mut().set_flat(&probe)?;
            let plus = loss(&model, &input, label)?;
            probe[i] = base[i] - spec.epsilon;
            model.params_mut().set_flat(&probe)?;
            let minus = loss(&model, &input, label)?;
            probe[i] = base[i];
            let numeric = (plus - minus) / (2.0 * spec.epsilon);
            let err = relative_error(analytic[i], numeric);
            if err > worst.max_error || i == offset {
                worst.max_error = err;
                worst.worst_index = i - offset;
                worst.analytic = analytic[i];
                worst.numeric = numeric;
            }
        }
        offset += len;
        blocks.push(worst);
    }
    let max_error = blocks.iter().map(|b| b.max_error).fold(0.0, f64::max);
    Ok(GradcheckReport {
        spec: spec.clone(),
        passed: max_error < spec.tolerance,
        blocks,
        max_error,
    })
}
