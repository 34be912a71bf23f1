use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{LabeledSequence, PairDataset};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassSpec {
    pub freq_hz: f64,
    pub amplitude: f64,
    pub noise_sd: f64,
}

/// Two noisy sinusoid classes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub classes: [ClassSpec; 2],
    pub n_per_class: usize,
    pub seq_len: usize,
    pub sample_rate_hz: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    /// 2 Hz against 10 Hz, unit amplitude, noise 0.1, 128 samples at 64 Hz.
    fn default() -> Self {
        Self {
            classes: [
                ClassSpec {
                    freq_hz: 2.0,
                    amplitude: 1.0,
                    noise_sd: 0.1,
                },
                ClassSpec {
                    freq_hz: 10.0,
                    amplitude: 1.0,
                    noise_sd: 0.1,
                },
            ],
            n_per_class: 100,
            seq_len: 128,
            sample_rate_hz: 64.0,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.seq_len < 2 {
            return Err(Error::argument("synthetic seq_len must be at least 2"));
        }
        if !self.sample_rate_hz.is_finite() || self.sample_rate_hz <= 0.0 {
            return Err(Error::argument("sample rate must be positive"));
        }
        if self.n_per_class == 0 {
            return Err(Error::argument("n_per_class must be positive"));
        }
        for c in &self.classes {
            if !c.freq_hz.is_finite() || !c.amplitude.is_finite() || !c.noise_sd.is_finite() || c.noise_sd < 0.0 {
                return Err(Error::argument(format!("invalid class spec {c:?}")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for SyntheticSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b] = &self.classes;
        write!(
            f,
            "f0={},f1={},amp0={},amp1={},noise0={},noise1={},n={},len={},rate={},seed={}",
            a.freq_hz,
            b.freq_hz,
            a.amplitude,
            b.amplitude,
            a.noise_sd,
            b.noise_sd,
            self.n_per_class,
            self.seq_len,
            self.sample_rate_hz,
            self.seed
        )
    }
}

/// `default`, or comma-separated `key=value` overrides of the default spec.
/// Keys: `f0 f1 amp amp0 amp1 noise noise0 noise1 n len rate seed`.
impl FromStr for SyntheticSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut spec = SyntheticSpec::default();
        let s = s.trim();
        if s.is_empty() || s == "default" {
            return Ok(spec);
        }
        for item in s.split(',') {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::argument(format!("synthetic spec item `{item}` is not key=value")))?;
            let bad = || Error::argument(format!("bad value for `{key}`: `{value}`"));
            let real = || value.trim().parse::<f64>().map_err(|_| bad());
            match key.trim() {
                "f0" => spec.classes[0].freq_hz = real()?,
                "f1" => spec.classes[1].freq_hz = real()?,
                "amp" => {
                    let a = real()?;
                    spec.classes[0].amplitude = a;
                    spec.classes[1].amplitude = a;
                }
                "amp0" => spec.classes[0].amplitude = real()?,
                "amp1" => spec.classes[1].amplitude = real()?,
                "noise" => {
                    let n = real()?;
                    spec.classes[0].noise_sd = n;
                    spec.classes[1].noise_sd = n;
                }
                "noise0" => spec.classes[0].noise_sd = real()?,
                "noise1" => spec.classes[1].noise_sd = real()?,
                "n" => spec.n_per_class = value.trim().parse().map_err(|_| bad())?,
                "len" => spec.seq_len = value.trim().parse().map_err(|_| bad())?,
                "rate" => spec.sample_rate_hz = real()?,
                "seed" => spec.seed = value.trim().parse().map_err(|_| bad())?,
                other => return Err(Error::argument(format!("unknown synthetic spec key `{other}`"))),
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Class `c` sample `t`: `amplitude·sin(2π f t / rate) + N(0, noise_sd²)`.
pub fn gen_synthetic(spec: &SyntheticSpec) -> Result<PairDataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut samples = Vec::with_capacity(2 * spec.n_per_class);
    for (label, class) in spec.classes.iter().enumerate() {
        for i in 0..spec.n_per_class {
            let values = (0..spec.seq_len)
                .map(|t| {
                    let phase = 2.0 * PI * class.freq_hz * t as f64 / spec.sample_rate_hz;
                    let noise: f64 = rng.sample(StandardNormal);
                    class.amplitude * phase.sin() + class.noise_sd * noise
                })
                .collect();
            samples.push(LabeledSequence {
                values,
                label: label as u8,
                source_id: format!("syn{label}:{i:03}"),
            });
        }
    }
    PairDataset::new("synthetic".into(), None, samples)
}
