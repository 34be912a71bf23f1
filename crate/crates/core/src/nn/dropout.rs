//! Inverted dropout: survivors are scaled by `1/(1-p)` at train time so that
//! evaluation is the identity.

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Vector;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

/// Per-entry multipliers: `0` for dropped entries, `1/(1-p)` for survivors.
#[derive(Clone, Debug, PartialEq)]
pub struct DropoutMask<T>(Vec<T>);

impl<T: Scalar> DropoutMask<T> {
    pub fn factors(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Draws a fresh mask of `len` entries.
    pub fn sample<R: Rng + ?Sized>(len: usize, p: f64, rng: &mut R) -> Result<Self> {
        check_prob(p)?;
        let keep = T::of(1.0 / (1.0 - p));
        Ok(Self(
            (0..len)
                .map(|_| if rng.random::<f64>() < p { T::zero() } else { keep })
                .collect(),
        ))
    }

    /// Multiplies `values` by the mask in place; also the backward rule.
    pub fn apply(&self, values: &mut [T]) {
        debug_assert_eq!(values.len(), self.0.len());
        for (v, &m) in values.iter_mut().zip(&self.0) {
            *v *= m;
        }
    }
}

pub(crate) fn check_prob(p: f64) -> Result<()> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::argument(format!("dropout probability {p} outside [0, 1)")));
    }
    Ok(())
}

/// Applies dropout to `v`. In train mode the mask is returned for the backward pass.
pub fn dropout_forward<T: Scalar, R: Rng + ?Sized>(
    v: &Vector<T>,
    p: f64,
    rng: &mut R,
    mode: Mode,
) -> Result<(Vector<T>, Option<DropoutMask<T>>)> {
    check_prob(p)?;
    match mode {
        Mode::Eval => Ok((v.clone(), None)),
        Mode::Train => {
            let mask = DropoutMask::sample(v.len(), p, rng)?;
            let mut out = v.clone();
            mask.apply(out.as_mut_slice());
            Ok((out, Some(mask)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn eval_is_identity() {
        let v = Vector::from(vec![1.5, -2.0, 0.25]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (out, mask) = dropout_forward(&v, 0.35, &mut rng, Mode::Eval).unwrap();
        assert_eq!(out, v);
        assert!(mask.is_none());
    }

    #[test]
    fn zero_probability_train_is_identity() {
        let v = Vector::from(vec![1.5, -2.0, 0.25]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (out, _) = dropout_forward(&v, 0.0, &mut rng, Mode::Train).unwrap();
        assert_eq!(out, v);
    }

    #[test]
    fn rejects_bad_probability() {
        let v = Vector::<f64>::zeros(2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for p in [-0.1, 1.0, 1.5, f64::NAN] {
            assert!(matches!(
                dropout_forward(&v, p, &mut rng, Mode::Eval),
                Err(Error::Argument(_))
            ));
        }
    }

    #[test]
    fn seeded_mask_is_deterministic() {
        let v = Vector::from(vec![1.0; 32]);
        let a = dropout_forward(&v, 0.35, &mut ChaCha8Rng::seed_from_u64(9), Mode::Train).unwrap();
        let b = dropout_forward(&v, 0.35, &mut ChaCha8Rng::seed_from_u64(9), Mode::Train).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn expectation_is_preserved() {
        let v = Vector::from(vec![2.0; 10]);
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let trials = 100_000;
        let mut sum = 0.0;
        for _ in 0..trials {
            let (out, _) = dropout_forward(&v, 0.35, &mut rng, Mode::Train).unwrap();
            sum += out.as_slice().iter().sum::<f64>() / 10.0;
        }
        let mean = sum / trials as f64;
        assert!((mean - 2.0).abs() / 2.0 < 0.01, "mean {mean}");
    }
}
