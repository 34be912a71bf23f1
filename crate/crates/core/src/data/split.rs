use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{derive_seed, stream};

/// Index-level partition of a pair dataset into train/validation/test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSplit {
    pub fold_index: usize,
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

impl FoldSplit {
    /// Checks that the three sets partition `0..total`.
    pub fn validate(&self, total: usize) -> Result<()> {
        let mut seen = vec![false; total];
        for &i in self.train.iter().chain(&self.val).chain(&self.test) {
            if i >= total {
                return Err(Error::argument(format!(
                    "split index {i} out of range for {total} samples"
                )));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::argument(format!("split index {i} appears twice")));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::argument("split does not cover every sample"));
        }
        Ok(())
    }
}

/// `k` stratified 70/20/10 splits of a balanced dataset whose first
/// `n_per_class` samples are class 0 and next `n_per_class` are class 1.
///
/// Each fold reshuffles both classes with a seed derived from `(seed, fold)`.
pub fn kfold_split(n_per_class: usize, k: usize, seed: u64) -> Result<Vec<FoldSplit>> {
    if n_per_class == 0 || !n_per_class.is_multiple_of(10) {
        return Err(Error::argument(format!(
            "n_per_class must be a positive multiple of 10, got {n_per_class}"
        )));
    }
    if k == 0 {
        return Err(Error::argument("k must be at least 1"));
    }
    let n_train = n_per_class * 7 / 10;
    let n_val = n_per_class * 2 / 10;
    Ok((0..k)
        .map(|fold| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, stream::SPLIT, fold as u64));
            let mut split = FoldSplit {
                fold_index: fold,
                train: Vec::new(),
                val: Vec::new(),
                test: Vec::new(),
            };
            for class in 0..2 {
                let mut idx: Vec<usize> = (class * n_per_class..(class + 1) * n_per_class).collect();
                idx.shuffle(&mut rng);
                split.train.extend_from_slice(&idx[..n_train]);
                split.val.extend_from_slice(&idx[n_train..n_train + n_val]);
                split.test.extend_from_slice(&idx[n_train + n_val..]);
            }
            split.train.sort_unstable();
            split.val.sort_unstable();
            split.test.sort_unstable();
            split
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bonn_pair_sizes() {
        let folds = kfold_split(100, 10, 7).unwrap();
        assert_eq!(folds.len(), 10);
        for f in &folds {
            assert_eq!((f.train.len(), f.val.len(), f.test.len()), (140, 40, 20));
            let pos = |v: &[usize]| v.iter().filter(|&&i| i >= 100).count();
            assert_eq!((pos(&f.train), pos(&f.val), pos(&f.test)), (70, 20, 10));
            f.validate(200).unwrap();
        }
        assert_ne!(folds[0], folds[1]);
    }

    #[test]
    fn deterministic() {
        assert_eq!(kfold_split(100, 3, 11).unwrap(), kfold_split(100, 3, 11).unwrap());
        assert_ne!(kfold_split(100, 1, 11).unwrap(), kfold_split(100, 1, 12).unwrap());
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(kfold_split(95, 10, 0).is_err());
        assert!(kfold_split(0, 10, 0).is_err());
        assert!(kfold_split(100, 0, 0).is_err());
    }

    #[test]
    fn validate_catches_overlap() {
        let mut f = kfold_split(10, 1, 0).unwrap().remove(0);
        f.val.push(f.train[0]);
        assert!(f.validate(20).is_err());
    }

    proptest! {
        #[test]
        fn every_fold_is_a_stratified_partition(tens in 1usize..12, k in 1usize..5, seed in any::<u64>()) {
            let n = tens * 10;
            for f in kfold_split(n, k, seed).unwrap() {
                f.validate(2 * n).unwrap();
                let pos = |v: &[usize]| v.iter().filter(|&&i| i >= n).count();
                prop_assert_eq!(pos(&f.train), 7 * tens);
                prop_assert_eq!(pos(&f.val), 2 * tens);
                prop_assert_eq!(pos(&f.test), tens);
                prop_assert_eq!(f.train.len(), 14 * tens);
            }
        }
    }
}
