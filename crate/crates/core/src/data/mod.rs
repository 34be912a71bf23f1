//! EEG corpora: the five-set Bonn layout, pairwise classification datasets,
//! synthetic stand-ins and stratified train/validation/test splits.

mod bonn;
mod split;
mod synthetic;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bonn::{find_set_dir, load_bonn_set, write_bonn_set, BonnSet, LoadOptions, Recording, BONN_FILES_PER_SET};
pub use split::{kfold_split, FoldSplit};
pub use synthetic::{gen_synthetic, ClassSpec, SyntheticSpec};

/// One of the five Bonn recording sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SetId {
    A,
    B,
    C,
    D,
    E,
}

impl SetId {
    pub const ALL: [SetId; 5] = [SetId::A, SetId::B, SetId::C, SetId::D, SetId::E];

    pub fn letter(self) -> char {
        match self {
            SetId::A => 'A',
            SetId::B => 'B',
            SetId::C => 'C',
            SetId::D => 'D',
            SetId::E => 'E',
        }
    }

    /// Letter used by the published archives and file names (Z, O, N, F, S).
    pub fn archive_letter(self) -> char {
        match self {
            SetId::A => 'Z',
            SetId::B => 'O',
            SetId::C => 'N',
            SetId::D => 'F',
            SetId::E => 'S',
        }
    }
}

impl fmt::Display for SetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for SetId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        SetId::ALL
            .into_iter()
            .find(|id| upper.len() == 1 && (upper.starts_with(id.letter()) || upper.starts_with(id.archive_letter())))
            .ok_or_else(|| Error::argument(format!("unknown set `{s}` (expected one of A-E)")))
    }
}

/// Parses `"A,E"` into a pair of sets.
pub fn parse_pair(s: &str) -> Result<(SetId, SetId)> {
    let parts: Vec<&str> = s.split([',', '/']).collect();
    match parts.as_slice() {
        [a, b] => Ok((a.parse()?, b.parse()?)),
        _ => Err(Error::argument(format!("pair `{s}` must look like X,Y"))),
    }
}

/// The six pairings evaluated in the reference experiments, with the model each uses.
pub const REFERENCE_PAIRS: [(SetId, SetId, u8); 6] = [
    (SetId::A, SetId::E, 1),
    (SetId::B, SetId::E, 1),
    (SetId::C, SetId::E, 1),
    (SetId::D, SetId::E, 1),
    (SetId::A, SetId::D, 2),
    (SetId::B, SetId::D, 2),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledSequence {
    pub values: Vec<f64>,
    pub label: u8,
    pub source_id: String,
}

/// Two-class corpus. Class 0 samples come first, then class 1.
#[derive(Clone, Debug, PartialEq)]
pub struct PairDataset {
    /// `"A/E"` for Bonn pairs, `"synthetic"` otherwise.
    pub name: String,
    pub pair: Option<(SetId, SetId)>,
    pub samples: Vec<LabeledSequence>,
    pub standardized: bool,
}

impl PairDataset {
    pub(crate) fn new(name: String, pair: Option<(SetId, SetId)>, samples: Vec<LabeledSequence>) -> Result<Self> {
        let ds = Self {
            name,
            pair,
            samples,
            standardized: false,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        let ones = self.samples.iter().filter(|s| s.label == 1).count();
        let zeros = self.samples.iter().filter(|s| s.label == 0).count();
        if ones + zeros != self.samples.len() {
            return Err(Error::argument("labels must be 0 or 1"));
        }
        if ones != zeros || ones == 0 {
            return Err(Error::argument(format!(
                "classes must be balanced and non-empty, got {zeros}/{ones}"
            )));
        }
        let len = self.seq_len();
        if self.samples.iter().any(|s| s.values.len() != len) {
            return Err(Error::argument("all sequences must have the same length"));
        }
        if self.samples.iter().any(|s| s.values.iter().any(|v| !v.is_finite())) {
            return Err(Error::argument("sequence values must be finite"));
        }
        if self.samples[..zeros].iter().any(|s| s.label != 0) {
            return Err(Error::argument("class 0 samples must precede class 1"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn n_per_class(&self) -> usize {
        self.samples.len() / 2
    }

    pub fn seq_len(&self) -> usize {
        self.samples.first().map_or(0, |s| s.values.len())
    }

    pub fn labels(&self) -> Vec<u8> {
        self.samples.iter().map(|s| s.label).collect()
    }

    /// Keeps the first `seq_len` samples of every sequence.
    pub fn truncated(mut self, seq_len: usize) -> Result<Self> {
        if seq_len == 0 || seq_len > self.seq_len() {
            return Err(Error::argument(format!(
                "seq_len {seq_len} must be in 1..={}",
                self.seq_len()
            )));
        }
        for s in &mut self.samples {
            s.values.truncate(seq_len);
        }
        Ok(self)
    }

    /// Per-sequence z-scoring. A constant sequence is only centred.
    pub fn standardized(mut self) -> Self {
        for s in &mut self.samples {
            let n = s.values.len() as f64;
            let mean = s.values.iter().sum::<f64>() / n;
            let var = s.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            let sd = var.sqrt();
            let scale = if sd > 0.0 { 1.0 / sd } else { 1.0 };
            s.values.iter_mut().for_each(|v| *v = (*v - mean) * scale);
        }
        self.standardized = true;
        self
    }
}

/// Labels the first set 0 and the second set 1.
pub fn make_pair_dataset(first: &BonnSet, second: &BonnSet) -> Result<PairDataset> {
    let len_of = |s: &BonnSet| s.recordings.first().map(|r| r.values.len());
    if first.recordings.len() != second.recordings.len() || len_of(first) != len_of(second) {
        return Err(Error::argument(format!(
            "sets {} and {} differ in size or sequence length",
            first.id, second.id
        )));
    }
    let mut samples = Vec::with_capacity(first.recordings.len() * 2);
    for (set, label) in [(first, 0u8), (second, 1u8)] {
        samples.extend(set.recordings.iter().map(|r| LabeledSequence {
            values: r.values.clone(),
            label,
            source_id: r.source_id.clone(),
        }));
    }
    PairDataset::new(
        format!("{}/{}", first.id, second.id),
        Some((first.id, second.id)),
        samples,
    )
}

/// Loads both sets of `pair` from their directories under `root`.
pub fn load_pair_dataset(root: &Path, pair: (SetId, SetId), opts: &LoadOptions) -> Result<PairDataset> {
    let first = load_bonn_set(&find_set_dir(root, pair.0)?, pair.0, opts)?;
    let second = load_bonn_set(&find_set_dir(root, pair.1)?, pair.1, opts)?;
    make_pair_dataset(&first, &second)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(id: SetId, n: usize, len: usize, offset: f64) -> BonnSet {
        BonnSet {
            id,
            recordings: (0..n)
                .map(|i| Recording {
                    source_id: format!("{id}{i:03}"),
                    values: (0..len).map(|t| offset + (i * len + t) as f64).collect(),
                })
                .collect(),
        }
    }

    #[test]
    fn pair_labels_second_set_positive() {
        let ds = make_pair_dataset(&set(SetId::A, 100, 5, 0.0), &set(SetId::E, 100, 5, 1e6)).unwrap();
        assert_eq!(ds.len(), 200);
        assert_eq!(ds.name, "A/E");
        assert_eq!(ds.labels().iter().filter(|&&l| l == 0).count(), 100);
        assert_eq!(ds.labels().iter().filter(|&&l| l == 1).count(), 100);
        assert!(ds.samples[..100]
            .iter()
            .all(|s| s.label == 0 && s.source_id.starts_with('A')));
        assert!(ds.samples[100..]
            .iter()
            .all(|s| s.label == 1 && s.source_id.starts_with('E')));
    }

    #[test]
    fn self_pairing_is_valid() {
        let a = set(SetId::A, 10, 4, 0.0);
        let ds = make_pair_dataset(&a, &a).unwrap();
        assert_eq!(ds.n_per_class(), 10);
    }

    #[test]
    fn length_mismatch_rejected() {
        let err = make_pair_dataset(&set(SetId::A, 10, 4, 0.0), &set(SetId::E, 10, 5, 0.0)).unwrap_err();
        assert!(matches!(err, Error::Argument(_)));
        assert!(make_pair_dataset(&set(SetId::A, 10, 4, 0.0), &set(SetId::E, 9, 4, 0.0)).is_err());
    }

    #[test]
    fn set_and_pair_parsing() {
        assert_eq!(parse_pair("A,E").unwrap(), (SetId::A, SetId::E));
        assert_eq!(parse_pair("b/d").unwrap(), (SetId::B, SetId::D));
        assert_eq!("S".parse::<SetId>().unwrap(), SetId::E);
        assert!(parse_pair("A").is_err());
        assert!(parse_pair("A,Q").is_err());
    }

    #[test]
    fn standardize_and_truncate() {
        let ds = make_pair_dataset(&set(SetId::A, 2, 6, 0.0), &set(SetId::E, 2, 6, 50.0)).unwrap();
        let z = ds.clone().standardized();
        assert!(z.standardized);
        for s in &z.samples {
            let mean: f64 = s.values.iter().sum::<f64>() / 6.0;
            let var: f64 = s.values.iter().map(|v| v * v).sum::<f64>() / 6.0;
            assert!(mean.abs() < 1e-12 && (var - 1.0).abs() < 1e-12);
        }
        let t = ds.truncated(3).unwrap();
        assert_eq!(t.seq_len(), 3);
        assert!(t.clone().truncated(4).is_err());
    }
}
