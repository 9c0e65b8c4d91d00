use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ClassLabel, Dataset, N_CLASSES};
use crate::error::{Error, Result};

/// Fold index per record for stratified k-fold cross-validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub k: usize,
    pub seed: u64,
    pub folds: Vec<usize>,
}

impl FoldAssignment {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.folds.len()).filter(|&i| self.folds[i] == fold).collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.folds.len()).filter(|&i| self.folds[i] != fold).collect()
    }

    /// Records of `label` in each fold.
    pub fn class_fold_counts(&self, labels: &[ClassLabel], label: ClassLabel) -> Vec<usize> {
        let mut counts = vec![0; self.k];
        for (f, l) in self.folds.iter().zip(labels) {
            if *l == label {
                counts[*f] += 1;
            }
        }
        counts
    }
}

/// Shuffles each class with a seeded RNG and deals its records round-robin.
/// The dealing position carries over from one class to the next, so classes
/// smaller than `k` still spread evenly and every fold is non-empty.
pub fn stratified_folds(ds: &Dataset, k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::invalid(format!("folds must be >= 2, got {k}")));
    }
    if k > ds.len() {
        return Err(Error::invalid(format!(
            "{k} folds requested for {} records",
            ds.len()
        )));
    }
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); N_CLASSES];
    for (i, label) in ds.labels().iter().enumerate() {
        by_class[label.index()].push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![0; ds.len()];
    let mut next = 0;
    for members in &mut by_class {
        members.shuffle(&mut rng);
        for &i in members.iter() {
            folds[i] = next % k;
            next += 1;
        }
    }
    Ok(FoldAssignment { k, seed, folds })
}
