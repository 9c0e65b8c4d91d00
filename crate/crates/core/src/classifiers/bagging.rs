use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{train, Structure, TrainedModel};
use super::{ClassDistribution, ClassifierSpec};
use crate::dataset::{Dataset, N_CLASSES};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct Bagging {
    members: Vec<TrainedModel>,
}

/// Bootstrap indices for member `member`: `n` draws with replacement from a
/// stream seeded with `seed + member`.
fn bootstrap(n: usize, seed: u64, member: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(member as u64));
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

pub fn train_bagging(ds: &Dataset, base: &ClassifierSpec, iterations: usize, seed: u64) -> Result<TrainedModel> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if iterations < 1 {
        return Err(Error::invalid("bagging iterations must be >= 1"));
    }
    let samples = (0..iterations).map(|m| bootstrap(ds.len(), seed, m)).collect();
    train_with(ds, base, samples, seed)
}

/// Bagging over caller-supplied resamples, one member per entry.
pub fn train_bagging_with_samples(ds: &Dataset, base: &ClassifierSpec, samples: Vec<Vec<usize>>) -> Result<TrainedModel> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if samples.is_empty() || samples.iter().any(|s| s.is_empty() || s.iter().any(|&i| i >= ds.len())) {
        return Err(Error::invalid("bagging samples must be non-empty index lists into the dataset"));
    }
    train_with(ds, base, samples, 0)
}

fn train_with(ds: &Dataset, base: &ClassifierSpec, samples: Vec<Vec<usize>>, seed: u64) -> Result<TrainedModel> {
    let iterations = samples.len();
    let members = samples
        .into_par_iter()
        .enumerate()
        .map(|(m, idx)| train(&ds.subset(&idx), base, seed.wrapping_add(m as u64)))
        .collect::<Result<Vec<_>>>()?;
    let spec = ClassifierSpec::Bagging {
        iterations,
        base: Box::new(base.clone()),
    };
    Ok(TrainedModel::new(spec, ds, None, Structure::Bagging(Bagging { members })))
}

impl Bagging {
    /// Fraction of member votes per class.
    pub(crate) fn distribution(&self, x: &[f64]) -> ClassDistribution {
        let mut votes = [0usize; N_CLASSES];
        for m in &self.members {
            votes[m.predict_unchecked(x).index()] += 1;
        }
        ClassDistribution::from_counts(&votes)
    }

    #[cfg(test)]
    pub(crate) fn members(&self) -> &[TrainedModel] {
        &self.members
    }
}
