use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, NormalizationStats, N_CLASSES};
use crate::error::{Error, Result};

use super::AttributeScore;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReliefFParams {
    pub k_neighbors: usize,
    /// `None` uses every instance, in record order.
    pub sample_count: Option<usize>,
    pub seed: u64,
}

impl Default for ReliefFParams {
    fn default() -> Self {
        ReliefFParams {
            k_neighbors: 10,
            sample_count: None,
            seed: 1,
        }
    }
}

/// Multi-class ReliefF with Manhattan distance over range-normalized
/// attributes. Near misses of each other class are weighted by
/// `prior(c) / (1 - prior(class(x)))`. Neighbor ties go to the lower record
/// index.
pub fn relieff_scores(ds: &Dataset, params: &ReliefFParams) -> Result<Vec<AttributeScore>> {
    ds.require_records(2)?;
    if params.k_neighbors < 1 {
        return Err(Error::invalid("ReliefF needs k_neighbors >= 1"));
    }
    let counts = ds.class_distribution();
    if counts.present().len() < 2 {
        return Err(Error::invalid("ReliefF needs at least two classes"));
    }

    let stats = NormalizationStats::fit(ds)?;
    let data: Vec<Vec<f64>> = ds.rows().iter().map(|r| stats.apply(r)).collect();
    let labels: Vec<usize> = ds.labels().iter().map(|l| l.index()).collect();
    let n = ds.len();
    let d = ds.n_attributes();
    let priors: Vec<f64> = counts.0.iter().map(|&c| c as f64 / n as f64).collect();

    let sampled: Vec<usize> = match params.sample_count {
        Some(m) if m < n => {
            if m == 0 {
                return Err(Error::invalid("ReliefF sample_count must be >= 1"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            let mut idx = sample(&mut rng, n, m).into_vec();
            idx.sort_unstable();
            idx
        }
        _ => (0..n).collect(),
    };
    let m = sampled.len() as f64;
    let k = params.k_neighbors;

    let contributions: Vec<Vec<f64>> = sampled
        .par_iter()
        .map(|&r| {
            let own = labels[r];
            let x = &data[r];
            let mut by_class: Vec<Vec<(f64, usize)>> = vec![Vec::new(); N_CLASSES];
            for (j, y) in data.iter().enumerate() {
                if j == r {
                    continue;
                }
                let dist: f64 = x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum();
                by_class[labels[j]].push((dist, j));
            }
            let mut delta = vec![0.0; d];
            for (c, candidates) in by_class.iter_mut().enumerate() {
                if candidates.is_empty() {
                    continue;
                }
                let nearest = k_nearest(candidates, k);
                let weight = if c == own {
                    -1.0
                } else {
                    priors[c] / (1.0 - priors[own])
                };
                let scale = weight / (m * nearest.len() as f64);
                for &(_, j) in nearest {
                    for a in 0..d {
                        delta[a] += scale * (x[a] - data[j][a]).abs();
                    }
                }
            }
            delta
        })
        .collect();

    let mut weights = vec![0.0; d];
    for delta in &contributions {
        for (w, v) in weights.iter_mut().zip(delta) {
            *w += v;
        }
    }
    Ok(ds
        .schema()
        .names()
        .iter()
        .zip(weights)
        .map(|(name, w)| AttributeScore {
            name: name.clone(),
            score: w.clamp(-1.0, 1.0),
        })
        .collect())
}

fn k_nearest(candidates: &mut [(f64, usize)], k: usize) -> &[(f64, usize)] {
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    let k = k.min(candidates.len());
    if k < candidates.len() {
        candidates.select_nth_unstable_by(k - 1, cmp);
    }
    let head = &mut candidates[..k];
    head.sort_by(cmp);
    head
}
