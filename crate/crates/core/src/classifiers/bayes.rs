use serde::{Deserialize, Serialize};

use super::model::{Structure, TrainedModel};
use super::{ClassDistribution, ClassifierSpec};
use crate::dataset::{ClassLabel, Dataset, N_CLASSES};
use crate::error::{Error, Result};

pub const VARIANCE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct ClassGaussians {
    label: ClassLabel,
    prior: f64,
    mean: Vec<f64>,
    variance: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct NaiveBayes {
    classes: Vec<ClassGaussians>,
}

pub fn train_naive_bayes(ds: &Dataset) -> Result<TrainedModel> {
    train_naive_bayes_with_floor(ds, VARIANCE_FLOOR)
}

/// Gaussian Naive Bayes with maximum-likelihood per-class means and variances.
/// Variances below `floor` are raised to it.
pub fn train_naive_bayes_with_floor(ds: &Dataset, floor: f64) -> Result<TrainedModel> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if floor.is_nan() || floor < 0.0 {
        return Err(Error::invalid("variance floor must be >= 0"));
    }
    let d = ds.n_attributes();
    let n = ds.len() as f64;
    let mut count = [0usize; N_CLASSES];
    let mut sum = vec![vec![0.0; d]; N_CLASSES];
    for (row, label) in ds.rows().iter().zip(ds.labels()) {
        let c = label.index();
        count[c] += 1;
        for (s, v) in sum[c].iter_mut().zip(row) {
            *s += v;
        }
    }
    let mean: Vec<Vec<f64>> = (0..N_CLASSES)
        .map(|c| sum[c].iter().map(|s| s / count[c].max(1) as f64).collect())
        .collect();
    let mut sq = vec![vec![0.0; d]; N_CLASSES];
    for (row, label) in ds.rows().iter().zip(ds.labels()) {
        let c = label.index();
        for j in 0..d {
            let dev = row[j] - mean[c][j];
            sq[c][j] += dev * dev;
        }
    }
    let classes = ClassLabel::ALL
        .iter()
        .filter(|l| count[l.index()] > 0)
        .map(|&label| {
            let c = label.index();
            ClassGaussians {
                label,
                prior: count[c] as f64 / n,
                mean: mean[c].clone(),
                variance: sq[c].iter().map(|s| (s / count[c] as f64).max(floor)).collect(),
            }
        })
        .collect();
    Ok(TrainedModel::new(
        ClassifierSpec::Bayes,
        ds,
        None,
        Structure::Bayes(NaiveBayes { classes }),
    ))
}

impl NaiveBayes {
    fn log_posteriors(&self, x: &[f64]) -> Vec<(ClassLabel, f64)> {
        let ln_2pi = (2.0 * std::f64::consts::PI).ln();
        self.classes
            .iter()
            .map(|g| {
                let ll: f64 = x
                    .iter()
                    .zip(g.mean.iter().zip(&g.variance))
                    .map(|(v, (m, var))| -0.5 * (ln_2pi + var.ln()) - (v - m) * (v - m) / (2.0 * var))
                    .sum();
                (g.label, g.prior.ln() + ll)
            })
            .collect()
    }

    pub(crate) fn distribution(&self, x: &[f64]) -> ClassDistribution {
        let lp = self.log_posteriors(x);
        let max = lp.iter().map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max);
        let mut w = [0.0; N_CLASSES];
        for (label, v) in lp {
            w[label.index()] = (v - max).exp();
        }
        ClassDistribution::from_weights(w)
    }
}
