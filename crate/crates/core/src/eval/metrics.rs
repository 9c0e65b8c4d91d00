use serde::{Deserialize, Serialize};

use super::ConfusionMatrix;
use crate::dataset::{ClassLabel, N_CLASSES};
use crate::error::{Error, Result};

/// One-vs-rest counts and rates for one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: ClassLabel,
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tp_rate: f64,
    pub fp_rate: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    /// (TP + TN) / total.
    pub accuracy: f64,
    pub support: u64,
}

/// Support-weighted averages over classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedMetrics {
    pub tp_rate: f64,
    pub fp_rate: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Metrics for all eight classes. Zero denominators give 0 for precision,
/// recall, FP rate and F-measure.
pub fn per_class_metrics(m: &ConfusionMatrix) -> Result<Vec<ClassMetrics>> {
    let total = m.total();
    if total == 0 {
        return Err(Error::invalid("confusion matrix is empty"));
    }
    Ok(ClassLabel::ALL
        .iter()
        .map(|&label| {
            let c = label.index();
            let tp = m.0[c][c];
            let support: u64 = m.0[c].iter().sum();
            let predicted: u64 = (0..N_CLASSES).map(|a| m.0[a][c]).sum();
            let fn_ = support - tp;
            let fp = predicted - tp;
            let tn = total - tp - fp - fn_;
            let precision = ratio(tp, tp + fp);
            let recall = ratio(tp, tp + fn_);
            let f_measure = if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                0.0
            };
            ClassMetrics {
                label,
                tp,
                fp,
                tn,
                fn_,
                tp_rate: recall,
                fp_rate: ratio(fp, fp + tn),
                precision,
                recall,
                f_measure,
                accuracy: ratio(tp + tn, total),
                support,
            }
        })
        .collect())
}

/// Each metric averaged with weight support / total support. The weighted
/// F-measure is the weighted mean of per-class F values, not the harmonic
/// mean of the weighted precision and recall.
pub fn weighted_average(metrics: &[ClassMetrics]) -> Result<WeightedMetrics> {
    if metrics.is_empty() {
        return Err(Error::invalid("no class metrics to average"));
    }
    let total: u64 = metrics.iter().map(|m| m.support).sum();
    if total == 0 {
        return Err(Error::invalid("class supports sum to zero"));
    }
    let avg = |f: fn(&ClassMetrics) -> f64| {
        metrics.iter().map(|m| m.support as f64 * f(m)).sum::<f64>() / total as f64
    };
    Ok(WeightedMetrics {
        tp_rate: avg(|m| m.tp_rate),
        fp_rate: avg(|m| m.fp_rate),
        precision: avg(|m| m.precision),
        recall: avg(|m| m.recall),
        f_measure: avg(|m| m.f_measure),
    })
}
