use std::collections::HashMap;

use crate::dataset::{ClassLabel, Dataset, N_CLASSES};
use crate::error::Result;

use super::AttributeScore;

/// Upper bound on the number of bins per attribute.
pub const MAX_BINS: usize = 10;

/// Base-2 entropy of a count vector.
pub fn entropy(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// Unsupervised equal-frequency discretization with at most [`MAX_BINS`] bins.
///
/// An attribute with at most `MAX_BINS` distinct values keeps one bin per
/// value. Otherwise a value's bin is `floor(rank * MAX_BINS / n)`, where `rank`
/// counts the values strictly below it, so equal values always share a bin and
/// the binning depends only on the order of the values.
pub fn discretize(column: &[f64]) -> Vec<usize> {
    let n = column.len();
    let mut sorted: Vec<f64> = column.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut distinct = sorted.clone();
    distinct.dedup_by(|a, b| a.total_cmp(b).is_eq());

    let bin_of_distinct: Vec<usize> = if distinct.len() <= MAX_BINS {
        (0..distinct.len()).collect()
    } else {
        let mut bins = Vec::with_capacity(distinct.len());
        let mut below = 0;
        let mut i = 0;
        for _ in &distinct {
            bins.push(below * MAX_BINS / n);
            let v = sorted[i];
            while i < n && sorted[i].total_cmp(&v).is_eq() {
                i += 1;
            }
            below = i;
        }
        bins
    };
    column
        .iter()
        .map(|v| {
            let pos = distinct
                .binary_search_by(|d| d.total_cmp(v))
                .expect("value present in its own column");
            bin_of_distinct[pos]
        })
        .collect()
}

/// H(class) - H(class | bin) from a bin assignment.
pub fn info_gain_from_bins(bins: &[usize], labels: &[ClassLabel]) -> f64 {
    let mut class_counts = [0usize; N_CLASSES];
    let mut table: HashMap<usize, [usize; N_CLASSES]> = HashMap::new();
    for (&b, l) in bins.iter().zip(labels) {
        class_counts[l.index()] += 1;
        table.entry(b).or_insert([0; N_CLASSES])[l.index()] += 1;
    }
    let n = labels.len() as f64;
    let mut keys: Vec<_> = table.keys().copied().collect();
    keys.sort_unstable();
    let conditional: f64 = keys
        .iter()
        .map(|k| {
            let row = &table[k];
            let size: usize = row.iter().sum();
            size as f64 / n * entropy(row)
        })
        .sum();
    (entropy(&class_counts) - conditional).max(0.0)
}

pub fn info_gain_scores(ds: &Dataset) -> Result<Vec<AttributeScore>> {
    ds.require_records(2)?;
    Ok(ds
        .schema()
        .names()
        .iter()
        .enumerate()
        .map(|(j, name)| AttributeScore {
            name: name.clone(),
            score: info_gain_from_bins(&discretize(&ds.column(j)), ds.labels()),
        })
        .collect())
}
