use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};

/// Per-attribute min/max fitted on a training partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationStats {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl NormalizationStats {
    pub fn fit(ds: &Dataset) -> Result<Self> {
        if ds.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let d = ds.n_attributes();
        let mut min = vec![f64::INFINITY; d];
        let mut max = vec![f64::NEG_INFINITY; d];
        for row in ds.rows() {
            for (j, &v) in row.iter().enumerate() {
                min[j] = min[j].min(v);
                max[j] = max[j].max(v);
            }
        }
        Ok(NormalizationStats { min, max })
    }

    pub fn len(&self) -> usize {
        self.min.len()
    }

    pub fn is_empty(&self) -> bool {
        self.min.is_empty()
    }

    pub fn range(&self, j: usize) -> f64 {
        self.max[j] - self.min[j]
    }

    /// Maps one value of attribute `j` into [0, 1]; out-of-range values clamp
    /// and constant attributes map to 0.
    pub fn scale(&self, j: usize, v: f64) -> f64 {
        let range = self.range(j);
        if range <= 0.0 {
            return 0.0;
        }
        ((v - self.min[j]) / range).clamp(0.0, 1.0)
    }

    pub fn apply(&self, vector: &[f64]) -> Vec<f64> {
        vector.iter().enumerate().map(|(j, &v)| self.scale(j, v)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{AttributeSchema, ClassLabel};
    use proptest::prelude::*;

    fn one_column(values: &[f64]) -> Dataset {
        Dataset::new(
            AttributeSchema::new(["a"]).unwrap(),
            values.iter().map(|&v| vec![v]).collect(),
            vec![ClassLabel::Normal; values.len()],
        )
        .unwrap()
    }

    #[test]
    fn fits_min_max() {
        let stats = NormalizationStats::fit(&one_column(&[0.0, 50.0, 100.0])).unwrap();
        assert_eq!((stats.min[0], stats.max[0]), (0.0, 100.0));
        assert_eq!(stats.apply(&[50.0]), vec![0.5]);
    }

    #[test]
    fn constant_attribute_maps_to_zero() {
        let stats = NormalizationStats::fit(&one_column(&[7.0, 7.0, 7.0])).unwrap();
        assert_eq!(stats.apply(&[7.0]), vec![0.0]);
        assert_eq!(stats.apply(&[100.0]), vec![0.0]);
    }

    #[test]
    fn clamps_out_of_range() {
        let stats = NormalizationStats::fit(&one_column(&[0.0, 100.0])).unwrap();
        assert_eq!(stats.apply(&[120.0]), vec![1.0]);
        assert_eq!(stats.apply(&[-3.0]), vec![0.0]);
    }

    #[test]
    fn empty_fit_fails() {
        assert!(NormalizationStats::fit(&one_column(&[])).is_err());
    }

    proptest! {
        #[test]
        fn output_always_in_unit_interval(
            train in prop::collection::vec(-1e6f64..1e6, 1..30),
            query in -1e7f64..1e7,
        ) {
            let stats = NormalizationStats::fit(&one_column(&train)).unwrap();
            for &v in train.iter().chain(std::iter::once(&query)) {
                let s = stats.apply(&[v])[0];
                prop_assert!((0.0..=1.0).contains(&s));
            }
        }
    }
}
