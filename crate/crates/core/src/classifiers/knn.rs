use serde::{Deserialize, Serialize};

use super::model::{Structure, TrainedModel};
use super::{ClassDistribution, ClassifierSpec};
use crate::dataset::{ClassLabel, Dataset, NormalizationStats, N_CLASSES};
use crate::error::{Error, Result};

/// Lazy k-NN over min-max normalized training records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct Knn {
    k: usize,
    rows: Vec<Vec<f64>>,
    labels: Vec<ClassLabel>,
}

pub fn train_knn(ds: &Dataset, k: usize) -> Result<TrainedModel> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if k < 1 || k > ds.len() {
        return Err(Error::invalid(format!(
            "ibk k must be in 1..={}, got {k}",
            ds.len()
        )));
    }
    let stats = NormalizationStats::fit(ds)?;
    let rows = ds.rows().iter().map(|r| stats.apply(r)).collect();
    let knn = Knn {
        k,
        rows,
        labels: ds.labels().to_vec(),
    };
    Ok(TrainedModel::new(
        ClassifierSpec::Ibk { k },
        ds,
        Some(stats),
        Structure::Ibk(knn),
    ))
}

impl Knn {
    /// Indices of the k nearest records by Euclidean distance, nearest first;
    /// equal distances go to the lower record index.
    fn neighbors(&self, x: &[f64]) -> Vec<usize> {
        let mut dist: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum(), i))
            .collect();
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        let k = self.k.min(dist.len());
        if k < dist.len() {
            dist.select_nth_unstable_by(k - 1, cmp);
            dist.truncate(k);
        }
        dist.sort_by(cmp);
        dist.into_iter().map(|(_, i)| i).collect()
    }

    fn votes(&self, neighbors: &[usize]) -> [usize; N_CLASSES] {
        let mut votes = [0; N_CLASSES];
        for &i in neighbors {
            votes[self.labels[i].index()] += 1;
        }
        votes
    }

    pub(crate) fn distribution(&self, x: &[f64]) -> ClassDistribution {
        ClassDistribution::from_counts(&self.votes(&self.neighbors(x)))
    }

    /// Majority vote; among tied classes the one owning the nearest neighbor wins.
    pub(crate) fn predict(&self, x: &[f64]) -> ClassLabel {
        let neighbors = self.neighbors(x);
        let votes = self.votes(&neighbors);
        let top = *votes.iter().max().expect("k >= 1");
        neighbors
            .iter()
            .map(|&i| self.labels[i])
            .find(|l| votes[l.index()] == top)
            .expect("some neighbor holds the top vote")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::AttributeSchema;

    use ClassLabel::{IcmpEcho as Neg, Normal as Pos, TcpSyn};

    fn dataset(rows: Vec<Vec<f64>>, labels: Vec<ClassLabel>) -> Dataset {
        let names: Vec<String> = (0..rows[0].len()).map(|j| format!("a{j}")).collect();
        Dataset::new(AttributeSchema::new(names).unwrap(), rows, labels).unwrap()
    }

    #[test]
    fn exact_match_with_k1() {
        let ds = dataset(vec![vec![0., 0.], vec![5., 5.], vec![9., 1.]], vec![Pos, Neg, TcpSyn]);
        let m = train_knn(&ds, 1).unwrap();
        for (row, label) in ds.rows().iter().zip(ds.labels()) {
            assert_eq!(m.predict(row).unwrap(), *label);
        }
    }

    #[test]
    fn k_equals_n_predicts_majority() {
        let ds = dataset(vec![vec![0.], vec![1.], vec![2.], vec![3.], vec![4.]], vec![Pos, Neg, Neg, Pos, Neg]);
        let m = train_knn(&ds, 5).unwrap();
        for q in [-10.0, 0.0, 2.5, 100.0] {
            assert_eq!(m.predict(&[q]).unwrap(), Neg);
        }
    }

    #[test]
    fn three_nearest_vote() {
        // distances from the query (0,0) after normalization on [0,10]: 1, 2, 3, 9
        let ds = dataset(
            vec![vec![1., 0.], vec![0., 2.], vec![3., 0.], vec![10., 10.]],
            vec![Pos, Pos, Neg, Neg],
        );
        let m = train_knn(&ds, 3).unwrap();
        assert_eq!(m.predict(&[0., 0.]).unwrap(), Pos);
        let d = m.predict_distribution(&[0., 0.]).unwrap();
        assert!((d.get(Pos) - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn vote_tie_goes_to_nearest_neighbor_class() {
        // k=2: nearest is TcpSyn, second Pos, one vote each
        let ds = dataset(vec![vec![0.], vec![2.], vec![3.], vec![10.]], vec![Pos, TcpSyn, Pos, Neg]);
        let m = train_knn(&ds, 2).unwrap();
        assert_eq!(m.predict(&[2.2]).unwrap(), TcpSyn);
        // the distribution alone would have picked Pos (lower index)
        assert_eq!(m.predict_distribution(&[2.2]).unwrap().argmax(), Pos);
    }

    #[test]
    fn distance_tie_goes_to_lower_index() {
        let ds = dataset(vec![vec![0.], vec![2.], vec![4.]], vec![Neg, Pos, TcpSyn]);
        let m = train_knn(&ds, 1).unwrap();
        assert_eq!(m.predict(&[1.0]).unwrap(), Neg);
        assert_eq!(m.predict(&[3.0]).unwrap(), Pos);
    }

    #[test]
    fn rejects_bad_k() {
        let ds = dataset(vec![vec![0.], vec![2.]], vec![Neg, Pos]);
        assert!(train_knn(&ds, 0).is_err());
        assert!(train_knn(&ds, 3).is_err());
    }
}
