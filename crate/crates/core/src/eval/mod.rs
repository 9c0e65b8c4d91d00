//! Confusion matrices, per-class metrics, support-weighted averages and
//! stratified cross-validation.

mod metrics;
mod report;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifiers::{train, ClassifierSpec};
use crate::dataset::{stratified_folds, ClassLabel, Dataset, N_CLASSES};
use crate::error::{Error, Result};

pub use metrics::{per_class_metrics, weighted_average, ClassMetrics, WeightedMetrics};

/// Rows are actual classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConfusionMatrix(pub [[u64; N_CLASSES]; N_CLASSES]);

impl ConfusionMatrix {
    pub fn get(&self, actual: ClassLabel, predicted: ClassLabel) -> u64 {
        self.0[actual.index()][predicted.index()]
    }

    pub fn add(&mut self, actual: ClassLabel, predicted: ClassLabel) {
        self.0[actual.index()][predicted.index()] += 1;
    }

    pub fn total(&self) -> u64 {
        self.0.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..N_CLASSES).map(|i| self.0[i][i]).sum()
    }

    /// Fraction of instances on the diagonal.
    pub fn accuracy(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            t => self.trace() as f64 / t as f64,
        }
    }

    /// Collapses the matrix to Normal vs any attack:
    /// `[[normal->normal, normal->attack], [attack->normal, attack->attack]]`.
    pub fn normal_vs_attack(&self) -> [[u64; 2]; 2] {
        let mut out = [[0; 2]; 2];
        for a in 0..N_CLASSES {
            for p in 0..N_CLASSES {
                out[(a != 0) as usize][(p != 0) as usize] += self.0[a][p];
            }
        }
        out
    }
}

pub fn confusion(truth: &[ClassLabel], predicted: &[ClassLabel]) -> Result<ConfusionMatrix> {
    if truth.len() != predicted.len() {
        return Err(Error::invalid(format!(
            "{} true labels but {} predictions",
            truth.len(),
            predicted.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::invalid("cannot build a confusion matrix from no instances"));
    }
    let mut m = ConfusionMatrix::default();
    for (&a, &p) in truth.iter().zip(predicted) {
        m.add(a, p);
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub classifier: ClassifierSpec,
    pub folds: usize,
    pub seed: u64,
    pub matrix: ConfusionMatrix,
    pub classes: Vec<ClassLabel>,
    pub per_class: Vec<ClassMetrics>,
    pub weighted: WeightedMetrics,
    pub accuracy: f64,
}

impl EvalReport {
    pub fn from_matrix(classifier: ClassifierSpec, folds: usize, seed: u64, matrix: ConfusionMatrix) -> Result<Self> {
        let per_class = per_class_metrics(&matrix)?;
        let weighted = weighted_average(&per_class)?;
        Ok(EvalReport {
            classifier,
            folds,
            seed,
            accuracy: matrix.accuracy(),
            matrix,
            classes: ClassLabel::ALL.to_vec(),
            per_class,
            weighted,
        })
    }
}

/// Predictions for every record from stratified k-fold cross-validation, in
/// record order. Each fold trains a fresh model (including its normalization)
/// on the other k-1 folds.
pub fn cross_val_predict(ds: &Dataset, spec: &ClassifierSpec, k: usize, seed: u64) -> Result<Vec<ClassLabel>> {
    let folds = stratified_folds(ds, k, seed)?;
    let per_fold = (0..k)
        .into_par_iter()
        .map(|f| {
            let model = train(&ds.subset(&folds.train_indices(f)), spec, seed)?;
            folds
                .test_indices(f)
                .into_iter()
                .map(|i| Ok((i, model.predict(ds.row(i))?)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut predicted: Vec<Option<ClassLabel>> = vec![None; ds.len()];
    for (i, label) in per_fold.into_iter().flatten() {
        debug_assert!(predicted[i].is_none());
        predicted[i] = Some(label);
    }
    Ok(predicted
        .into_iter()
        .map(|p| p.expect("every record lands in exactly one test fold"))
        .collect())
}

/// Cross-validates `spec` and computes metrics from the pooled confusion
/// matrix of all folds.
pub fn evaluate_cv(ds: &Dataset, spec: &ClassifierSpec, k: usize, seed: u64) -> Result<EvalReport> {
    let predicted = cross_val_predict(ds, spec, k, seed)?;
    let matrix = confusion(ds.labels(), &predicted)?;
    EvalReport::from_matrix(spec.clone(), k, seed, matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::train_knn;
    use crate::dataset::AttributeSchema;

    use ClassLabel::{IcmpEcho, Normal};

    #[test]
    fn perfect_predictions_are_diagonal() {
        let truth = [Normal, IcmpEcho, IcmpEcho, ClassLabel::Slowpost];
        let m = confusion(&truth, &truth).unwrap();
        assert_eq!(m.trace(), 4);
        assert_eq!(m.get(IcmpEcho, IcmpEcho), 2);
        assert_eq!(m.total(), 4);
    }

    #[test]
    fn single_off_diagonal() {
        let m = confusion(&[Normal], &[IcmpEcho]).unwrap();
        assert_eq!(m.get(Normal, IcmpEcho), 1);
        assert_eq!(m.trace(), 0);
    }

    #[test]
    fn length_mismatch_and_empty() {
        assert!(confusion(&[Normal], &[]).is_err());
        assert!(confusion(&[], &[]).is_err());
    }

    #[test]
    fn normal_vs_attack_collapse() {
        let m = confusion(
            &[Normal, Normal, IcmpEcho, ClassLabel::TcpSyn],
            &[Normal, ClassLabel::UdpFlood, ClassLabel::TcpSyn, Normal],
        )
        .unwrap();
        assert_eq!(m.normal_vs_attack(), [[1, 1], [1, 1]]);
    }

    #[test]
    fn single_class_cv_is_perfect() {
        let ds = Dataset::new(
            AttributeSchema::new(["a"]).unwrap(),
            (0..20).map(|i| vec![i as f64]).collect(),
            vec![Normal; 20],
        )
        .unwrap();
        for spec in ClassifierSpec::defaults() {
            let r = evaluate_cv(&ds, &spec, 5, 1).unwrap();
            assert_eq!(r.accuracy, 1.0);
            assert_eq!(r.matrix.total(), 20);
            assert_eq!(r.matrix.trace(), 20);
        }
    }

    #[test]
    fn every_record_predicted_once() {
        let ds = crate::dataset::synth_generate(&crate::dataset::SynthSpec::eight_class(3)).unwrap();
        let small = ds.subset(&(0..ds.len()).step_by(10).collect::<Vec<_>>());
        let r = evaluate_cv(&small, &ClassifierSpec::Bayes, 5, 2).unwrap();
        assert_eq!(r.matrix.total() as usize, small.len());
        for c in ClassLabel::ALL {
            assert_eq!(r.matrix.0[c.index()].iter().sum::<u64>() as usize, small.class_distribution().get(c));
        }
    }

    #[test]
    fn two_fold_trace_by_hand() {
        // 4 records, 2 classes; each fold holds one record of each class
        let ds = Dataset::new(
            AttributeSchema::new(["a"]).unwrap(),
            vec![vec![0.0], vec![1.0], vec![10.0], vec![4.0]],
            vec![Normal, Normal, IcmpEcho, IcmpEcho],
        )
        .unwrap();
        let spec = ClassifierSpec::Ibk { k: 1 };
        let folds = stratified_folds(&ds, 2, 3).unwrap();
        let mut expected = ConfusionMatrix::default();
        for f in 0..2 {
            let model = train_knn(&ds.subset(&folds.train_indices(f)), 1).unwrap();
            for i in folds.test_indices(f) {
                expected.add(ds.labels()[i], model.predict(ds.row(i)).unwrap());
            }
        }
        let report = evaluate_cv(&ds, &spec, 2, 3).unwrap();
        assert_eq!(report.matrix, expected);
        assert_eq!(report, evaluate_cv(&ds, &spec, 2, 3).unwrap());
        assert_eq!(report.matrix.total(), 4);
    }
}
