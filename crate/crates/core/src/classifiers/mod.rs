//! The five classifier families: Gaussian Naive Bayes, IBk (k-NN), a C4.5-style
//! gain-ratio tree, a sequential-covering decision list, and bagging.

mod bagging;
mod bayes;
mod knn;
mod model;
mod rules;
mod spec;
mod tree;

use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dataset::{ClassLabel, N_CLASSES};

pub use bagging::{train_bagging, train_bagging_with_samples};
pub use bayes::{train_naive_bayes, train_naive_bayes_with_floor, VARIANCE_FLOOR};
pub use knn::train_knn;
pub use model::{train, TrainedModel, MODEL_FORMAT_VERSION};
pub use rules::{train_rules, Condition, Rule};
pub use spec::ClassifierSpec;
pub use tree::train_tree;

/// Probability per class, indexed by [`ClassLabel::index`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassDistribution(pub [f64; N_CLASSES]);

impl ClassDistribution {
    pub fn indicator(label: ClassLabel) -> Self {
        let mut p = [0.0; N_CLASSES];
        p[label.index()] = 1.0;
        ClassDistribution(p)
    }

    /// Normalizes non-negative weights. All-zero weights give a zero vector.
    pub fn from_weights(weights: [f64; N_CLASSES]) -> Self {
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return ClassDistribution([0.0; N_CLASSES]);
        }
        ClassDistribution(weights.map(|w| w / total))
    }

    pub fn from_counts(counts: &[usize; N_CLASSES]) -> Self {
        Self::from_weights(counts.map(|c| c as f64))
    }

    pub fn get(&self, label: ClassLabel) -> f64 {
        self.0[label.index()]
    }

    /// Highest-probability class; ties go to the lower class index.
    pub fn argmax(&self) -> ClassLabel {
        let mut best = 0;
        for i in 1..N_CLASSES {
            if self.0[i] > self.0[best] {
                best = i;
            }
        }
        ClassLabel::ALL[best]
    }
}

impl Serialize for ClassDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(N_CLASSES))?;
        for label in ClassLabel::ALL {
            map.serialize_entry(label.name(), &self.0[label.index()])?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for ClassDistribution {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct DistVisitor;

        impl<'de> Visitor<'de> for DistVisitor {
            type Value = ClassDistribution;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from class label to probability")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
                let mut p = [0.0; N_CLASSES];
                while let Some((label, value)) = access.next_entry::<ClassLabel, f64>()? {
                    p[label.index()] = value;
                }
                Ok(ClassDistribution(p))
            }
        }

        deserializer.deserialize_map(DistVisitor)
    }
}
