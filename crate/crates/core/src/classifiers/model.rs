use serde::{Deserialize, Serialize};

use super::bagging::Bagging;
use super::bayes::NaiveBayes;
use super::knn::Knn;
use super::rules::DecisionList;
use super::tree::DecisionTree;
use super::{ClassDistribution, ClassifierSpec};
use crate::dataset::{AttributeSchema, ClassLabel, Dataset, NormalizationStats};
use crate::error::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub(crate) enum Structure {
    Bayes(NaiveBayes),
    Ibk(Knn),
    Tree(DecisionTree),
    Rules(DecisionList),
    Bagging(Bagging),
}

impl Structure {
    fn kind(&self) -> &'static str {
        match self {
            Structure::Bayes(_) => "bayes",
            Structure::Ibk(_) => "ibk",
            Structure::Tree(_) => "j48",
            Structure::Rules(_) => "rules",
            Structure::Bagging(_) => "bagging",
        }
    }
}

/// A trained classifier bound to the schema it was trained on. Immutable and
/// safe to share between threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelFile", into = "ModelFile")]
pub struct TrainedModel {
    pub(crate) spec: ClassifierSpec,
    pub(crate) schema: AttributeSchema,
    pub(crate) classes: Vec<ClassLabel>,
    pub(crate) normalization: Option<NormalizationStats>,
    pub(crate) structure: Structure,
}

/// On-disk layout. Bagging members nest the same layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    kind: String,
    schema: AttributeSchema,
    classes: Vec<ClassLabel>,
    normalization: Option<NormalizationStats>,
    params: ClassifierSpec,
    structure: Structure,
}

impl From<TrainedModel> for ModelFile {
    fn from(m: TrainedModel) -> Self {
        ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            kind: m.spec.kind().to_string(),
            schema: m.schema,
            classes: m.classes,
            normalization: m.normalization,
            params: m.spec,
            structure: m.structure,
        }
    }
}

impl TryFrom<ModelFile> for TrainedModel {
    type Error = Error;

    fn try_from(f: ModelFile) -> Result<Self> {
        if f.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::UnsupportedFormat(f.format_version));
        }
        if f.kind != f.params.kind() || f.kind != f.structure.kind() {
            return Err(Error::invalid(format!(
                "model kind {:?} does not match params {} / structure {}",
                f.kind,
                f.params,
                f.structure.kind()
            )));
        }
        if let Some(stats) = &f.normalization {
            if stats.min.len() != f.schema.len() || stats.max.len() != f.schema.len() {
                return Err(Error::invalid("normalization does not match schema"));
            }
        }
        Ok(TrainedModel {
            spec: f.params,
            schema: f.schema,
            classes: f.classes,
            normalization: f.normalization,
            structure: f.structure,
        })
    }
}

/// Trains `spec` on `ds`. `seed` only matters for bagging.
pub fn train(ds: &Dataset, spec: &ClassifierSpec, seed: u64) -> Result<TrainedModel> {
    match spec {
        ClassifierSpec::Bayes => super::train_naive_bayes(ds),
        ClassifierSpec::Ibk { k } => super::train_knn(ds, *k),
        ClassifierSpec::J48 { min_leaf } => super::train_tree(ds, *min_leaf),
        ClassifierSpec::Rules { min_coverage } => super::train_rules(ds, *min_coverage),
        ClassifierSpec::Bagging { iterations, base } => super::train_bagging(ds, base, *iterations, seed),
    }
}

impl TrainedModel {
    pub(crate) fn new(
        spec: ClassifierSpec,
        ds: &Dataset,
        normalization: Option<NormalizationStats>,
        structure: Structure,
    ) -> Self {
        TrainedModel {
            spec,
            schema: ds.schema().clone(),
            classes: ds.class_distribution().present(),
            normalization,
            structure,
        }
    }

    pub fn spec(&self) -> &ClassifierSpec {
        &self.spec
    }

    pub fn schema(&self) -> &AttributeSchema {
        &self.schema
    }

    /// Classes present in the training data.
    pub fn classes(&self) -> &[ClassLabel] {
        &self.classes
    }

    pub fn normalization(&self) -> Option<&NormalizationStats> {
        self.normalization.as_ref()
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.schema.len() {
            return Err(Error::SchemaMismatch {
                expected: self.schema.len(),
                found: x.len(),
            });
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(())
    }

    pub fn predict(&self, x: &[f64]) -> Result<ClassLabel> {
        self.check(x)?;
        Ok(self.predict_unchecked(x))
    }

    pub fn predict_distribution(&self, x: &[f64]) -> Result<ClassDistribution> {
        self.check(x)?;
        Ok(self.distribution_unchecked(x))
    }

    pub(crate) fn predict_unchecked(&self, x: &[f64]) -> ClassLabel {
        match &self.structure {
            Structure::Ibk(knn) => knn.predict(&self.normalized(x)),
            _ => self.distribution_unchecked(x).argmax(),
        }
    }

    pub(crate) fn distribution_unchecked(&self, x: &[f64]) -> ClassDistribution {
        match &self.structure {
            Structure::Bayes(nb) => nb.distribution(x),
            Structure::Ibk(knn) => knn.distribution(&self.normalized(x)),
            Structure::Tree(tree) => tree.distribution(x),
            Structure::Rules(rules) => ClassDistribution::indicator(rules.classify(x)),
            Structure::Bagging(bag) => bag.distribution(x),
        }
    }

    fn normalized(&self, x: &[f64]) -> Vec<f64> {
        match &self.normalization {
            Some(stats) => stats.apply(x),
            None => x.to_vec(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        // peek at the version first so an unknown format gets a precise error
        let value: serde_json::Value = serde_json::from_str(s)?;
        match value.get("format_version").and_then(|v| v.as_u64()) {
            Some(v) if v == MODEL_FORMAT_VERSION as u64 => Ok(serde_json::from_value(value)?),
            Some(v) => Err(Error::UnsupportedFormat(v.try_into().unwrap_or(u32::MAX))),
            None => Err(Error::invalid("model file has no format_version")),
        }
    }
}
