//! Labeled MIB-counter datasets: schema, records, CSV ingestion, synthetic
//! generation, attribute selection, normalization and stratified folds.

mod folds;
mod io;
mod label;
mod normalize;
mod synth;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use folds::{stratified_folds, FoldAssignment};
pub use io::{load_csv, write_csv};
pub use label::{ClassCounts, ClassLabel, N_CLASSES};
pub use normalize::NormalizationStats;
pub use synth::{synth_generate, AttrDist, ClassSpec, SynthSpec};

/// Short names of the six ICMP-group variables, in canonical order.
pub const ICMP_SHORT_NAMES: [&str; 6] = ["iOM", "iIM", "iOU", "iIU", "iIE", "iOE"];

/// MIB object names matching [`ICMP_SHORT_NAMES`] position by position.
pub const ICMP_LONG_NAMES: [&str; 6] = [
    "icmpOutMsgs",
    "icmpInMsgs",
    "icmpOutDestUnreachs",
    "icmpInDestUnreachs",
    "icmpInEchos",
    "icmpOutEchos",
];

/// Position of an ICMP variable in canonical order, accepting the short or the
/// MIB object name (case-insensitive).
pub fn icmp_index(name: &str) -> Option<usize> {
    ICMP_SHORT_NAMES
        .iter()
        .position(|s| s.eq_ignore_ascii_case(name))
        .or_else(|| ICMP_LONG_NAMES.iter().position(|s| s.eq_ignore_ascii_case(name)))
}

/// Ordered, unique attribute names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct AttributeSchema(Vec<String>);

impl AttributeSchema {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::invalid("attribute schema must not be empty"));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if name.is_empty() {
                return Err(Error::invalid("attribute names must not be empty"));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateAttribute(name.clone()));
            }
        }
        Ok(AttributeSchema(names))
    }

    /// The six ICMP variables by short name.
    pub fn icmp() -> Self {
        AttributeSchema(ICMP_SHORT_NAMES.iter().map(|s| s.to_string()).collect())
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Column index of `name`. Exact matches win; otherwise an ICMP short name
    /// resolves to its MIB object name and vice versa.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        if let Some(i) = self.0.iter().position(|n| n == name) {
            return Some(i);
        }
        let icmp = icmp_index(name)?;
        self.0.iter().position(|n| icmp_index(n) == Some(icmp))
    }
}

impl TryFrom<Vec<String>> for AttributeSchema {
    type Error = Error;

    fn try_from(names: Vec<String>) -> Result<Self> {
        AttributeSchema::new(names)
    }
}

impl From<AttributeSchema> for Vec<String> {
    fn from(schema: AttributeSchema) -> Self {
        schema.0
    }
}

/// Schema plus labeled numeric records. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: AttributeSchema,
    rows: Vec<Vec<f64>>,
    labels: Vec<ClassLabel>,
}

impl Dataset {
    pub fn new(schema: AttributeSchema, rows: Vec<Vec<f64>>, labels: Vec<ClassLabel>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::invalid(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != schema.len() {
                return Err(Error::RaggedRow {
                    row: r + 1,
                    expected: schema.len(),
                    found: row.len(),
                });
            }
            if let Some(c) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonNumeric {
                    row: r + 1,
                    column: c + 1,
                    value: row[c].to_string(),
                });
            }
        }
        Ok(Dataset {
            schema,
            rows,
            labels,
        })
    }

    pub fn schema(&self) -> &AttributeSchema {
        &self.schema
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn labels(&self) -> &[ClassLabel] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_attributes(&self) -> usize {
        self.schema.len()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    pub fn class_distribution(&self) -> ClassCounts {
        let mut counts = ClassCounts::default();
        for label in &self.labels {
            counts.0[label.index()] += 1;
        }
        counts
    }

    /// Records at `indices`, in that order (repeats allowed).
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            schema: self.schema.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// Projects onto `names`, in the given order.
    pub fn select_attributes<S: AsRef<str>>(&self, names: &[S]) -> Result<Dataset> {
        let cols = names
            .iter()
            .map(|n| {
                self.schema
                    .index_of(n.as_ref())
                    .ok_or_else(|| Error::UnknownAttribute(n.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        let schema = AttributeSchema::new(cols.iter().map(|&c| self.schema.0[c].clone()))?;
        let rows = self
            .rows
            .iter()
            .map(|r| cols.iter().map(|&c| r[c]).collect())
            .collect();
        Ok(Dataset {
            schema,
            rows,
            labels: self.labels.clone(),
        })
    }

    pub(crate) fn require_records(&self, min: usize) -> Result<()> {
        if self.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if self.len() < min {
            return Err(Error::invalid(format!(
                "need at least {min} records, have {}",
                self.len()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Dataset {
        let schema = AttributeSchema::icmp();
        let rows = (0..4)
            .map(|i| (0..6).map(|j| (i * 10 + j) as f64).collect())
            .collect();
        let labels = vec![
            ClassLabel::Normal,
            ClassLabel::IcmpEcho,
            ClassLabel::Normal,
            ClassLabel::BruteForce,
        ];
        Dataset::new(schema, rows, labels).unwrap()
    }

    #[test]
    fn schema_rejects_duplicates_and_empty() {
        assert!(matches!(
            AttributeSchema::new(["a", "b", "a"]),
            Err(Error::DuplicateAttribute(_))
        ));
        assert!(AttributeSchema::new(Vec::<String>::new()).is_err());
    }

    #[test]
    fn schema_resolves_icmp_aliases() {
        let long = AttributeSchema::new(ICMP_LONG_NAMES).unwrap();
        assert_eq!(long.index_of("iIE"), Some(4));
        assert_eq!(AttributeSchema::icmp().index_of("icmpOutEchos"), Some(5));
        assert_eq!(long.index_of("nope"), None);
    }

    #[test]
    fn dataset_rejects_ragged_and_non_finite() {
        let schema = AttributeSchema::new(["a", "b"]).unwrap();
        assert!(matches!(
            Dataset::new(schema.clone(), vec![vec![1.0]], vec![ClassLabel::Normal]),
            Err(Error::RaggedRow { .. })
        ));
        assert!(Dataset::new(schema, vec![vec![1.0, f64::NAN]], vec![ClassLabel::Normal]).is_err());
    }

    #[test]
    fn class_distribution_sums_to_len() {
        let ds = small();
        let counts = ds.class_distribution();
        assert_eq!(counts.total(), 4);
        assert_eq!(counts.get(ClassLabel::Normal), 2);
        assert_eq!(counts.get(ClassLabel::TcpSyn), 0);
    }

    #[test]
    fn select_identity_and_composition() {
        let ds = small();
        let all: Vec<String> = ds.schema().names().to_vec();
        assert_eq!(ds.select_attributes(&all).unwrap(), ds);

        let two = ds
            .select_attributes(&["iOU", "iIE", "iOE"])
            .unwrap()
            .select_attributes(&["iIE"])
            .unwrap();
        assert_eq!(two, ds.select_attributes(&["iIE"]).unwrap());
        assert_eq!(two.column(0), ds.column(4));
        assert_eq!(two.labels(), ds.labels());
    }

    #[test]
    fn select_keeps_requested_order() {
        let ds = small().select_attributes(&["iIU", "iOM", "iIE", "iOE"]).unwrap();
        assert_eq!(ds.schema().names(), &["iIU", "iOM", "iIE", "iOE"]);
        assert_eq!(ds.row(1), &[13.0, 10.0, 14.0, 15.0]);
    }

    #[test]
    fn select_unknown_attribute() {
        assert!(matches!(
            small().select_attributes(&["tcpInSegs"]),
            Err(Error::UnknownAttribute(n)) if n == "tcpInSegs"
        ));
    }
}
