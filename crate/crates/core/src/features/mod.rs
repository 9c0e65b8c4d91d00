//! Attribute evaluators (InfoGain, ReliefF, correlation) and the ranker.

mod correlation;
mod infogain;
mod relieff;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{AttributeSchema, Dataset};
use crate::error::{Error, Result};

pub use correlation::{correlation_scores, pearson};
pub use infogain::{discretize, entropy, info_gain_from_bins, info_gain_scores, MAX_BINS};
pub use relieff::{relieff_scores, ReliefFParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeScore {
    pub name: String,
    pub score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Evaluator {
    InfoGain,
    ReliefF(ReliefFParams),
    Correlation,
}

impl Evaluator {
    pub fn id(&self) -> &'static str {
        match self {
            Evaluator::InfoGain => "infogain",
            Evaluator::ReliefF(_) => "relieff",
            Evaluator::Correlation => "correlation",
        }
    }

    pub fn scores(&self, ds: &Dataset) -> Result<Vec<AttributeScore>> {
        match self {
            Evaluator::InfoGain => info_gain_scores(ds),
            Evaluator::ReliefF(p) => relieff_scores(ds, p),
            Evaluator::Correlation => correlation_scores(ds),
        }
    }

    /// Scores every attribute of `ds` and ranks them.
    pub fn rank(&self, ds: &Dataset) -> Result<AttributeRanking> {
        let mut ranking = rank(self.scores(ds)?, ds.schema())?;
        ranking.evaluator = self.id().to_string();
        Ok(ranking)
    }
}

impl fmt::Display for Evaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Evaluator {
    type Err = Error;

    /// `infogain`, `relieff` (default parameters) or `correlation`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "infogain" | "ig" => Ok(Evaluator::InfoGain),
            "relieff" => Ok(Evaluator::ReliefF(ReliefFParams::default())),
            "correlation" | "corr" => Ok(Evaluator::Correlation),
            other => Err(Error::invalid(format!("unknown evaluator {other:?}"))),
        }
    }
}

/// Attributes in descending score order; equal scores keep schema order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeRanking {
    pub evaluator: String,
    pub scores: Vec<AttributeScore>,
}

pub fn rank(scores: Vec<AttributeScore>, schema: &AttributeSchema) -> Result<AttributeRanking> {
    let mut seen = HashSet::new();
    let mut keyed = Vec::with_capacity(scores.len());
    for s in scores {
        if !seen.insert(s.name.clone()) {
            return Err(Error::DuplicateAttribute(s.name));
        }
        let pos = schema
            .index_of(&s.name)
            .ok_or_else(|| Error::UnknownAttribute(s.name.clone()))?;
        keyed.push((pos, s));
    }
    keyed.sort_by(|(pa, a), (pb, b)| b.score.total_cmp(&a.score).then(pa.cmp(pb)));
    Ok(AttributeRanking {
        evaluator: String::new(),
        scores: keyed.into_iter().map(|(_, s)| s).collect(),
    })
}

#[derive(Serialize)]
struct RankingReport<'a> {
    evaluator: &'a str,
    scores: &'a [AttributeScore],
    ranked: Vec<&'a str>,
}

impl AttributeRanking {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn names(&self) -> Vec<&str> {
        self.scores.iter().map(|s| s.name.as_str()).collect()
    }

    pub fn top_n(&self, n: usize) -> Result<Vec<String>> {
        if n < 1 || n > self.scores.len() {
            return Err(Error::invalid(format!(
                "top-n must be in 1..={}, got {n}",
                self.scores.len()
            )));
        }
        Ok(self.scores[..n].iter().map(|s| s.name.clone()).collect())
    }

    pub fn to_json(&self) -> String {
        let report = RankingReport {
            evaluator: &self.evaluator,
            scores: &self.scores,
            ranked: self.names(),
        };
        serde_json::to_string_pretty(&report).expect("ranking serializes")
    }

    pub fn to_text(&self) -> String {
        let width = self.scores.iter().map(|s| s.name.len()).max().unwrap_or(0).max(9);
        let mut out = format!("Ranked attributes ({})\n", self.evaluator);
        out.push_str(&format!("{:>4}  {:<width$}  {:>9}\n", "rank", "attribute", "score"));
        for (i, s) in self.scores.iter().enumerate() {
            out.push_str(&format!("{:>4}  {:<width$}  {:>9.4}\n", i + 1, s.name, s.score));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn score(name: &str, score: f64) -> AttributeScore {
        AttributeScore {
            name: name.into(),
            score,
        }
    }

    #[test]
    fn ties_follow_schema_order() {
        let schema = AttributeSchema::new(["a", "b", "c"]).unwrap();
        let r = rank(vec![score("c", 0.2), score("b", 0.9), score("a", 0.2)], &schema).unwrap();
        assert_eq!(r.names(), vec!["b", "a", "c"]);
    }

    #[test]
    fn singleton_and_errors() {
        let schema = AttributeSchema::new(["a", "b"]).unwrap();
        let r = rank(vec![score("b", 0.1)], &schema).unwrap();
        assert_eq!(r.top_n(1).unwrap(), vec!["b"]);
        assert!(r.top_n(0).is_err());
        assert!(r.top_n(2).is_err());
        assert!(matches!(
            rank(vec![score("a", 0.1), score("a", 0.2)], &schema),
            Err(Error::DuplicateAttribute(_))
        ));
        assert!(rank(vec![score("z", 0.1)], &schema).is_err());
    }

    #[test]
    fn evaluator_parsing() {
        assert_eq!("InfoGain".parse::<Evaluator>().unwrap(), Evaluator::InfoGain);
        assert_eq!("relieff".parse::<Evaluator>().unwrap().id(), "relieff");
        assert!("wrapper".parse::<Evaluator>().is_err());
    }

    #[test]
    fn json_report_shape() {
        let schema = AttributeSchema::new(["a", "b"]).unwrap();
        let mut r = rank(vec![score("a", 0.1), score("b", 0.3)], &schema).unwrap();
        r.evaluator = "infogain".into();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["evaluator"], "infogain");
        assert_eq!(v["ranked"], serde_json::json!(["b", "a"]));
        assert_eq!(v["scores"][0]["name"], "b");
        assert!(r.to_text().contains("   1  b"));
    }

    proptest! {
        #[test]
        fn rank_is_sorted_permutation(raw in prop::collection::vec(0u8..5, 1..12)) {
            let names: Vec<String> = (0..raw.len()).map(|i| format!("x{i}")).collect();
            let schema = AttributeSchema::new(names.clone()).unwrap();
            let scores: Vec<_> = names.iter().zip(&raw).map(|(n, &v)| score(n, v as f64 / 4.0)).collect();
            let r = rank(scores.into_iter().rev().collect(), &schema).unwrap();
            let mut got: Vec<&str> = r.names();
            for w in r.scores.windows(2) {
                prop_assert!(w[0].score >= w[1].score);
                if w[0].score == w[1].score {
                    prop_assert!(schema.index_of(&w[0].name) < schema.index_of(&w[1].name));
                }
            }
            for n in 1..r.len() {
                let a = r.top_n(n).unwrap();
                let b = r.top_n(n + 1).unwrap();
                prop_assert_eq!(&a[..], &b[..n]);
            }
            got.sort();
            let mut want: Vec<&str> = names.iter().map(String::as_str).collect();
            want.sort();
            prop_assert_eq!(got, want);
        }
    }
}
