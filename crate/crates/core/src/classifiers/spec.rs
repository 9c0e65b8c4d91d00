use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which classifier to train, with its parameters.
///
/// Text form: `bayes | ibk[:k] | j48[:min_leaf] | rules[:min_cov] | bagging[:iters[:base]]`,
/// where `base` is itself a spec (e.g. `bagging:10:ibk:3`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ClassifierSpec {
    Bayes,
    Ibk { k: usize },
    J48 { min_leaf: usize },
    Rules { min_coverage: usize },
    Bagging { iterations: usize, base: Box<ClassifierSpec> },
}

impl ClassifierSpec {
    pub const DEFAULT_IBK_K: usize = 1;
    pub const DEFAULT_MIN_LEAF: usize = 2;
    pub const DEFAULT_MIN_COVERAGE: usize = 2;
    pub const DEFAULT_BAGGING_ITERATIONS: usize = 10;

    pub fn kind(&self) -> &'static str {
        match self {
            ClassifierSpec::Bayes => "bayes",
            ClassifierSpec::Ibk { .. } => "ibk",
            ClassifierSpec::J48 { .. } => "j48",
            ClassifierSpec::Rules { .. } => "rules",
            ClassifierSpec::Bagging { .. } => "bagging",
        }
    }

    /// The five default configurations, in report order.
    pub fn defaults() -> Vec<ClassifierSpec> {
        ["bayes", "ibk", "bagging", "rules", "j48"]
            .iter()
            .map(|s| s.parse().expect("default spec parses"))
            .collect()
    }
}

fn parse_count(what: &str, s: &str) -> Result<usize> {
    match s.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(Error::invalid(format!("{what} must be an integer >= 1, got {s:?}"))),
    }
}

impl FromStr for ClassifierSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        let single = |what: &str, default: usize| -> Result<usize> {
            match rest {
                None => Ok(default),
                Some(r) if !r.contains(':') => parse_count(what, r),
                Some(r) => Err(Error::invalid(format!("unexpected parameters {r:?}"))),
            }
        };
        match head.to_ascii_lowercase().as_str() {
            "bayes" | "nb" | "naivebayes" => match rest {
                None => Ok(ClassifierSpec::Bayes),
                Some(r) => Err(Error::invalid(format!("bayes takes no parameters, got {r:?}"))),
            },
            "ibk" | "knn" => Ok(ClassifierSpec::Ibk {
                k: single("ibk k", Self::DEFAULT_IBK_K)?,
            }),
            "j48" | "tree" => Ok(ClassifierSpec::J48 {
                min_leaf: single("j48 min_leaf", Self::DEFAULT_MIN_LEAF)?,
            }),
            "rules" => Ok(ClassifierSpec::Rules {
                min_coverage: single("rules min_cov", Self::DEFAULT_MIN_COVERAGE)?,
            }),
            "bagging" => {
                let (iterations, base) = match rest {
                    None => (Self::DEFAULT_BAGGING_ITERATIONS, None),
                    Some(r) => match r.split_once(':') {
                        None => (parse_count("bagging iterations", r)?, None),
                        Some((it, base)) => (parse_count("bagging iterations", it)?, Some(base)),
                    },
                };
                let base = match base {
                    None => ClassifierSpec::J48 {
                        min_leaf: Self::DEFAULT_MIN_LEAF,
                    },
                    Some(b) => b.parse()?,
                };
                Ok(ClassifierSpec::Bagging {
                    iterations,
                    base: Box::new(base),
                })
            }
            _ => Err(Error::invalid(format!("unknown classifier {s:?}"))),
        }
    }
}

impl fmt::Display for ClassifierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassifierSpec::Bayes => write!(f, "bayes"),
            ClassifierSpec::Ibk { k } => write!(f, "ibk:{k}"),
            ClassifierSpec::J48 { min_leaf } => write!(f, "j48:{min_leaf}"),
            ClassifierSpec::Rules { min_coverage } => write!(f, "rules:{min_coverage}"),
            ClassifierSpec::Bagging { iterations, base } => write!(f, "bagging:{iterations}:{base}"),
        }
    }
}

impl TryFrom<String> for ClassifierSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ClassifierSpec> for String {
    fn from(spec: ClassifierSpec) -> Self {
        spec.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grammar() {
        assert_eq!("bayes".parse::<ClassifierSpec>().unwrap(), ClassifierSpec::Bayes);
        assert_eq!("ibk".parse::<ClassifierSpec>().unwrap(), ClassifierSpec::Ibk { k: 1 });
        assert_eq!("ibk:5".parse::<ClassifierSpec>().unwrap(), ClassifierSpec::Ibk { k: 5 });
        assert_eq!("J48".parse::<ClassifierSpec>().unwrap(), ClassifierSpec::J48 { min_leaf: 2 });
        assert_eq!(
            "rules:3".parse::<ClassifierSpec>().unwrap(),
            ClassifierSpec::Rules { min_coverage: 3 }
        );
        assert_eq!(
            "bagging".parse::<ClassifierSpec>().unwrap().to_string(),
            "bagging:10:j48:2"
        );
        assert_eq!(
            "bagging:4:ibk:3".parse::<ClassifierSpec>().unwrap(),
            ClassifierSpec::Bagging {
                iterations: 4,
                base: Box::new(ClassifierSpec::Ibk { k: 3 })
            }
        );
    }

    #[test]
    fn rejects_bad_specs() {
        for bad in ["svm", "ibk:0", "ibk:x", "bayes:1", "j48:1:2", "bagging:0", "bagging:3:svm"] {
            assert!(bad.parse::<ClassifierSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn display_round_trips() {
        for spec in ClassifierSpec::defaults() {
            assert_eq!(spec.to_string().parse::<ClassifierSpec>().unwrap(), spec);
        }
    }
}
