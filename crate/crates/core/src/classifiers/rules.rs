use serde::{Deserialize, Serialize};

use super::model::{Structure, TrainedModel};
use super::ClassifierSpec;
use crate::dataset::{ClassCounts, ClassLabel, Dataset, N_CLASSES};
use crate::error::{Error, Result};

/// Laplace correction constant: one pseudo-count per class.
const LAPLACE_K: f64 = N_CLASSES as f64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub attribute: usize,
    pub threshold: f64,
    /// `true` for `x <= threshold`, `false` for `x > threshold`.
    pub at_most: bool,
}

impl Condition {
    pub fn matches(&self, x: &[f64]) -> bool {
        let v = x[self.attribute];
        if self.at_most {
            v <= self.threshold
        } else {
            v > self.threshold
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub conditions: Vec<Condition>,
    pub class: ClassLabel,
    /// Training records covered when the rule was learned, and how many of
    /// them belong to `class`.
    pub covered: usize,
    pub correct: usize,
}

impl Rule {
    pub fn matches(&self, x: &[f64]) -> bool {
        self.conditions.iter().all(|c| c.matches(x))
    }
}

/// Ordered rules; the first matching rule fires, otherwise `default`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct DecisionList {
    pub(crate) rules: Vec<Rule>,
    pub(crate) default: ClassLabel,
}

impl DecisionList {
    pub(crate) fn classify(&self, x: &[f64]) -> ClassLabel {
        self.rules
            .iter()
            .find(|r| r.matches(x))
            .map_or(self.default, |r| r.class)
    }
}

fn laplace(correct: usize, covered: usize) -> f64 {
    (correct as f64 + 1.0) / (covered as f64 + LAPLACE_K)
}

fn counts_of(ds: &Dataset, idx: &[usize]) -> ClassCounts {
    let mut c = ClassCounts::default();
    for &i in idx {
        c.0[ds.labels()[i].index()] += 1;
    }
    c
}

struct Refinement {
    condition: Condition,
    correct: usize,
    covered: usize,
}

/// Best single condition to add: it must drop at least one record of another
/// class, keep at least one of `target`, and keep `min_coverage` records.
/// Ranked by Laplace accuracy, then by correct count; remaining ties keep the
/// first in (attribute, threshold, `<=` before `>`) order.
fn best_refinement(ds: &Dataset, covered: &[usize], target: ClassLabel, min_coverage: usize) -> Option<Refinement> {
    let total = covered.len();
    let total_correct = covered.iter().filter(|&&i| ds.labels()[i] == target).count();
    let total_wrong = total - total_correct;
    let mut best: Option<(f64, Refinement)> = None;
    let mut consider = |condition: Condition, correct: usize, size: usize| {
        let wrong = size - correct;
        if correct == 0 || wrong >= total_wrong || size < min_coverage {
            return;
        }
        let score = laplace(correct, size);
        let better = match &best {
            None => true,
            Some((s, r)) => score > *s || (score == *s && correct > r.correct),
        };
        if better {
            best = Some((score, Refinement { condition, correct, covered: size }));
        }
    };
    let mut sorted = covered.to_vec();
    for attribute in 0..ds.n_attributes() {
        let value = |i: usize| ds.row(i)[attribute];
        sorted.sort_by(|&a, &b| value(a).total_cmp(&value(b)).then(a.cmp(&b)));
        let mut left_correct = 0;
        for pos in 0..total.saturating_sub(1) {
            if ds.labels()[sorted[pos]] == target {
                left_correct += 1;
            }
            let (here, next) = (value(sorted[pos]), value(sorted[pos + 1]));
            if here >= next {
                continue;
            }
            let threshold = {
                let t = here / 2.0 + next / 2.0;
                if here <= t && t < next { t } else { here }
            };
            let left = pos + 1;
            consider(Condition { attribute, threshold, at_most: true }, left_correct, left);
            consider(
                Condition { attribute, threshold, at_most: false },
                total_correct - left_correct,
                total - left,
            );
        }
    }
    best.map(|(_, r)| r)
}

/// Grows one rule for `target` by greedy specialization until it is pure or
/// cannot be refined further.
fn learn_rule(ds: &Dataset, remaining: &[usize], target: ClassLabel, min_coverage: usize) -> (Rule, Vec<usize>) {
    let mut covered = remaining.to_vec();
    let mut conditions = Vec::new();
    loop {
        let correct = covered.iter().filter(|&&i| ds.labels()[i] == target).count();
        if correct == covered.len() {
            break;
        }
        let Some(step) = best_refinement(ds, &covered, target, min_coverage) else {
            break;
        };
        covered.retain(|&i| step.condition.matches(ds.row(i)));
        debug_assert_eq!(covered.len(), step.covered);
        conditions.push(step.condition);
    }
    let correct = covered.iter().filter(|&&i| ds.labels()[i] == target).count();
    let rule = Rule {
        conditions,
        class: target,
        covered: covered.len(),
        correct,
    };
    (rule, covered)
}

/// Sequential covering: learn a rule for the most frequent uncovered class,
/// keep it if it covers at least `min_coverage` records and either is pure or
/// beats the Laplace accuracy of predicting the majority of what remains,
/// then drop the records it covers. The default rule is the majority of the
/// records left over (the global majority when none are).
pub fn train_rules(ds: &Dataset, min_coverage: usize) -> Result<TrainedModel> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if min_coverage < 1 {
        return Err(Error::invalid("rules min_cov must be >= 1"));
    }
    let mut remaining: Vec<usize> = (0..ds.len()).collect();
    let mut rules = Vec::new();
    loop {
        let counts = counts_of(ds, &remaining);
        if counts.present().len() <= 1 {
            break;
        }
        let target = counts.majority().expect("non-empty");
        let (rule, covered) = learn_rule(ds, &remaining, target, min_coverage);
        let default_accuracy = laplace(counts.get(target), remaining.len());
        let pure = rule.correct == rule.covered;
        let accept = !rule.conditions.is_empty()
            && rule.covered >= min_coverage
            && (pure || laplace(rule.correct, rule.covered) > default_accuracy);
        if !accept {
            break;
        }
        remaining.retain(|i| covered.binary_search(i).is_err());
        rules.push(rule);
    }
    let default = counts_of(ds, &remaining)
        .majority()
        .or_else(|| ds.class_distribution().majority())
        .expect("non-empty dataset");
    Ok(TrainedModel::new(
        ClassifierSpec::Rules { min_coverage },
        ds,
        None,
        Structure::Rules(DecisionList { rules, default }),
    ))
}
