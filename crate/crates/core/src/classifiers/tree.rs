use serde::{Deserialize, Serialize};

use super::model::{Structure, TrainedModel};
use super::{ClassDistribution, ClassifierSpec};
use crate::dataset::{Dataset, N_CLASSES};
use crate::error::{Error, Result};
use crate::features::entropy;

/// Gains at or below this are treated as zero.
const GAIN_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub(crate) enum Node {
    Leaf {
        counts: [usize; N_CLASSES],
    },
    /// `x[attribute] <= threshold` goes left.
    Split {
        attribute: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Binary tree stored as a flat arena; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct DecisionTree {
    nodes: Vec<Node>,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    attribute: usize,
    threshold: f64,
    gain: f64,
    ratio: f64,
}

fn class_counts(ds: &Dataset, idx: &[usize]) -> [usize; N_CLASSES] {
    let mut counts = [0; N_CLASSES];
    for &i in idx {
        counts[ds.labels()[i].index()] += 1;
    }
    counts
}

fn midpoint(a: f64, b: f64) -> f64 {
    let t = a / 2.0 + b / 2.0;
    if a <= t && t < b {
        t
    } else {
        a
    }
}

/// Every binary split with at least `min_leaf` records per side, in
/// (attribute, ascending threshold) order.
fn candidates(ds: &Dataset, idx: &[usize], parent: &[usize; N_CLASSES], min_leaf: usize) -> Vec<Candidate> {
    let n = idx.len();
    let h_parent = entropy(parent);
    let mut out = Vec::new();
    let mut sorted = idx.to_vec();
    for attribute in 0..ds.n_attributes() {
        let value = |i: usize| ds.row(i)[attribute];
        sorted.sort_by(|&a, &b| value(a).total_cmp(&value(b)).then(a.cmp(&b)));
        let mut left = [0usize; N_CLASSES];
        for pos in 0..n - 1 {
            left[ds.labels()[sorted[pos]].index()] += 1;
            let (here, next) = (value(sorted[pos]), value(sorted[pos + 1]));
            let nl = pos + 1;
            let nr = n - nl;
            if here >= next || nl < min_leaf || nr < min_leaf {
                continue;
            }
            let mut right = *parent;
            for c in 0..N_CLASSES {
                right[c] -= left[c];
            }
            let (fl, fr) = (nl as f64 / n as f64, nr as f64 / n as f64);
            let gain = h_parent - (fl * entropy(&left) + fr * entropy(&right));
            let split_info = entropy(&[nl, nr]);
            out.push(Candidate {
                attribute,
                threshold: midpoint(here, next),
                gain,
                ratio: gain / split_info,
            });
        }
    }
    out
}

/// Highest gain ratio among candidates whose gain reaches the mean gain of the
/// positive-gain candidates. Falls back to the first candidate when nothing
/// has positive gain, so impure nodes keep splitting while any split exists.
fn choose(cands: &[Candidate]) -> Option<Candidate> {
    let positive: Vec<&Candidate> = cands.iter().filter(|c| c.gain > GAIN_EPS).collect();
    if positive.is_empty() {
        return cands.first().copied();
    }
    let mean = positive.iter().map(|c| c.gain).sum::<f64>() / positive.len() as f64;
    let mut best: Option<&Candidate> = None;
    for c in positive {
        if c.gain + GAIN_EPS < mean {
            continue;
        }
        if best.is_none_or(|b| c.ratio > b.ratio) {
            best = Some(c);
        }
    }
    best.copied()
}

/// C4.5-style tree: binary numeric splits chosen by gain ratio, no pruning.
/// A node becomes a leaf when it is pure, has fewer than `2 * min_leaf`
/// records, or admits no split.
pub fn train_tree(ds: &Dataset, min_leaf: usize) -> Result<TrainedModel> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if min_leaf < 1 {
        return Err(Error::invalid("j48 min_leaf must be >= 1"));
    }
    let mut nodes = vec![Node::Leaf { counts: [0; N_CLASSES] }];
    let mut work = vec![(0usize, (0..ds.len()).collect::<Vec<_>>())];
    while let Some((id, idx)) = work.pop() {
        let counts = class_counts(ds, &idx);
        nodes[id] = Node::Leaf { counts };
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || idx.len() < 2 * min_leaf {
            continue;
        }
        let Some(split) = choose(&candidates(ds, &idx, &counts, min_leaf)) else {
            continue;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = idx
            .iter()
            .partition(|&&i| ds.row(i)[split.attribute] <= split.threshold);
        let (left, right) = (nodes.len(), nodes.len() + 1);
        nodes.push(Node::Leaf { counts: [0; N_CLASSES] });
        nodes.push(Node::Leaf { counts: [0; N_CLASSES] });
        nodes[id] = Node::Split {
            attribute: split.attribute,
            threshold: split.threshold,
            left,
            right,
        };
        work.push((right, r));
        work.push((left, l));
    }
    let tree = DecisionTree { nodes };
    Ok(TrainedModel::new(
        ClassifierSpec::J48 { min_leaf },
        ds,
        None,
        Structure::Tree(tree),
    ))
}

impl DecisionTree {
    fn leaf(&self, x: &[f64]) -> &[usize; N_CLASSES] {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Leaf { counts } => return counts,
                Node::Split {
                    attribute,
                    threshold,
                    left,
                    right,
                } => id = if x[*attribute] <= *threshold { *left } else { *right },
            }
        }
    }

    pub(crate) fn distribution(&self, x: &[f64]) -> ClassDistribution {
        ClassDistribution::from_counts(self.leaf(x))
    }

    #[cfg(test)]
    pub(crate) fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    #[cfg(test)]
    pub(crate) fn depth(&self) -> usize {
        fn walk(nodes: &[Node], id: usize) -> usize {
            match &nodes[id] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}
