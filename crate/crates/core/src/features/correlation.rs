use crate::dataset::Dataset;
use crate::error::{Error, Result};

use super::AttributeScore;

/// Pearson correlation; 0 when either side has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return 0.0;
    }
    (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)
}

/// Prior-weighted mean of |r| between the attribute and each one-vs-rest
/// class indicator.
pub fn correlation_scores(ds: &Dataset) -> Result<Vec<AttributeScore>> {
    ds.require_records(2)?;
    let counts = ds.class_distribution();
    let present = counts.present();
    if present.len() < 2 {
        return Err(Error::invalid("correlation evaluator needs at least two classes"));
    }
    let n = ds.len() as f64;
    let indicators: Vec<(f64, Vec<f64>)> = present
        .iter()
        .map(|&c| {
            let ind = ds.labels().iter().map(|&l| if l == c { 1.0 } else { 0.0 }).collect();
            (counts.get(c) as f64 / n, ind)
        })
        .collect();
    Ok(ds
        .schema()
        .names()
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let col = ds.column(j);
            let score = indicators
                .iter()
                .map(|(prior, ind)| prior * pearson(&col, ind).abs())
                .sum::<f64>();
            AttributeScore {
                name: name.clone(),
                score,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{AttributeSchema, ClassLabel};
    use proptest::prelude::*;

    use ClassLabel::{IcmpEcho as Neg, Normal as Pos};

    fn one_column(col: Vec<f64>, labels: Vec<ClassLabel>) -> Dataset {
        Dataset::new(
            AttributeSchema::new(["a"]).unwrap(),
            col.into_iter().map(|v| vec![v]).collect(),
            labels,
        )
        .unwrap()
    }

    #[test]
    fn indicator_attribute_scores_one() {
        let ds = one_column(vec![1., 1., 0., 0., 0.], vec![Pos, Pos, Neg, Neg, Neg]);
        assert!((correlation_scores(&ds).unwrap()[0].score - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hand_example() {
        let ds = one_column(vec![2., 2., 0., 0.], vec![Pos, Pos, Neg, Neg]);
        assert!((correlation_scores(&ds).unwrap()[0].score - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_attribute_scores_zero() {
        let ds = one_column(vec![4.; 4], vec![Pos, Pos, Neg, Neg]);
        assert_eq!(correlation_scores(&ds).unwrap()[0].score, 0.0);
    }

    #[test]
    fn single_class_rejected() {
        let ds = one_column(vec![1., 2.], vec![Pos, Pos]);
        assert!(correlation_scores(&ds).is_err());
    }

    proptest! {
        #[test]
        fn affine_invariant(
            data in prop::collection::vec((-100.0f64..100.0, 0usize..4), 3..100),
            scale in 0.01f64..100.0,
            shift in -1e3f64..1e3,
        ) {
            let (col, labels): (Vec<f64>, Vec<ClassLabel>) =
                data.into_iter().map(|(v, l)| (v, ClassLabel::ALL[l])).unzip();
            prop_assume!(labels.iter().any(|&l| l != labels[0]));
            let moved: Vec<f64> = col.iter().map(|v| v * scale + shift).collect();
            let a = correlation_scores(&one_column(col, labels.clone())).unwrap()[0].score;
            let b = correlation_scores(&one_column(moved, labels)).unwrap()[0].score;
            prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&a));
        }
    }
}
