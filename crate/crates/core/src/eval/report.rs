use std::fmt::Write;

use super::EvalReport;
use crate::dataset::ClassLabel;
use crate::error::Result;

impl EvalReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Fixed-width text table with three decimals.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let total = self.matrix.total();
        let _ = writeln!(out, "Classifier: {}  Folds: {}  Seed: {}", self.classifier, self.folds, self.seed);
        let _ = writeln!(
            out,
            "Correctly classified: {} / {} ({:.3}%)",
            self.matrix.trace(),
            total,
            100.0 * self.accuracy
        );
        let nva = self.matrix.normal_vs_attack();
        let _ = writeln!(
            out,
            "Normal vs attack accuracy: {:.3}%",
            100.0 * (nva[0][0] + nva[1][1]) as f64 / total.max(1) as f64
        );
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:<18} {:>8} {:>8} {:>9} {:>8} {:>9} {:>8}",
            "Class", "TP Rate", "FP Rate", "Precision", "Recall", "F-Measure", "Support"
        );
        for m in &self.per_class {
            let _ = writeln!(
                out,
                "{:<18} {:>8.3} {:>8.3} {:>9.3} {:>8.3} {:>9.3} {:>8}",
                m.label.display_name(),
                m.tp_rate,
                m.fp_rate,
                m.precision,
                m.recall,
                m.f_measure,
                m.support
            );
        }
        let w = &self.weighted;
        let _ = writeln!(
            out,
            "{:<18} {:>8.3} {:>8.3} {:>9.3} {:>8.3} {:>9.3} {:>8}",
            "Weighted Avg.", w.tp_rate, w.fp_rate, w.precision, w.recall, w.f_measure, total
        );
        let _ = writeln!(out);
        let _ = writeln!(out, "Confusion matrix (rows actual, columns predicted)");
        let width = total.to_string().len().max(2);
        let letters = "abcdefgh";
        for (i, c) in letters.chars().enumerate() {
            let _ = write!(out, "{:>w$}", c, w = width + if i == 0 { 0 } else { 1 });
        }
        let _ = writeln!(out);
        for (a, row) in self.matrix.0.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>width$}")).collect();
            let _ = writeln!(
                out,
                "{}  | {} = {}",
                cells.join(" "),
                &letters[a..a + 1],
                ClassLabel::ALL[a].display_name()
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use crate::classifiers::ClassifierSpec;
    use crate::dataset::ClassLabel::*;
    use crate::eval::{confusion, EvalReport};

    fn report() -> EvalReport {
        let m = confusion(&[Normal, Normal, IcmpEcho, TcpSyn], &[Normal, IcmpEcho, IcmpEcho, TcpSyn]).unwrap();
        EvalReport::from_matrix(ClassifierSpec::Bayes, 2, 7, m).unwrap()
    }

    #[test]
    fn json_round_trip() {
        let r = report();
        let back = EvalReport::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(r, back);
        let v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        for key in ["classifier", "folds", "seed", "matrix", "classes", "per_class", "weighted", "accuracy"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["per_class"][0]["fn"], 1);
    }

    #[test]
    fn text_layout() {
        let text = report().render();
        assert!(text.contains("Correctly classified: 3 / 4 (75.000%)"));
        assert!(text.contains("Weighted Avg."));
        let normal = text.lines().find(|l| l.starts_with("Normal    ")).unwrap();
        assert!(normal.contains("0.500") && normal.contains("1.000"), "{normal}");
    }
}
