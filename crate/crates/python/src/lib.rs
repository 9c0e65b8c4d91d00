//! Python bindings: datasets, attribute ranking, model training and
//! prediction, cross-validation and counter deltas.

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use mibguard_core::classifiers::train;
use mibguard_core::collector::{delta as counter_delta, CounterSnapshot};
use mibguard_core::dataset::{load_csv, synth_generate, write_csv, SynthSpec};
use mibguard_core::eval::evaluate_cv as core_evaluate_cv;
use mibguard_core::features::ReliefFParams;
use mibguard_core::{AttributeSchema, ClassLabel, ClassifierSpec, Error, Evaluator, TrainedModel};

fn to_py(e: Error) -> PyErr {
    if e.is_network() || matches!(e, Error::Io(_)) {
        PyOSError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn parse_spec(s: &str) -> PyResult<ClassifierSpec> {
    s.parse().map_err(to_py)
}

fn json_to_py<'py>(py: Python<'py>, s: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (s,))
}

/// Labeled records over named numeric attributes.
#[pyclass(frozen, module = "mibguard")]
struct Dataset {
    inner: mibguard_core::Dataset,
}

#[pymethods]
impl Dataset {
    #[new]
    fn new(attributes: Vec<String>, rows: Vec<Vec<f64>>, labels: Vec<String>) -> PyResult<Self> {
        let labels = labels
            .iter()
            .map(|l| ClassLabel::parse(l).ok_or_else(|| PyValueError::new_err(format!("unknown class label {l:?}"))))
            .collect::<PyResult<Vec<_>>>()?;
        let schema = AttributeSchema::new(attributes).map_err(to_py)?;
        Ok(Dataset { inner: mibguard_core::Dataset::new(schema, rows, labels).map_err(to_py)? })
    }

    #[staticmethod]
    fn from_csv(path: &str) -> PyResult<Self> {
        let file = std::fs::File::open(path).map_err(|e| PyOSError::new_err(format!("{path}: {e}")))?;
        Ok(Dataset { inner: load_csv(std::io::BufReader::new(file)).map_err(to_py)? })
    }

    /// Built-in eight-class synthetic preset.
    #[staticmethod]
    #[pyo3(signature = (seed = 1))]
    fn synth(seed: u64) -> PyResult<Self> {
        Ok(Dataset { inner: synth_generate(&SynthSpec::eight_class(seed)).map_err(to_py)? })
    }

    #[getter]
    fn attributes(&self) -> Vec<String> {
        self.inner.schema().names().to_vec()
    }

    #[getter]
    fn labels(&self) -> Vec<&'static str> {
        self.inner.labels().iter().map(|l| l.name()).collect()
    }

    #[getter]
    fn rows(&self) -> Vec<Vec<f64>> {
        self.inner.rows().to_vec()
    }

    fn select(&self, attributes: Vec<String>) -> PyResult<Self> {
        Ok(Dataset { inner: self.inner.select_attributes(&attributes).map_err(to_py)? })
    }

    fn to_csv(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        write_csv(&self.inner, &mut buf).map_err(to_py)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Dataset({} records, attributes={:?})", self.inner.len(), self.inner.schema().names())
    }
}

/// Attributes ranked best first as `(name, score)` pairs.
#[pyfunction]
#[pyo3(signature = (dataset, method = "infogain", seed = 1))]
fn rank(dataset: &Dataset, method: &str, seed: u64) -> PyResult<Vec<(String, f64)>> {
    let evaluator = match method.parse::<Evaluator>().map_err(to_py)? {
        Evaluator::ReliefF(p) => Evaluator::ReliefF(ReliefFParams { seed, ..p }),
        other => other,
    };
    let ranking = evaluator.rank(&dataset.inner).map_err(to_py)?;
    Ok(ranking.scores.into_iter().map(|s| (s.name, s.score)).collect())
}

/// A trained classifier.
#[pyclass(frozen, module = "mibguard")]
struct Model {
    inner: TrainedModel,
}

#[pymethods]
impl Model {
    #[staticmethod]
    #[pyo3(signature = (dataset, classifier = "j48", seed = 1))]
    fn train(dataset: &Dataset, classifier: &str, seed: u64) -> PyResult<Self> {
        Ok(Model { inner: train(&dataset.inner, &parse_spec(classifier)?, seed).map_err(to_py)? })
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(Model { inner: TrainedModel::from_json(s).map_err(to_py)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn attributes(&self) -> Vec<String> {
        self.inner.schema().names().to_vec()
    }

    #[getter]
    fn classifier(&self) -> String {
        self.inner.spec().to_string()
    }

    fn predict(&self, row: Vec<f64>) -> PyResult<&'static str> {
        Ok(self.inner.predict(&row).map_err(to_py)?.name())
    }

    /// Class probabilities keyed by label name.
    fn predict_proba<'py>(&self, py: Python<'py>, row: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
        let dist = self.inner.predict_distribution(&row).map_err(to_py)?;
        let out = PyDict::new(py);
        for label in ClassLabel::ALL {
            out.set_item(label.name(), dist.get(label))?;
        }
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!("Model({}, attributes={:?})", self.inner.spec(), self.inner.schema().names())
    }
}

/// Stratified k-fold cross-validation; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (dataset, classifier = "j48", folds = 10, seed = 1))]
fn evaluate_cv<'py>(py: Python<'py>, dataset: &Dataset, classifier: &str, folds: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let report = core_evaluate_cv(&dataset.inner, &parse_spec(classifier)?, folds, seed).map_err(to_py)?;
    json_to_py(py, &report.to_json().map_err(to_py)?)
}

/// Wrap-corrected per-counter deltas between two six-counter snapshots.
#[pyfunction]
#[pyo3(signature = (prev, curr, prev_ms = 0, curr_ms = 1))]
fn delta(prev: [u32; 6], curr: [u32; 6], prev_ms: u64, curr_ms: u64) -> PyResult<Vec<f64>> {
    let d = counter_delta(&CounterSnapshot::new(prev_ms, prev), &CounterSnapshot::new(curr_ms, curr)).map_err(to_py)?;
    Ok(d.deltas.to_vec())
}

#[pymodule]
fn mibguard(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Dataset>()?;
    m.add_class::<Model>()?;
    m.add_function(wrap_pyfunction!(rank, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_cv, m)?)?;
    m.add_function(wrap_pyfunction!(delta, m)?)?;
    Ok(())
}
