//! Classification of network traffic windows into normal traffic or one of
//! seven DoS / brute-force attack classes, using SNMP-MIB ICMP counters.
//!
//! The pipeline is:
//!
//! 1. [`dataset`]: load or synthesize labeled counter-delta records.
//! 2. [`features`]: score attributes (InfoGain, ReliefF, correlation) and rank them.
//! 3. [`classifiers`]: Naive Bayes, IBk, a C4.5-style tree, a covering rule
//!    learner, and bagging.
//! 4. [`eval`]: stratified cross-validation, confusion matrices and weighted metrics.
//! 5. [`collector`]: live SNMP v2c polling of an agent, delta computation and
//!    per-window classification, plus a simulated agent for testing.
//! 6. [`cli`]: the `mibguard` command-line front end.

pub mod classifiers;
pub mod cli;
pub mod collector;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod features;


pub use classifiers::{ClassDistribution, ClassifierSpec, TrainedModel};
pub use eval::{ConfusionMatrix, EvalReport};
pub use dataset::{AttributeSchema, ClassLabel, Dataset, NormalizationStats};
pub use error::{Error, Result};
pub use features::{AttributeRanking, AttributeScore, Evaluator};


