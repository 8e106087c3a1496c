//! Classification with rejection through an ensemble of cost-sensitive
//! one-vs-rest classifiers.
//!
//! The crate bundles the surrogate loss and its decision rule, exact Bayes
//! oracles and theorem auditors, trainable linear and MLP score functions,
//! three baseline methods, weak-supervision protocols (label noise and
//! positive-unlabeled data) and an experiment harness. See `examples/` for one
//! runnable program per capability, and the `bench` binary for the CLI.

pub mod audit;
pub mod baselines;
pub mod data;
pub mod domain;
pub mod error;
pub mod gradcheck;
pub mod harness;
pub mod losses;
pub mod models;
pub mod objective;
pub mod surrogate;
pub mod theory;
pub mod weaksup;

pub use domain::{
    compute_metrics, zero_one_c_loss, Dataset, Decision, Label, LabeledSample, MetricsRecord,
    RejectReason, RejectionCost,
};
pub use error::{Error, Result};
pub use losses::MarginLoss;
pub use objective::{DecisionRule, Objective};
pub use surrogate::{decide, CsSurrogate};
pub use theory::PosteriorSimplex;
