//! Experiment runner for `harnack-core`: graph sources, declarative configs,
//! JSON reports with exit-status classification, and the acceptance suite.

// `!(x > 0.0)` is how NaN gets rejected along with the rest
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod report;
pub mod runner;
pub mod source;
pub mod verify;

pub use config::{DomainSpec, ExperimentConfig, Operation, OutputConfig};
pub use runner::{run, Artifact, RunOutput};
pub use source::GraphSource;
pub use verify::{verify_suite, Tolerances, VerifyOptions, VerifySummary};
