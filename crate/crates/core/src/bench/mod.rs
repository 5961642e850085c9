//! Synthetic benchmark harness: scenario configuration, seeded simulation,
//! dataset/report files and the repeated three-way-split protocol.

pub mod config;
pub mod dataset;
pub mod experiment;
pub mod sim;

pub use config::{FusionSettings, SimConfig, SourceProfile};
pub use dataset::{Dataset, Sample, SourceReport};
pub use experiment::{
    evaluate, parse_methods, run_experiment, ExperimentReport, Method, MethodReport,
};
pub use sim::simulate;
