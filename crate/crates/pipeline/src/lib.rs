//! Bundled initial-condition datasets and the experiment runner behind the
//! `qcorr` command.

pub mod config;
pub mod datasets;
pub mod error;
pub mod experiment;
pub mod stats;

pub use config::{ExperimentConfig, Settings, Stage, TruncationSpec};
pub use datasets::{load_cics, CicsDataset, CicsEntry, DatasetId};
pub use error::{PipelineError, PipelineResult};
pub use experiment::{run_experiment, Manifest, RunOutcome, SummaryRow};
