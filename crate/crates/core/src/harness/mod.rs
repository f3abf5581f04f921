//! Scenario configuration, Monte-Carlo runner and CSV reporting.

mod config;
mod report;
mod run;
pub mod selftest;

use thiserror::Error;

use crate::channel::ChannelError;
use crate::hybrid_bf::HybridError;
use crate::subspace::SubspaceError;

pub use config::{narrow_sector, Duplex, Method, Scale, ScenarioConfig};
pub use report::{
    config_hash, manifest_path, version_string, write_csv, write_csv_to, RunManifest, CSV_HEADER,
};
pub use run::{
    aggregate_for_groups, evaluate_groups, run_scenario, run_seed, schedule_groups, Diagnostic, Precoding,
    RateEntry, Realization, RunRecord, SubBand,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Hybrid(#[from] HybridError),
    #[error(transparent)]
    Subspace(#[from] SubspaceError),
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Io(e.to_string())
    }
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        HarnessError::Io(e.to_string())
    }
}
