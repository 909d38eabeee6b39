//! Host-side companion of `ns-besov-core`: a `rustfft` transform backend,
//! parallel ensembles, scenario files, binary snapshots, CSV/JSON artifacts
//! and the `nsbesov` command-line runner.

pub mod artifact;
pub mod cli;
pub mod ensemble;
pub mod fft;
pub mod scenario;
pub mod snapshot;

pub use fft::RustFft;
pub use scenario::Scenario;

/// Transform context used throughout this crate.
pub type Spectral = ns_besov_core::Spectral<RustFft>;

pub fn spectral() -> Spectral {
    ns_besov_core::Spectral::new(RustFft::new())
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] ns_besov_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("snapshot: {0}")]
    Snapshot(#[from] snapshot::SnapshotError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
