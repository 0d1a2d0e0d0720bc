//! The four-level dressed-state sensor: rotating-frame model, harmonic-limit
//! oracle, shot-noise sampling, and deterministic dataset generation.

mod dataset;
mod model;
mod params;
mod shots;

pub use dataset::{
    generate_dataset, read_dataset, split_dataset, DatasetRows, DatasetSpec, SplitIndices,
};
pub use model::{
    effective_pd, reference_period, reference_period_with, simulate_response,
    simulate_response_with_tol, ResponseTrace, SIM_TOL,
};
pub use params::SensorParams;
pub use shots::sample_shots;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SensorError {
    #[error(transparent)]
    Quantum(#[from] crate::quantum::QuantumError),
    #[error("simulation failed at grid point omega_tg = {omega_tg} kHz, xi = {xi} kHz: {source}")]
    GridPointFailed {
        omega_tg: f64,
        xi: f64,
        source: crate::quantum::QuantumError,
    },
    #[error("no return to maximum found within the simulated horizon")]
    FitFailed,
    #[error("reference period t0 has not been computed for these parameters")]
    MissingReferencePeriod,
    #[error("invalid dataset spec: {0}")]
    InvalidSpec(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed dataset file {path}: {reason}")]
    Malformed { path: String, reason: String },
}
