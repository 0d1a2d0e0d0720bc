//! State vectors, time-dependent Hamiltonians, and Schrödinger evolution.
//!
//! Everything here works in natural units with hbar = 1: frequencies are
//! angular (rad/ms in the sensor stack) and time carries the inverse unit.

mod hamiltonian;
mod integrate;
mod state;
mod two_level;

pub use hamiltonian::{HamiltonianTerm, TimeDependentHamiltonian, TimeDependentOperator};
pub use integrate::{evolve, evolve_fixed, EvolutionResult};
pub use state::{fidelity, StateVector};
pub use two_level::{ground_state_2level, sigmoid, two_level_hamiltonian_matrix};

use thiserror::Error;

/// Errors produced by state construction and evolution.
#[derive(Debug, Error)]
pub enum QuantumError {
    #[error("state dimension {got} does not match expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state vector is not normalized: sum |amp|^2 = {norm_sq}")]
    NotNormalized { norm_sq: f64 },
    #[error("Hamiltonian term {index} deviates from Hermitian by {deviation:e}")]
    NonHermitianTerm { index: usize, deviation: f64 },
    #[error("norm drift {drift:e} exceeds budget {budget:e}; step tolerance too coarse")]
    NormDriftExceeded { drift: f64, budget: f64 },
    #[error("time grid must be strictly increasing")]
    NonMonotonicTimes,
    #[error("evolution tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),
    #[error("two-level spectrum is degenerate (x = 0, omega = 0)")]
    ZeroGap,
    #[error("transverse amplitude must be non-negative, got {0}")]
    NegativeAmplitude(f64),
    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },
}
