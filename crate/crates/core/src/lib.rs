//! Simulation and training workbench for a dressed-state atomic sensor read
//! out by a feed-forward neural network, plus an inverse-engineered quantum
//! perceptron gate with an adiabatic baseline.
//!
//! The crate is split along the problem's natural seams:
//!
//! - [`quantum`]: state vectors, time-dependent Hamiltonians, Schrödinger
//!   integration, and the two-level ground-state primitives.
//! - [`sensor`]: the four-level dressed-state sensor model, shot sampling,
//!   and deterministic dataset generation.
//! - [`mlp`]: the estimation network and its Levenberg-Marquardt trainer.
//! - [`perceptron`]: the shortcut-to-adiabaticity gate design and robustness
//!   scans.
//! - [`qnn`]: perceptrons assembled into a feed-forward network, with a
//!   classical surrogate and a quantum-simulated forward pass.

pub mod mlp;
pub mod perceptron;
pub mod qnn;
pub mod quantum;
pub mod seed;
pub mod sensor;

mod par;

/// Version string recorded in manifests and checkpoints.
pub const VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));
