//! Dispersive-readout modeling for a multilevel superconducting qubit coupled
//! to a linear microwave resonator.
//!
//! The crate computes, from a handful of circuit parameters:
//!
//! - fourth-order dispersive ac-Stark and Kerr coefficients, analytically and
//!   from exact diagonalization ([`dispersive`]);
//! - dressed energies and effective resonator frequencies from the
//!   excitation-number block structure ([`eigenblocks`]);
//! - the nonlinear steady-state cavity response, including the
//!   state-dependent photon-number avalanche at high drive power
//!   ([`response`]);
//! - homodyne measurement SNR and the dressed relaxation, dephasing and
//!   leakage rates that degrade the measurement's QND character
//!   ([`metrics`]).
//!
//! Everything is deterministic; frequencies and rates are ordinary
//! frequencies in MHz throughout.

pub mod config;
pub mod dispersive;
pub mod eigenblocks;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod output;
pub mod response;
pub mod sweep;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
