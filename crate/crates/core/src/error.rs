use thiserror::Error;

/// Errors produced by the physics layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    /// A ladder transition is exactly resonant with the resonator, so the
    /// dispersive expansion is undefined.
    #[error("transition {index} is resonant with the resonator (Delta_{index} = 0)")]
    Resonance { index: usize },

    /// Two-photon resonance Delta_{i+1} + Delta_i = 0 with a nonzero
    /// second-order coupling.
    #[error("two-photon resonance at transition {index} (Delta_{} + Delta_{index} = 0)", index + 1)]
    TwoPhotonResonance { index: usize },

    #[error("MLS level {level} out of range for {num_levels} levels")]
    InvalidLevel { level: usize, num_levels: usize },

    /// Non-integer excitation number below the full-block threshold M-1.
    #[error("non-integer excitation number {n_total} below M-1 = {threshold}")]
    NonIntegerBlock { n_total: f64, threshold: f64 },

    /// The tridiagonal eigensolver failed to converge. Should not happen for
    /// the block sizes used here; treated as an internal error.
    #[error("eigensolver failed to converge (dim {dim})")]
    EigenConvergence { dim: usize },

    #[error("noise spectrum undefined at zero detuning")]
    ZeroDetuningSpectrum,
}

pub type Result<T> = std::result::Result<T, Error>;
