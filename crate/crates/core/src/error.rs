use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Fock index {n} out of range for a space of dimension {dim}")]
    OutOfRange { n: usize, dim: usize },

    #[error("truncation too small: dimension {dim} < required {required} ({context})")]
    Truncation {
        dim: usize,
        required: usize,
        context: String,
    },

    #[error("shape mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("adiabatic condition violated: detuning/coupling ratio {ratio:.3} < 5")]
    Adiabaticity { ratio: f64 },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("measurement branch '{level}' has zero probability")]
    DegenerateOutcome { level: char },

    #[error("cannot prepare |{target}>: initial amplitude c_{n0} is zero")]
    InfeasiblePreparation { n0: usize, target: usize },

    #[error("series cutoff {cutoff} leaves tail mass {tail:.3e} (> 1e-6)")]
    SeriesCutoff { cutoff: usize, tail: f64 },

    #[error(
        "integrator did not converge after {refinements} refinements \
         ({steps_per_period} steps/period, last change {change:.3e})"
    )]
    NonConvergence {
        refinements: usize,
        steps_per_period: usize,
        change: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
