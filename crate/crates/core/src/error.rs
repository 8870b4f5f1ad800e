//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the orbital-correlation pipeline.
#[derive(Debug, Error)]
pub enum CoreError {
    /// A mode index exceeded the mode count of the basis or configuration.
    #[error("mode index {mode} out of range for {mode_count} modes")]
    ModeOutOfRange { mode: usize, mode_count: usize },

    /// A sector selection matched no occupation configuration.
    #[error("sector {0} is empty")]
    EmptySector(String),

    /// An unconstrained enumeration would exceed the supported basis size.
    #[error("basis over {mode_count} modes is too large to enumerate ({dim} configurations)")]
    BasisTooLarge { mode_count: usize, dim: u128 },

    /// A sector label violated its own consistency rules.
    #[error("invalid sector label: {0}")]
    InvalidSector(String),

    /// Dimension mismatch between operator, basis or state.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// FCIDUMP (or other text input) could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// An operator that must be Hermitian is not.
    #[error("operator is not Hermitian (max deviation {max_deviation:.3e})")]
    NotHermitian { max_deviation: f64 },

    /// The iterative eigensolver did not reach the requested residual.
    #[error("eigensolver did not converge after {iterations} iterations (best residual {best_residual:.3e})")]
    EigenNonConvergence {
        iterations: usize,
        best_residual: f64,
    },

    /// A matrix failed a density-matrix invariant (trace, Hermiticity, positivity).
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    /// A reduced density matrix leaked weight outside its symmetry sector.
    #[error("sector symmetry violation: {context} (magnitude {magnitude:.3e})")]
    SectorViolation { context: String, magnitude: f64 },

    /// Generic invariant violation in user-supplied data.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Convenient result alias.
pub type Result<T> = std::result::Result<T, CoreError>;
