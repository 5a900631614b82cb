//! Error type shared by all modules.

use alloc::string::String;
use core::fmt;

/// Errors produced by state construction, measurement, and reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operand dimensions are inconsistent (e.g. tensor of non-qubit states).
    DimensionMismatch {
        /// Dimension the operation requires.
        expected: usize,
        /// Dimension actually supplied.
        got: usize,
    },
    /// A state vector or amplitude pair is not normalized.
    NotNormalized {
        /// The squared norm that was found.
        norm_sqr: f64,
    },
    /// A matrix fails a structural requirement (Hermiticity, trace, positivity).
    InvalidMatrix(String),
    /// A scalar parameter is outside its allowed range.
    InvalidParameter(String),
    /// A projector or state label is not part of the vocabulary.
    UnknownLabel(String),
    /// Input data to a reconstruction or fit is degenerate (e.g. all counts zero).
    DegenerateData(String),
    /// The likelihood optimizer exhausted its budget without meeting the
    /// convergence criterion. Carries the best iterate found so callers can
    /// still inspect it (`best_params` are triangular-factor parameters).
    NonConvergence {
        /// Objective value at the best iterate found.
        best_value: f64,
        /// Parameter vector of the best iterate.
        best_params: alloc::vec::Vec<f64>,
    },
    /// A correlation is undefined because every contributing count is zero.
    UndefinedCorrelation,
    /// Too many bootstrap resamples failed to evaluate.
    ResampleFailure {
        /// Number of resamples dropped.
        dropped: usize,
        /// Number of resamples requested.
        requested: usize,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::NotNormalized { norm_sqr } => {
                write!(f, "state not normalized: |ψ|² = {norm_sqr}")
            }
            Error::InvalidMatrix(msg) => write!(f, "invalid matrix: {msg}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::UnknownLabel(label) => write!(f, "unknown basis label: {label}"),
            Error::DegenerateData(msg) => write!(f, "degenerate data: {msg}"),
            Error::NonConvergence { best_value, .. } => {
                write!(
                    f,
                    "optimizer did not converge (best objective {best_value})"
                )
            }
            Error::UndefinedCorrelation => {
                write!(
                    f,
                    "correlation undefined: all four coincidence counts are zero"
                )
            }
            Error::ResampleFailure { dropped, requested } => {
                write!(f, "{dropped} of {requested} bootstrap resamples failed")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
