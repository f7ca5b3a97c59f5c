//! Error type shared by every operation in the crate.
//!
//! Variants that reject an input carry the measured deviation alongside the
//! tolerance that was violated, so callers can log *how far* an input was
//! from acceptable rather than just that it was rejected.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// `‖M − M†‖_F` exceeded the hermiticity tolerance.
    #[error("matrix is not Hermitian: deviation {deviation:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    /// An eigenvalue fell below the negativity clip window.
    #[error("matrix is not positive semidefinite: eigenvalue {min_eigenvalue:.3e} below -{tolerance:.3e}")]
    NotPsd { min_eigenvalue: f64, tolerance: f64 },

    /// Trace differed from 1 by more than the tolerance.
    #[error("trace {trace:.12} deviates from 1 by {deviation:.3e} (tolerance {tolerance:.3e})")]
    BadTrace { trace: f64, deviation: f64, tolerance: f64 },

    /// An iteration failed to reach its target residual within its budget.
    #[error("{context}: no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { context: &'static str, iterations: usize, residual: f64 },

    /// Operand shapes are incompatible for the requested operation.
    #[error("dimension mismatch: {detail}")]
    DimensionMismatch { detail: String },

    /// The environment dimension cannot hold a purification of the state.
    #[error("environment dimension {dim_e} is smaller than the state rank {rank}")]
    EnvTooSmall { dim_e: usize, rank: usize },

    /// A requested rank lies outside the admissible range.
    #[error("rank {rank} outside valid range 1..={max}")]
    BadRank { rank: usize, max: usize },

    /// `Σ K†K` differed from the identity by more than the tolerance.
    #[error("Kraus family is not trace preserving: ‖ΣK†K − I‖_F = {deviation:.3e} (tolerance {tolerance:.3e})")]
    NotTracePreserving { deviation: f64, tolerance: f64 },

    /// More Kraus operators than the dilation environment can index.
    #[error("{count} Kraus operators exceed the environment capacity {max}")]
    TooManyKraus { count: usize, max: usize },

    /// Completing an isometry to a unitary failed to stay orthonormal.
    #[error("unitary completion failed: orthonormality residual {residual:.3e}")]
    CompletionFailure { residual: f64 },

    /// Two vector pairs do not share a Gram entry, so no unitary maps one to the other.
    #[error("Gram entries differ: |{left_re}+{left_im}i − ({right_re}+{right_im}i)| exceeds {tolerance:.3e}")]
    GramMismatch { left_re: f64, left_im: f64, right_re: f64, right_im: f64, tolerance: f64 },

    /// A probability vector was negative or did not sum to 1.
    #[error("bad probability distribution: {detail}")]
    BadDistribution { detail: String },

    /// A vector norm deviated from 1 beyond the tolerance.
    #[error("vector is not normalized: norm deviates by {deviation:.3e} (tolerance {tolerance:.3e})")]
    NotNormalized { deviation: f64, tolerance: f64 },

    /// A scalar left its mathematically guaranteed range by more than rounding allows.
    #[error("{quantity} = {value:.17} escapes its valid range by more than {tolerance:.3e}")]
    OutOfRange { quantity: &'static str, value: f64, tolerance: f64 },
}

impl Error {
    /// Shorthand for a [`Error::DimensionMismatch`] with a formatted detail string.
    pub(crate) fn dims(detail: impl Into<String>) -> Self {
        Error::DimensionMismatch { detail: detail.into() }
    }
}
