//! Error type shared by all modules.

use thiserror::Error;

/// Errors surfaced by the sampling, spectrum and bound computations.
///
/// Scalar payloads are carried as `f64` regardless of the working precision so
/// the error type stays independent of the scalar parameter.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A requested moment integral does not converge for the given
    /// prefilter/weight pairing.
    #[error("moment integral diverges: {reason}")]
    DivergentMoment { reason: String },

    /// The periodized spectrum drops below the Riesz floor at the requested
    /// frequency, i.e. the sampling interval sits at or near a resonance.
    #[error("periodized spectrum below Riesz floor at xi={xi} (lambda={lambda}, value={value:e})")]
    ResonantInterval { lambda: f64, xi: f64, value: f64 },

    /// The signed spectral denominator vanishes: the shift-invariant-space
    /// interpolator has a pole at this frequency.
    #[error("signed spectral denominator vanishes at xi={xi} (lambda={lambda}, |value|={value:e})")]
    PoleDetected { lambda: f64, xi: f64, value: f64 },

    /// The imaginary residue of a nominally real inverse transform exceeded
    /// its tolerance, which indicates an inadequate frequency grid.
    #[error("imaginary residue {residue:e} exceeds tolerance {tol:e}")]
    SymmetryViolation { residue: f64, tol: f64 },

    /// The truncated reconstruction series cannot meet the requested tail
    /// budget with the supplied sample window.
    #[error("reconstruction tail estimate {estimate:e} exceeds budget {budget:e}")]
    TruncationBudgetExceeded { estimate: f64, budget: f64 },

    /// An operation specific to one prefilter family was invoked on another.
    #[error("operation requires the {expected} family, got {found}")]
    WrongFamily { expected: String, found: String },

    /// A constructor or operation received an out-of-contract argument.
    #[error("invalid parameter: {reason}")]
    InvalidParameter { reason: String },
}

/// Convenience alias used across the crate.
pub type Result<V> = std::result::Result<V, Error>;

impl Error {
    pub(crate) fn invalid(reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            reason: reason.into(),
        }
    }

    pub(crate) fn divergent(reason: impl Into<String>) -> Self {
        Error::DivergentMoment {
            reason: reason.into(),
        }
    }
}
