use thiserror::Error;

/// Everything that can go wrong in this crate.
///
/// `InvalidParameter` marks bad caller input (rejected before any numerics
/// run); the other variants mark conditions detected during computation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A numerical invariant that should hold by construction was violated.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("{context}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wraps `self` with a note saying where it happened.
    pub fn with_context(self, context: impl Into<String>) -> Error {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// True when the root cause is bad caller input rather than a
    /// computation failure. Follows `Context` chains.
    pub fn is_invalid_input(&self) -> bool {
        match self {
            Error::InvalidParameter(_) => true,
            Error::Context { source, .. } => source.is_invalid_input(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
