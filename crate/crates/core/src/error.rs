use thiserror::Error;

/// Failures raised by the numerical layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {dim} unsupported (maximum {max})")]
    UnsupportedDimension { dim: usize, max: usize },

    #[error("matrix is singular or ill-conditioned (condition estimate {condition:e})")]
    Singular { condition: f64 },

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,

    #[error("operator is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("state is not normalized (trace {trace})")]
    NotNormalized { trace: f64 },

    #[error("trace {trace:e} too small to renormalize")]
    VanishingTrace { trace: f64 },

    #[error("non-finite state entries at step {step}")]
    NonFinite { step: usize },

    #[error("gain blow-up at step {step}: trace {trace:e} exceeds {limit:e}")]
    GainBlowUp { step: usize, trace: f64, limit: f64 },

    #[error("trajectory {trajectory} failed: {source}")]
    Trajectory {
        trajectory: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid subspace split: {0}")]
    InvalidSplit(String),

    #[error("jump operator {index} does not map the excited manifold into the ground manifold")]
    ChannelStructure { index: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
