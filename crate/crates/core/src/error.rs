use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates its documented precondition.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A point outside the domain of a coordinate chart.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested energy cannot be reached at the given section point.
    #[error("energy {energy} unreachable on section at (jx, jy) = ({jx}, {jy})")]
    EnergyUnreachable { energy: f64, jx: f64, jy: f64 },

    /// Adaptive step size collapsed; carries the last accepted state.
    #[error("integration failed at t = {t}: {reason}")]
    IntegrationFailure { t: f64, state: [f64; 4], reason: String },

    /// Truncated boson space too small for the requested state or dynamics.
    #[error("boson cutoff too small: {reason} (try n_max >= {required})")]
    CutoffTooSmall { required: usize, reason: String },

    #[error("hilbert space dimension {dim} exceeds the configured maximum {max}")]
    DimensionOverflow { dim: usize, max: usize },

    /// An iterative solver did not reach its tolerance.
    #[error("{solver} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { solver: &'static str, iterations: usize, residual: f64 },

    /// Norm drift during propagation beyond tolerance.
    #[error("norm drifted by {drift:e} during propagation; increase n_max or reduce the step")]
    NormLoss { drift: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
