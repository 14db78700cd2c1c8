use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical consistency violated: {0}")]
    NumericalConsistency(String),

    /// The requested closed form does not exist in this parameter regime.
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    /// The linear dynamics has a growing mode; `growth_rate` is the largest
    /// real part of the drift spectrum (s⁻¹).
    #[error("unstable evolution (growth rate {growth_rate:e}): {message}")]
    Instability { growth_rate: f64, message: String },

    #[error("quantum Fisher information undefined at unit purity with non-zero purity derivative")]
    SingularPurity,

    #[error("no information: Fisher information {0} is not positive")]
    NoInformation(f64),

    #[error("quadrature did not converge: estimate {estimate:e} with error {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("Fock truncation too small: tail population {tail:e} at dimension {dim}")]
    Truncation { tail: f64, dim: usize },

    #[error("step size too large: {0}")]
    StepSize(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn consistency(msg: impl Into<String>) -> Self {
        Error::NumericalConsistency(msg.into())
    }

    /// True for failures that stem from numerics rather than user input.
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::InvalidArgument(_) | Error::Config(_) | Error::Io(_))
    }
}
