use thiserror::Error;

/// Errors reported by the library. Logical loss is not an error; see
/// [`crate::decoder::TrialOutcome`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{param} out of domain: {reason}")]
    Domain { param: &'static str, reason: String },
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("no crossing in scanned range (gap sign {gap_sign:+})")]
    NoCrossing { gap_sign: i8 },
    #[error("extrapolation invalid: {0}")]
    Extrapolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(param: &'static str, reason: impl Into<String>) -> Error {
    Error::Domain { param, reason: reason.into() }
}
