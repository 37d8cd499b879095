use alloc::string::String;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("model validity gate: {0}")]
    Validity(String),
    #[error("step size underflow at t = {t:e} (stiffness failure)")]
    Stiffness { t: f64 },
    #[error("norm drift {drift:e} exceeds the allowed {limit:e}")]
    NormDrift { drift: f64, limit: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
