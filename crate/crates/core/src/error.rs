use thiserror::Error;

/// Errors raised by map construction and the analyses.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("constraint `{name}` violated at block {index}: {detail}")]
    Constraint { name: String, index: usize, detail: String },

    #[error("derivative requested on region boundary |z| = {modulus:e}")]
    Boundary { modulus: f64 },

    #[error("argument tracker step underflow at radius exp({ln_radius})")]
    StepUnderflow { ln_radius: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("value not representable in the scalar type: {0}")]
    Representation(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
