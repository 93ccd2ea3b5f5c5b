use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A Minkowski event lies outside the right Rindler wedge `Z > |T|`.
    #[error("event (T={t}, Z={z}) lies outside the right Rindler wedge")]
    OutsideWedge { t: f64, z: f64 },

    /// Input data that violates a structural invariant.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// An adaptive quadrature exhausted its budget before meeting its target.
    #[error("quadrature for {what} did not converge: estimate {estimate:e}, error {error:e} after {evaluations} evaluations")]
    Convergence {
        what: &'static str,
        estimate: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}
