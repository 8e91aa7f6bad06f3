use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An input violates a documented precondition (normalization, orthogonality, ...).
    #[error("contract violated: {0}")]
    Contract(String),

    /// An iterative solver exhausted its budget.
    #[error("no convergence after {matvecs} matrix applications (best residual {best_residual:.3e})")]
    Convergence { matvecs: usize, best_residual: f64 },

    /// The request exceeds what the dense code paths support.
    #[error("capability exceeded: {0}")]
    Capability(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn capability(msg: impl Into<String>) -> Self {
        Error::Capability(msg.into())
    }
}
