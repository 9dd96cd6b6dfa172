use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the region where the routine is defined or
    /// where its accuracy contract holds.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested law or quantity has no implemented formula, or the
    /// formula's parameter constraint fails.
    #[error("capability error: {0}")]
    Capability(String),

    /// The combination of arguments is not a valid request.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("quadrature did not converge: last estimate {last}, previous {previous}")]
    Convergence { last: f64, previous: f64 },

    #[error("series did not converge after {terms} terms (partial sum {partial})")]
    Series { terms: usize, partial: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn capability(msg: impl Into<String>) -> Self {
        Error::Capability(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}
