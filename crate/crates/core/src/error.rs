use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A computed probability left the round-off window around [0, 1].
    #[error("internal consistency error: probability {value} outside [0, 1] ({context})")]
    Consistency { value: f64, context: &'static str },

    /// Adaptive quadrature ran out of refinements before meeting its tolerance.
    #[error(
        "quadrature did not converge: best estimate {best_estimate} with error estimate {error_estimate}"
    )]
    Convergence {
        best_estimate: f64,
        error_estimate: f64,
    },

    /// A simulation request exceeds a resource guard.
    #[error("resource guard: {0}")]
    Resource(String),

    /// A numerical scheme produced a non-finite state.
    #[error("numeric error: {0}")]
    Numeric(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
