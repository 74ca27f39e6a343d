//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation at the singular point of a kernel.
    #[error("singular evaluation: {0}")]
    Singularity(String),

    #[error("integrand is not finite at x = {abscissa}")]
    NonFinite { abscissa: f64 },

    /// A documented precondition was not met by the caller.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Parameter sits on a pole of a rational map.
    #[error("pole: {0}")]
    Pole(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A limit or quadrature failed its convergence diagnostics.
    #[error("did not converge: {0}")]
    NonConvergent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergent(_) => 2,
            _ => 1,
        }
    }
}
