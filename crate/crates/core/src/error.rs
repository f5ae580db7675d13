use thiserror::Error;

use crate::specfun::EvalResult;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A precondition on the combination of arguments does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The adaptive quadrature ran out of subdivisions before meeting the
    /// requested tolerance. `best` carries the estimate reached so far.
    #[error("quadrature did not converge: achieved relative error {achieved:.3e}, requested {requested:.3e}")]
    Convergence {
        best: EvalResult,
        achieved: f64,
        requested: f64,
    },

    #[error("golden file: {0}")]
    Golden(String),
}

pub type Result<T> = std::result::Result<T, Error>;
