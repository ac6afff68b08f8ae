use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum VpsError {
    /// An argument lies outside the domain on which the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A value lies outside the range of a monotone map being inverted.
    #[error("range error: {value} is outside [{lower}, {upper}]")]
    Range { value: f64, lower: f64, upper: f64 },

    /// Input violates a precondition of an Abel/Eddington inversion.
    #[error("non-invertible input: {0}")]
    NonInvertible(String),

    /// A density does not belong to the class the operation requires.
    #[error("invalid density: {0}")]
    InvalidDensity(String),

    /// Root bracketing failed.
    #[error("bracket failure: {0}")]
    Bracket(String),

    /// A linear solve hit a singular matrix.
    #[error("singular Jacobian at Newton iteration {iteration}")]
    SingularJacobian { iteration: usize },

    /// An iterative method did not converge.
    #[error("no convergence after {iterations} iterations (last step {last_step:e})")]
    NoConvergence { iterations: usize, last_step: f64 },
}

pub type Result<T> = std::result::Result<T, VpsError>;
