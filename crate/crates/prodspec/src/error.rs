use thiserror::Error;

/// Unified error type for the whole crate.
///
/// Numerical routines distinguish *domain* violations (caller passed
/// arguments outside the documented precondition) from *runtime* failures
/// (a series or quadrature that refused to converge, an ill-conditioned
/// linear solve, a root tracker losing its branch). Callers that drive
/// parameter sweeps typically treat the former as bugs and the latter as
/// data points to report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain: {0}")]
    Domain(String),

    #[error("pole encountered: {0}")]
    Pole(String),

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("contour geometry: {0}")]
    Geometry(String),

    #[error("ill-conditioned linear system: {0}")]
    IllConditioned(String),

    #[error("root tracking lost a branch: {0}")]
    RootTracking(String),

    #[error("invalid parameters: {0}")]
    Validation(String),

    #[error("coincident source eigenvalues: {0}")]
    CoincidentSource(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
