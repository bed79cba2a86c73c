//! Error taxonomy shared by the library, the binary, and the examples.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in this crate.
///
/// Variants are grouped by how the CLI maps them to exit codes: validation
/// problems (bad arguments, unsupported requests, ill-posed boundary data)
/// exit with code 2, runtime failures (non-convergence, stalls, numerical
/// breakdown, I/O) with code 1.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument is out of range or inconsistent.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested operation is defined, but not for these parameters.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Boundary data for the planar minimizer lies in the degenerate family
    /// for which the kinetic form loses control of the minimizing sequence.
    #[error("ill-posed boundary data: {0}")]
    IllPosedBoundaryData(String),

    /// A nonlinear solve ran out of iterations before reaching tolerance.
    #[error(
        "solver failed to converge: residual {final_residual:.3e} after {iterations} iterations (tol {tol:.1e})"
    )]
    SolverFailure {
        final_residual: f64,
        iterations: usize,
        tol: f64,
    },

    /// Continuation could not pass some t even at the minimum step size.
    /// `reached_t` is the last parameter value with a converged solution.
    #[error("continuation stalled at t = {stalled_at:.6} (last converged t = {reached_t:.6})")]
    ContinuationStalled { reached_t: f64, stalled_at: f64 },

    /// A line search or flow step shrank below its floor without progress.
    #[error("step size failure: {0}")]
    StepSizeFailure(String),

    /// Non-finite values or a vanishing pivot appeared mid-computation.
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    /// Filesystem trouble while persisting or loading artifacts.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed JSON in a config file or report.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code the CLI uses for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::Unsupported(_) | Error::IllPosedBoundaryData(_) => {
                2
            }
            _ => 1,
        }
    }
}
