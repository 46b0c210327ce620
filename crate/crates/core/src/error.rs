use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("grid/group mismatch: {0}")]
    GridGroupMismatch(String),

    #[error("degree undefined on this circle: |u| = {modulus:.3e} < {min_modulus}")]
    DegreeUndefined { modulus: f64, min_modulus: f64 },

    #[error("undersampled trace: phase jump {jump:.3} exceeds pi/2")]
    UndersampledTrace { jump: f64 },

    #[error("degree not stabilized - increase R (windings {0:?})")]
    DegreeNotStabilized(Vec<i64>),

    #[error("radius {radius} out of range (domain radius {domain})")]
    RadiusOutOfRange { radius: f64, domain: f64 },

    #[error("class mismatch: {0}")]
    ClassMismatch(String),

    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        /// Best iterate reached, flattened in the solver's own layout.
        best: Vec<f64>,
    },

    #[error("line search failed at iteration {iteration} (gradient norm {gradient_norm:.3e})")]
    LineSearch {
        iteration: usize,
        gradient_norm: f64,
        best: Vec<f64>,
    },

    #[error("continuation failed at delta = {delta}: {source}")]
    Continuation {
        delta: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// True for failures of an iterative solver (as opposed to bad input).
    pub fn is_solver_failure(&self) -> bool {
        match self {
            Error::NoConvergence { .. } | Error::LineSearch { .. } => true,
            Error::Continuation { source, .. } => source.is_solver_failure(),
            _ => false,
        }
    }
}
