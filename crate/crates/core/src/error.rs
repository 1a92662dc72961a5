use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate translation kernel at axis {axis} (x_i * t_i = 0); use the theta form instead")]
    DegenerateKernel { axis: usize },

    #[error("point lies at the singular origin of the kernel")]
    SingularOrigin,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("depth {requested} is beyond the stored prefix of {available} levels")]
    Depth { requested: usize, available: usize },

    #[error("infeasible discretization: {0}; refine the grid")]
    Infeasible(String),

    #[error("construction failed at level {level}: {reason}")]
    ConstructionFailed { level: usize, reason: String },

    #[error("invalid gauge: {0}")]
    InvalidGauge(String),

    #[error("stencil grid is too close to a coordinate hyperplane: {0}")]
    Margin(String),

    #[error("numerical divergence: {0}")]
    Divergence(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
