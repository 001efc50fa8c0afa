use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown contour kind `{0}`")]
    UnknownKind(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("model mismatch: expected {expected}, got {got}")]
    ModelMismatch { expected: &'static str, got: &'static str },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("singular kernel at iteration {iteration}")]
    SingularKernel { iteration: usize },
    #[error("{contour}: no convergence after {iterations} iterations (residual {residual:.3e})")]
    NotConverged { contour: String, iterations: usize, residual: f64 },
    #[error("rate {0} outside [0, 1/2)")]
    RateOutOfDomain(f64),
    #[error("need at least {need} points, got {got}")]
    InsufficientPoints { need: usize, got: usize },
    #[error("scan produced no converged points")]
    EmptyScan,
    #[error("no root in bracket: {0}")]
    NoRoot(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("non-positive Green's function in fit window at tau = {0}")]
    NonPositive(f64),
    #[error("oracle: {0}")]
    Oracle(String),
    #[error("checkpoint {path}: {msg}")]
    Checkpoint { path: String, msg: String },
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
