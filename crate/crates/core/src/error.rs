use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("expected {expected} components, found {found}")]
    ComponentMismatch { expected: usize, found: usize },
    #[error("phase overflow: r * |xi|_max = {0} exceeds 700")]
    PhaseOverflow(f64),
    #[error("density positivity lost: min(1 + a) = {0}")]
    DensityPositivity(f64),
    #[error("pressure iteration did not converge after {iters} iterations (residual {residual:e})")]
    PressureNonConvergence { iters: usize, residual: f64 },
    #[error("analyticity band exhausted: delta - lambda * theta = {0}")]
    BandExhausted(f64),
    #[error("slow variable not representable on the grid (interpolation error {0:e})")]
    NotRepresentable(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("empty time series")]
    EmptySeries,
    #[error("malformed data: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
