use thiserror::Error;

/// Errors shared by the spectral, norm and solver layers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("component count mismatch: expected {expected}, got {got}")]
    ComponentMismatch { expected: usize, got: usize },

    #[error("density positivity guard violated at t = {time}: min(1 + eps*b) = {min_density}")]
    PositivityGuard { time: f64, min_density: f64 },

    #[error("non-finite value detected at t = {time} in {context}")]
    NanDetected { time: f64, context: String },

    #[error("director magnitude {magnitude} below renormalization floor 0.5")]
    DirectorDegenerate { magnitude: f64 },

    #[error("trajectory invalid: {0}")]
    InvalidTrajectory(String),

    #[error("snapshot times differ by {diff}, above tolerance {tol}")]
    TimeMismatch { diff: f64, tol: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
