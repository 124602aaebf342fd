use thiserror::Error;

/// Errors raised by the operators, constructions and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("scale {scale} is below the grid resolution limit {min} (2h)")]
    Resolution { scale: f64, min: f64 },

    #[error("resolution error: {0}")]
    CellResolution(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("size error: {0}")]
    Size(String),

    #[error("singular configuration: {0}")]
    Singularity(String),

    #[error("grid misalignment: {cells} cells is not divisible by 2^{depth}; use {suggested} cells")]
    Alignment {
        cells: usize,
        depth: u32,
        suggested: usize,
    },

    #[error("construction failure: {0}")]
    Construction(String),

    #[error("placement error: {0}")]
    Placement(String),

    #[error("support violation: {0}")]
    Support(String),

    #[error("empty set: {0}")]
    Empty(String),

    #[error("unknown battery spec '{0}'")]
    UnknownBattery(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
