use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("singular system: zero pivot at row {row}")]
    Singular { row: usize },

    #[error("non-finite matrix entry at {0}")]
    NonFinite(String),

    #[error("meshes are not nested: {coarse} cells vs {fine} cells")]
    NonNested { coarse: usize, fine: usize },

    #[error("pole of the symbol at zeta = 1")]
    Pole,

    #[error("contour quadrature did not converge: drift {drift:.3e} exceeds {tol:.1e}")]
    QuadratureDrift { drift: f64, tol: f64 },

    #[error("degenerate regression: {0}")]
    DegenerateRegression(String),

    #[error("unknown benchmark condition {0:?}")]
    UnknownCondition(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
