use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid array configuration: {0}")]
    InvalidArray(String),

    #[error("invalid cluster: {0}")]
    InvalidCluster(String),

    #[error("cluster {cluster} has no {side} direction samples on the wavenumber lattice")]
    DegenerateCluster { cluster: usize, side: &'static str },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Dinkelbach bracket violated: {0}")]
    BracketViolation(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable tag used in CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArray(_) => "invalid_array",
            Error::InvalidCluster(_) => "invalid_cluster",
            Error::DegenerateCluster { .. } => "degenerate_cluster",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::BracketViolation(_) => "bracket_violation",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
