use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("energy level h = {0} is outside the oscillatory region (0, 2)")]
    EnergyOutOfRange(f64),

    #[error("schema violation at {field}: {message}")]
    Schema { field: String, message: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            message: message.into(),
        }
    }
}
