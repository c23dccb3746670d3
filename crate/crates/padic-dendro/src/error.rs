use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("descriptor mismatch: operands belong to different field descriptors")]
    DescriptorMismatch,

    #[error("indistinguishable at precision {precision}{}", labels.as_ref().map(|(a, b)| format!(" (records {a:?} and {b:?})")).unwrap_or_default())]
    Indistinguishable {
        precision: i64,
        labels: Option<(String, String)>,
    },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("division by zero in the residue field")]
    DivisionByZero,

    #[error("value is not in the image of the encoding: {0}")]
    NotInImage(String),

    #[error("non-discrete group: {0}")]
    NonDiscrete(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status used by the CLI for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_)
            | Error::Parse(_)
            | Error::Config(_)
            | Error::NotInImage(_)
            | Error::DescriptorMismatch
            | Error::DivisionByZero => 2,
            Error::Indistinguishable { .. } => 3,
            Error::Unsupported(_) => 4,
            Error::NonDiscrete(_) => 5,
            Error::Io(_) | Error::Json(_) => 1,
        }
    }
}
