//! Error type shared by every module in the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty scanpath")]
    EmptyScanpath,

    #[error("no saccades")]
    NoSaccades,

    #[error("empty dataset")]
    EmptyDataset,

    #[error("degenerate saliency map")]
    DegenerateSaliency,

    #[error("constant saliency map")]
    ConstantSaliency,

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("image {image_id}: {msg}")]
    OutOfBounds { image_id: String, msg: String },

    #[error("unknown image id {0:?}")]
    UnknownImageId(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Shorthand for shape errors.
    pub fn shape(expected: impl Into<String>, got: impl Into<String>) -> Self {
        Error::ShapeMismatch {
            expected: expected.into(),
            got: got.into(),
        }
    }

    /// True when the error indicates a numeric failure (NaN/Inf) rather than
    /// bad input. The CLI maps this to a dedicated exit code.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NonFinite(_))
    }
}
