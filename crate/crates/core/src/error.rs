use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed image header: {0}")]
    MalformedHeader(String),
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("image data truncated: expected {expected} bytes, found {found}")]
    TruncatedData { expected: usize, found: usize },
    #[error("image contains no foreground pixels")]
    EmptyImage,
    #[error("expected a {expected_w}x{expected_h} image, got {width}x{height}")]
    WrongDimensions {
        expected_w: usize,
        expected_h: usize,
        width: usize,
        height: usize,
    },
    #[error("pixel ({row}, {col}) is not foreground")]
    NotForeground { row: usize, col: usize },
    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("training data contains a single class")]
    SingleClass,
    #[error("training data is empty")]
    EmptyData,
    #[error("feature dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("model contains no samples")]
    EmptyModel,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("corrupt model file: {0}")]
    CorruptModel(String),
    #[error("unsupported model version: {0}")]
    VersionMismatch(String),
    #[error("malformed feature file, line {line}: {msg}")]
    MalformedFeatureFile { line: usize, msg: String },

    #[error("too few samples: {0}")]
    TooFewSamples(String),
    #[error("label {0} is not one of the matrix classes")]
    UnknownLabel(u8),
    #[error("degenerate confusion matrix: class {0} has no true samples")]
    DegenerateMatrix(u8),
    #[error("confusion matrix is empty")]
    EmptyMatrix,

    #[error("class directory {0:?} is missing")]
    MissingClassDir(PathBuf),
    #[error("no images found under {0:?}")]
    NoImages(PathBuf),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
