use std::path::PathBuf;

/// Errors produced by this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("unsupported maxval {0} (only 255 is accepted)")]
    UnsupportedMaxval(u32),
    #[error("malformed image data: {0}")]
    Malformed(String),
    #[error("image is {width}x{height}; both sides must be at least 3")]
    TooSmall { width: usize, height: usize },
    #[error("window size {0} must be odd and at least 3")]
    InvalidWindow(usize),
    #[error("dimension mismatch: image is {image:?}, statistics are {stats:?}")]
    DimensionMismatch {
        image: (usize, usize),
        stats: (usize, usize),
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("sample too small: {0} values, need at least 2")]
    SampleTooSmall(usize),
    #[error("unknown algorithm {0:?}")]
    UnknownAlgorithm(String),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
