use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the speckle toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("sample is empty")]
    EmptySample,

    #[error("sample contains a negative or non-finite value at index {index}")]
    InvalidValue { index: usize },

    #[error("sample is all zeros and cannot be RMS-normalized")]
    AllZero,

    #[error("sample has zero variance")]
    ZeroVariance,

    #[error("sample mean is zero")]
    ZeroMean,

    #[error("sample must be RMS-normalized before computing distances")]
    Unnormalized,

    #[error("sample too small: need at least {needed}, got {got}")]
    TooSmall { needed: usize, got: usize },

    #[error("evaluation grid is empty")]
    EmptyGrid,

    #[error("negative argument {0} outside the benchmark support")]
    NegativeArgument(f64),

    #[error("unknown distribution family `{0}` (valid: rayleigh, weibull, gamma, generalized_gamma, nakagami, k_dist, burr)")]
    UnknownFamily(String),

    #[error("fit for {0} did not converge")]
    NotConverged(&'static str),

    #[error("ROI {x0},{y0},{width}x{height} does not fit inside a {cols}x{rows} image")]
    RoiOutOfBounds {
        x0: usize,
        y0: usize,
        width: usize,
        height: usize,
        cols: usize,
        rows: usize,
    },

    #[error("corrupt image: {0}")]
    CorruptImage(String),

    #[error("image is not grayscale ({0})")]
    NotGrayscale(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("cannot parse {what}: {detail}")]
    Parse { what: String, detail: String },

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
