use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Nothing usable was detected: empty mask, empty cloud, or no valid
    /// depth near the skeleton center.
    #[error("no detection: {0}")]
    NoDetection(String),

    /// The geometry does not support the requested computation, e.g. all
    /// neighborhood points coincide.
    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("invalid depth at pixel ({u}, {v})")]
    InvalidDepth { u: f64, v: f64 },

    #[error("point is behind the camera (z = {z})")]
    BehindCamera { z: f64 },

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("missing predictions for {} manifest entries: {}", .0.len(), .0.join(", "))]
    MissingPredictions(Vec<String>),

    #[error("missing frame pair for {0}")]
    MissingPair(PathBuf),

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        Self::Json {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn image(path: impl Into<PathBuf>, source: image::ImageError) -> Self {
        Self::Image {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NoDetection(_) => "no-detection",
            Error::Degenerate(_) => "degenerate-geometry",
            Error::InvalidDepth { .. } => "invalid-depth",
            Error::BehindCamera { .. } => "behind-camera",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::InvalidInput(_) => "invalid-input",
            Error::MissingPredictions(_) => "missing-prediction",
            Error::MissingPair(_) => "missing-pair",
            Error::Image { .. } | Error::Io { .. } | Error::Json { .. } => "io",
        }
    }
}
