use thiserror::Error;

/// Errors shared across the tactile stack.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("dimension mismatch: {expected} vs {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("distortion state mismatch: one frame is rectified, the other is not")]
    DistortionMismatch,

    #[error("invalid frame dimensions {width}x{height}: both sides must be >= {min}")]
    InvalidDimensions { width: u32, height: u32, min: u32 },

    #[error("pixel buffer holds {actual} bytes, expected {expected}")]
    BufferSize { expected: usize, actual: usize },

    #[error("invalid shear config: {0}")]
    InvalidConfig(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: bad {format} data: {detail}")]
    Format {
        path: String,
        format: &'static str,
        detail: String,
    },
}

impl CoreError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CoreError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(path: impl Into<String>, format: &'static str, detail: impl Into<String>) -> Self {
        CoreError::Format {
            path: path.into(),
            format,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
