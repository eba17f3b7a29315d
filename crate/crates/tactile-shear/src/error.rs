use thiserror::Error;

#[derive(Debug, Error)]
pub enum ShearError {
    #[error("degenerate field: {0}")]
    DegenerateField(&'static str),

    #[error("frame timestamp {frame} must exceed the previous timestamp {previous}")]
    NonMonotonicTimestamp { frame: f64, previous: f64 },

    #[error(transparent)]
    Flow(#[from] tactile_flow::FlowError),

    #[error(transparent)]
    Core(#[from] tactile_core::CoreError),
}

pub type Result<T> = std::result::Result<T, ShearError>;
