use thiserror::Error;

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("too few markers: found {found}, expected at least {required} (half of {expected})")]
    TooFewMarkers {
        found: usize,
        expected: usize,
        required: usize,
    },

    #[error(transparent)]
    Core(#[from] tactile_core::CoreError),
}

pub type Result<T> = std::result::Result<T, FlowError>;
