use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("indenter support [{x0:.1}, {x1:.1}]x[{y0:.1}, {y1:.1}] exits frame bounds {w}x{h}")]
    IndenterOutOfFrame {
        x0: f32,
        x1: f32,
        y0: f32,
        y1: f32,
        w: u32,
        h: u32,
    },

    #[error("keyframe index {index} out of range (motion has {len} keyframes)")]
    KeyframeOutOfRange { index: usize, len: usize },

    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error(transparent)]
    Core(#[from] tactile_core::CoreError),
}

pub type Result<T> = std::result::Result<T, SimError>;
