//! Shared domain types for the tactile perception stack: sensor frames,
//! shear fields, depth maps, difference images, configuration, and the
//! on-disk formats every other crate speaks.
//!
//! All types are immutable values after construction and safe to share
//! across threads.

mod config;
pub mod dataset;
mod depth;
mod error;
mod field;
mod frame;
pub mod io;

pub use config::ShearConfig;
pub use depth::DepthMap;
pub use error::{CoreError, Result};
pub use field::{GridSpec, ShearField};
pub use frame::{
    difference_image, validate_stream, DifferenceImage, Distortion, StreamViolation, TactileFrame,
    MIN_FRAME_SIDE,
};
