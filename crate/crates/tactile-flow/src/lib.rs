//! Marker detection and grid-sampled optical flow between two sensor frames:
//! the function `f` the shear tracker is built on. Block matching with SAD
//! scoring and parabolic sub-pixel refinement over a fixed anchor lattice.

mod error;
mod markers;
mod matching;

pub use error::{FlowError, Result};
pub use markers::{detect_markers, otsu_threshold, MarkerSet};
pub use matching::{flow, flow_with_threads, FlowEstimate};
