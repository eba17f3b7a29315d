//! Synthetic gel-sensor simulator: renders marker-dotted gel frames under
//! imposed indentation and shear, emitting exact ground-truth flow fields,
//! depth maps and contact masks. The test oracle for every estimator in the
//! stack — controllable and analytically known rather than physically
//! faithful.

mod dataset;
mod error;
mod render;
mod scene;

pub use dataset::{generate_dataset, DatasetScene, SampleRanges, SceneRole};
pub use error::{Result, SimError};
pub use render::{
    render_frame, render_sequence, translate_frame, RenderOutput, SimMarker, FRAME_DT,
    VISIBILITY_CONTRAST,
};
pub use scene::{IndenterShape, Keyframe, ShearProfile, SimScene};
