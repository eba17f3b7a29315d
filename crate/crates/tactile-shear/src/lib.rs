//! Stateful shear-field tracking on top of the block-matching flow: the
//! time-adjacent and undeformed-reference approximations, their logistic
//! weighted fusion, displacement statistics, slip scoring and trajectory
//! phase detection.

mod error;
mod phases;
mod slip;
mod stats;
mod tracker;

pub use error::{Result, ShearError};
pub use phases::{detect_phases, PhaseSplit, PhaseThresholds};
pub use slip::slip_score;
pub use stats::{
    displacement_stat, displacement_stat_masked, field_magnitudes, fusion_weight, ShearStats,
};
pub use tracker::{ShearTracker, TrackMode};
