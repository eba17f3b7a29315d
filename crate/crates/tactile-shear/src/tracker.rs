//! Stateful shear-field tracking. Three estimators share one state machine:
//!
//! * adjacent:  u_t = f(I_t, I_{t-1}) + u_{t-1}   (integrates, drifts)
//! * reference: u_t = f(I_t, I_0)                 (drift-free, misregisters
//!   when displacements are large)
//! * weighted:  omega * adjacent + (1 - omega) * reference, with omega a
//!   logistic function of the displacement statistic of u_{t-1}.

use tactile_core::{ShearConfig, ShearField, TactileFrame};
use tactile_flow::{flow, FlowEstimate};

use crate::error::{Result, ShearError};
use crate::stats::{displacement_stat_masked, field_magnitudes, fusion_weight, ShearStats};

/// Which approximation a tracker steps with by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackMode {
    Adjacent,
    Reference,
    Weighted,
}

impl TrackMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "adjacent" => Some(TrackMode::Adjacent),
            "reference" => Some(TrackMode::Reference),
            "weighted" => Some(TrackMode::Weighted),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TrackMode::Adjacent => "adjacent",
            TrackMode::Reference => "reference",
            TrackMode::Weighted => "weighted",
        }
    }
}

/// One tracker per sensor stream, stepped sequentially (single writer).
/// Snapshots of the last field are immutable values and safe to hand out.
#[derive(Debug, Clone)]
pub struct ShearTracker {
    config: ShearConfig,
    mode: TrackMode,
    reference: TactileFrame,
    previous: TactileFrame,
    accumulated: ShearField,
    /// Validity of the accumulated state, from the last step's flow masks.
    valid: Vec<bool>,
}

impl ShearTracker {
    /// Build a tracker anchored at an undeformed frame.
    pub fn new(config: ShearConfig, mode: TrackMode, undeformed: &TactileFrame) -> Result<Self> {
        config.validate()?;
        let grid = config.grid()?;
        let zero = ShearField::zero(grid, undeformed.width(), undeformed.height());
        let n = zero.cells();
        Ok(Self {
            config,
            mode,
            reference: undeformed.clone(),
            previous: undeformed.clone(),
            accumulated: zero,
            valid: vec![true; n],
        })
    }

    /// Drop all history: the given frame becomes both I_0 and I_{t-1}, the
    /// accumulated field becomes zero.
    pub fn reset(&mut self, undeformed: &TactileFrame) {
        let grid = self.accumulated.grid();
        self.accumulated = ShearField::zero(grid, undeformed.width(), undeformed.height());
        self.valid = vec![true; self.accumulated.cells()];
        self.reference = undeformed.clone();
        self.previous = undeformed.clone();
    }

    pub fn config(&self) -> &ShearConfig {
        &self.config
    }

    pub fn mode(&self) -> TrackMode {
        self.mode
    }

    /// Snapshot of the accumulated field.
    pub fn field(&self) -> &ShearField {
        &self.accumulated
    }

    pub fn valid_mask(&self) -> &[bool] {
        &self.valid
    }

    /// Approximation 1: integrate frame-to-frame flow.
    pub fn step_adjacent(&mut self, frame: &TactileFrame) -> Result<ShearField> {
        self.step_as(TrackMode::Adjacent, frame).map(|(f, _)| f)
    }

    /// Approximation 2: flow against the undeformed reference.
    pub fn step_reference(&mut self, frame: &TactileFrame) -> Result<ShearField> {
        self.step_as(TrackMode::Reference, frame).map(|(f, _)| f)
    }

    /// Weighted fusion of the two approximations.
    pub fn step_weighted(&mut self, frame: &TactileFrame) -> Result<(ShearField, ShearStats)> {
        self.step_as(TrackMode::Weighted, frame)
    }

    /// Step with the tracker's configured mode.
    pub fn step(&mut self, frame: &TactileFrame) -> Result<(ShearField, ShearStats)> {
        self.step_as(self.mode, frame)
    }

    fn step_as(&mut self, mode: TrackMode, frame: &TactileFrame) -> Result<(ShearField, ShearStats)> {
        // Time must not run backwards. Re-stepping the frame the tracker
        // already holds (equal timestamp) is the identity case and allowed;
        // strict monotonicity across a stream is validate_stream's job.
        if frame.timestamp() < self.previous.timestamp() {
            return Err(ShearError::NonMonotonicTimestamp {
                frame: frame.timestamp(),
                previous: self.previous.timestamp(),
            });
        }

        // d comes from the prior accumulated field, keeping omega causal.
        let d = displacement_stat_masked(&self.accumulated, Some(&self.valid))?;
        let omega = fusion_weight(d, &self.config);

        let (result, valid) = match mode {
            TrackMode::Adjacent => {
                let adj = flow(frame, &self.previous, &self.config)?;
                let a = zeroed_invalid(&adj);
                (a.add(&self.accumulated)?, adj.valid_mask)
            }
            TrackMode::Reference => {
                let ref_est = flow(frame, &self.reference, &self.config)?;
                (zeroed_invalid(&ref_est), ref_est.valid_mask)
            }
            TrackMode::Weighted => {
                let adj = flow(frame, &self.previous, &self.config)?;
                let ref_est = flow(frame, &self.reference, &self.config)?;
                let a = zeroed_invalid(&adj).add(&self.accumulated)?;
                let r = zeroed_invalid(&ref_est);
                let blended = a.blend(&r, omega)?;
                let both: Vec<bool> = adj
                    .valid_mask
                    .iter()
                    .zip(&ref_est.valid_mask)
                    .map(|(&x, &y)| x && y)
                    .collect();
                (blended, both)
            }
        };

        let (mean_magnitude, max_magnitude) = field_magnitudes(&result, Some(&valid));
        self.previous = frame.clone();
        self.accumulated = result.clone();
        self.valid = valid;

        Ok((
            result,
            ShearStats {
                d,
                omega,
                mean_magnitude,
                max_magnitude,
            },
        ))
    }
}

/// Flow field with untrusted cells zeroed: invalid cells contribute nothing
/// to integration or fusion.
fn zeroed_invalid(est: &FlowEstimate) -> ShearField {
    let grid = est.field.grid();
    let anchors = est.field.anchors().to_vec();
    let u_x = est
        .field
        .u_x()
        .iter()
        .zip(&est.valid_mask)
        .map(|(&v, &ok)| if ok { v } else { 0.0 })
        .collect();
    let u_y = est
        .field
        .u_y()
        .iter()
        .zip(&est.valid_mask)
        .map(|(&v, &ok)| if ok { v } else { 0.0 })
        .collect();
    ShearField::new(grid, anchors, u_x, u_y).expect("masked copy keeps shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use tactile_core::Distortion;

    fn textured_frame(ts: f64) -> TactileFrame {
        let (w, h) = (96u32, 96u32);
        let mut px = Vec::with_capacity((w * h * 3) as usize);
        for y in 0..h {
            for x in 0..w {
                let g = (((x * 31 + y * 17) ^ (x + y * y)) % 241) as u8;
                px.extend_from_slice(&[g, g, g]);
            }
        }
        TactileFrame::new(w, h, px, ts, Distortion::Rectified).unwrap()
    }

    fn small_config() -> ShearConfig {
        ShearConfig {
            grid_h: 3,
            grid_w: 3,
            window: 5,
            search: 3,
            ..Default::default()
        }
    }

    #[test]
    fn identical_frames_stay_at_zero_in_every_mode() {
        let f0 = textured_frame(0.0);
        for mode in [TrackMode::Adjacent, TrackMode::Reference, TrackMode::Weighted] {
            let mut tracker = ShearTracker::new(small_config(), mode, &f0).unwrap();
            for step in 1..=3 {
                let f = f0.with_timestamp(step as f64).unwrap();
                let (field, stats) = tracker.step(&f).unwrap();
                assert!(field.u_x().iter().all(|&v| v == 0.0), "{mode:?} step {step}");
                assert!(field.u_y().iter().all(|&v| v == 0.0));
                assert_eq!(stats.d, 0.0);
                assert_eq!(stats.max_magnitude, 0.0);
            }
        }
    }

    #[test]
    fn first_weighted_step_reports_fusion_weight_of_zero_stat() {
        let f0 = textured_frame(0.0);
        let cfg = small_config();
        let mut tracker = ShearTracker::new(cfg, TrackMode::Weighted, &f0).unwrap();
        let (_, stats) = tracker
            .step_weighted(&f0.with_timestamp(1.0).unwrap())
            .unwrap();
        assert_eq!(stats.d, 0.0);
        assert!((stats.omega - fusion_weight(0.0, &cfg)).abs() < 1e-15);
    }

    #[test]
    fn reset_discards_accumulation() {
        let f0 = textured_frame(0.0);
        let shifted = {
            // Crude 2 px horizontal roll of the texture.
            let (w, h) = (f0.width(), f0.height());
            let mut px = Vec::with_capacity((w * h * 3) as usize);
            for y in 0..h {
                for x in 0..w {
                    let sx = if x >= 2 { x - 2 } else { 0 };
                    px.extend_from_slice(&f0.rgb(sx, y));
                }
            }
            TactileFrame::new(w, h, px, 1.0, Distortion::Rectified).unwrap()
        };
        let mut tracker = ShearTracker::new(small_config(), TrackMode::Adjacent, &f0).unwrap();
        tracker.step_adjacent(&shifted).unwrap();
        assert!(tracker.field().u_x().iter().any(|&v| v != 0.0));

        tracker.reset(&shifted);
        assert!(tracker.field().u_x().iter().all(|&v| v == 0.0));
        let again = tracker
            .step_adjacent(&shifted.with_timestamp(2.0).unwrap())
            .unwrap();
        assert!(again.u_x().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn distortion_mismatch_propagates_from_flow() {
        let f0 = textured_frame(0.0);
        let mut tracker = ShearTracker::new(small_config(), TrackMode::Reference, &f0).unwrap();
        let distorted = textured_frame(1.0).with_distortion(Distortion::Distorted);
        assert!(matches!(
            tracker.step_reference(&distorted),
            Err(ShearError::Flow(_))
        ));
    }

    #[test]
    fn step_with_the_reset_frame_itself_is_identity() {
        let f0 = textured_frame(2.0);
        let mut tracker = ShearTracker::new(small_config(), TrackMode::Weighted, &f0).unwrap();
        let (field, _) = tracker.step(&f0).unwrap();
        assert!(field.u_x().iter().all(|&v| v == 0.0));
        assert!(field.u_y().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn non_monotonic_timestamps_rejected() {
        let f0 = textured_frame(5.0);
        let mut tracker = ShearTracker::new(small_config(), TrackMode::Adjacent, &f0).unwrap();
        let early = textured_frame(1.0);
        assert!(matches!(
            tracker.step_adjacent(&early),
            Err(ShearError::NonMonotonicTimestamp { .. })
        ));
    }
}
