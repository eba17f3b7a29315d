use crate::error::{CoreError, Result};
use crate::field::GridSpec;

/// Tunable parameters of the shear estimation stack.
///
/// `k` and `m` shape the logistic fusion weight, `window` and `search` the
/// block matcher, `residual_ceiling_frac` the validity mask.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearConfig {
    pub grid_h: u32,
    pub grid_w: u32,
    /// Sigmoid steepness, 1/px. Must be positive.
    pub k: f64,
    /// Sigmoid midpoint, px.
    pub m: f64,
    /// Block-matching window radius, px (patch side = 2*window + 1).
    pub window: u32,
    /// Maximum search displacement, px.
    pub search: u32,
    /// Cell is masked invalid when its best SAD exceeds this fraction of the
    /// window's maximum possible SAD.
    pub residual_ceiling_frac: f32,
}

impl Default for ShearConfig {
    fn default() -> Self {
        Self {
            grid_h: 13,
            grid_w: 18,
            k: 50.0,
            m: 0.2,
            window: 12,
            search: 6,
            residual_ceiling_frac: 0.12,
        }
    }
}

impl ShearConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k <= 0.0 || !self.k.is_finite() {
            return Err(CoreError::InvalidConfig(format!(
                "k must be positive and finite, got {}",
                self.k
            )));
        }
        if self.m < 0.0 || !self.m.is_finite() {
            return Err(CoreError::InvalidConfig(format!(
                "m must be non-negative and finite, got {}",
                self.m
            )));
        }
        if self.grid_h < 2 || self.grid_w < 2 {
            return Err(CoreError::InvalidConfig(format!(
                "grid {}x{}: both sides must be >= 2",
                self.grid_h, self.grid_w
            )));
        }
        if self.search < 1 {
            return Err(CoreError::InvalidConfig("search must be >= 1".into()));
        }
        if self.window < 1 {
            return Err(CoreError::InvalidConfig("window must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.residual_ceiling_frac) {
            return Err(CoreError::InvalidConfig(format!(
                "residual ceiling fraction must be in [0, 1], got {}",
                self.residual_ceiling_frac
            )));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.grid_h, self.grid_w)
    }
}
