use crate::error::{CoreError, Result};

/// Dimensions of the shear sampling grid. The default mirrors the sensor's
/// 13-row by 18-column vector field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub grid_h: u32,
    pub grid_w: u32,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            grid_h: 13,
            grid_w: 18,
        }
    }
}

impl GridSpec {
    pub fn new(grid_h: u32, grid_w: u32) -> Result<Self> {
        if grid_h < 2 || grid_w < 2 {
            return Err(CoreError::InvalidConfig(format!(
                "grid {grid_h}x{grid_w}: both sides must be >= 2"
            )));
        }
        Ok(Self { grid_h, grid_w })
    }

    pub fn cells(&self) -> usize {
        self.grid_h as usize * self.grid_w as usize
    }

    /// Anchor lattice for a frame: uniform cells with half-cell margins,
    /// row-major. Every anchor is strictly inside the frame.
    pub fn anchors(&self, frame_w: u32, frame_h: u32) -> Vec<(f32, f32)> {
        let cw = frame_w as f32 / self.grid_w as f32;
        let ch = frame_h as f32 / self.grid_h as f32;
        let mut out = Vec::with_capacity(self.cells());
        for row in 0..self.grid_h {
            for col in 0..self.grid_w {
                out.push(((col as f32 + 0.5) * cw, (row as f32 + 0.5) * ch));
            }
        }
        out
    }
}

/// A grid of 2D displacement vectors in pixel space: the two channels `u_x`
/// and `u_y` plus the pixel position each vector was sampled at.
#[derive(Debug, Clone, PartialEq)]
pub struct ShearField {
    grid: GridSpec,
    anchors: Vec<(f32, f32)>,
    u_x: Vec<f32>,
    u_y: Vec<f32>,
}

impl ShearField {
    pub fn new(
        grid: GridSpec,
        anchors: Vec<(f32, f32)>,
        u_x: Vec<f32>,
        u_y: Vec<f32>,
    ) -> Result<Self> {
        let n = grid.cells();
        if anchors.len() != n || u_x.len() != n || u_y.len() != n {
            return Err(CoreError::DimensionMismatch {
                expected: format!("{n} cells"),
                actual: format!(
                    "{} anchors, {} u_x, {} u_y",
                    anchors.len(),
                    u_x.len(),
                    u_y.len()
                ),
            });
        }
        if anchors.iter().any(|a| !a.0.is_finite() || !a.1.is_finite()) {
            return Err(CoreError::NonFinite("shear field anchors"));
        }
        if u_x.iter().chain(u_y.iter()).any(|v| !v.is_finite()) {
            return Err(CoreError::NonFinite("shear field components"));
        }
        Ok(Self {
            grid,
            anchors,
            u_x,
            u_y,
        })
    }

    /// All-zero field on the uniform anchor lattice of a frame.
    pub fn zero(grid: GridSpec, frame_w: u32, frame_h: u32) -> Self {
        let anchors = grid.anchors(frame_w, frame_h);
        let n = anchors.len();
        Self {
            grid,
            anchors,
            u_x: vec![0.0; n],
            u_y: vec![0.0; n],
        }
    }

    /// Field sampled from a displacement function at the uniform lattice.
    pub fn from_fn(
        grid: GridSpec,
        frame_w: u32,
        frame_h: u32,
        mut f: impl FnMut(f32, f32) -> (f32, f32),
    ) -> Self {
        let anchors = grid.anchors(frame_w, frame_h);
        let mut u_x = Vec::with_capacity(anchors.len());
        let mut u_y = Vec::with_capacity(anchors.len());
        for &(ax, ay) in &anchors {
            let (ux, uy) = f(ax, ay);
            u_x.push(ux);
            u_y.push(uy);
        }
        Self {
            grid,
            anchors,
            u_x,
            u_y,
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn anchors(&self) -> &[(f32, f32)] {
        &self.anchors
    }

    pub fn u_x(&self) -> &[f32] {
        &self.u_x
    }

    pub fn u_y(&self) -> &[f32] {
        &self.u_y
    }

    pub fn cells(&self) -> usize {
        self.grid.cells()
    }

    pub fn cell(&self, row: u32, col: u32) -> (f32, f32) {
        let i = (row * self.grid.grid_w + col) as usize;
        (self.u_x[i], self.u_y[i])
    }

    pub fn magnitude(&self, idx: usize) -> f32 {
        self.u_x[idx].hypot(self.u_y[idx])
    }

    /// Cell-wise sum; both fields must share grid and anchors.
    pub fn add(&self, other: &ShearField) -> Result<ShearField> {
        self.check_compatible(other)?;
        let u_x = self
            .u_x
            .iter()
            .zip(&other.u_x)
            .map(|(a, b)| a + b)
            .collect();
        let u_y = self
            .u_y
            .iter()
            .zip(&other.u_y)
            .map(|(a, b)| a + b)
            .collect();
        ShearField::new(self.grid, self.anchors.clone(), u_x, u_y)
    }

    /// Cell-wise convex blend `w * self + (1 - w) * other`, clamped to the
    /// per-component interval so float rounding cannot escape it.
    pub fn blend(&self, other: &ShearField, w: f64) -> Result<ShearField> {
        self.check_compatible(other)?;
        let mix = |a: f32, b: f32| -> f32 {
            let v = (w * a as f64 + (1.0 - w) * b as f64) as f32;
            v.clamp(a.min(b), a.max(b))
        };
        let u_x = self
            .u_x
            .iter()
            .zip(&other.u_x)
            .map(|(&a, &b)| mix(a, b))
            .collect();
        let u_y = self
            .u_y
            .iter()
            .zip(&other.u_y)
            .map(|(&a, &b)| mix(a, b))
            .collect();
        ShearField::new(self.grid, self.anchors.clone(), u_x, u_y)
    }

    fn check_compatible(&self, other: &ShearField) -> Result<()> {
        if self.grid != other.grid {
            return Err(CoreError::DimensionMismatch {
                expected: format!("{}x{}", self.grid.grid_h, self.grid.grid_w),
                actual: format!("{}x{}", other.grid.grid_h, other.grid.grid_w),
            });
        }
        Ok(())
    }
}
