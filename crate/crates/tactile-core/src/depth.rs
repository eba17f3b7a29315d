use crate::error::{CoreError, Result};

/// Per-pixel contact depth in millimeters, always in the rectified frame.
/// Zero means no contact.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    width: u32,
    height: u32,
    depth: Vec<f32>,
}

impl DepthMap {
    pub fn new(width: u32, height: u32, depth: Vec<f32>) -> Result<Self> {
        let expected = width as usize * height as usize;
        if depth.len() != expected {
            return Err(CoreError::BufferSize {
                expected,
                actual: depth.len(),
            });
        }
        if depth.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::NonFinite("depth map"));
        }
        if depth.iter().any(|&v| v < 0.0) {
            return Err(CoreError::InvalidConfig(
                "depth map contains negative depths".into(),
            ));
        }
        Ok(Self {
            width,
            height,
            depth,
        })
    }

    pub fn zero(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            depth: vec![0.0; width as usize * height as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn values(&self) -> &[f32] {
        &self.depth
    }

    pub fn at(&self, x: u32, y: u32) -> f32 {
        self.depth[y as usize * self.width as usize + x as usize]
    }

    pub fn max_depth(&self) -> f32 {
        self.depth.iter().cloned().fold(0.0, f32::max)
    }

    /// Pixels with any contact at all (depth > 0).
    pub fn support_mask(&self) -> Vec<bool> {
        self.depth.iter().map(|&v| v > 0.0).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_negative_and_non_finite() {
        assert!(DepthMap::new(2, 2, vec![0.0, 1.0, -0.5, 0.0]).is_err());
        assert!(DepthMap::new(2, 2, vec![0.0, f32::INFINITY, 0.0, 0.0]).is_err());
        assert!(DepthMap::new(2, 2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn support_tracks_positive_depth() {
        let d = DepthMap::new(2, 2, vec![0.0, 0.25, 0.0, 1.0]).unwrap();
        assert_eq!(d.support_mask(), vec![false, true, false, true]);
        assert_eq!(d.max_depth(), 1.0);
    }
}
