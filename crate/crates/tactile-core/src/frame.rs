use crate::error::{CoreError, Result};

/// Minimum sensor frame side length in pixels.
pub const MIN_FRAME_SIDE: u32 = 32;

/// Whether a frame still carries lens distortion or has been rectified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Distortion {
    Distorted,
    Rectified,
}

impl Distortion {
    pub fn as_str(self) -> &'static str {
        match self {
            Distortion::Distorted => "distorted",
            Distortion::Rectified => "rectified",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "distorted" => Some(Distortion::Distorted),
            "rectified" => Some(Distortion::Rectified),
            _ => None,
        }
    }
}

/// One RGB sensor image with a timestamp and a distortion state.
///
/// The pixel buffer is row-major RGB8, `width * height * 3` bytes.
/// Frames are immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TactileFrame {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
    timestamp: f64,
    distortion: Distortion,
}

impl TactileFrame {
    pub fn new(
        width: u32,
        height: u32,
        pixels: Vec<u8>,
        timestamp: f64,
        distortion: Distortion,
    ) -> Result<Self> {
        if width < MIN_FRAME_SIDE || height < MIN_FRAME_SIDE {
            return Err(CoreError::InvalidDimensions {
                width,
                height,
                min: MIN_FRAME_SIDE,
            });
        }
        let expected = width as usize * height as usize * 3;
        if pixels.len() != expected {
            return Err(CoreError::BufferSize {
                expected,
                actual: pixels.len(),
            });
        }
        if !timestamp.is_finite() || timestamp < 0.0 {
            return Err(CoreError::NonFinite("frame timestamp"));
        }
        Ok(Self {
            width,
            height,
            pixels,
            timestamp,
            distortion,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn timestamp(&self) -> f64 {
        self.timestamp
    }

    pub fn distortion(&self) -> Distortion {
        self.distortion
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    /// RGB triple at (x, y). Panics out of bounds.
    pub fn rgb(&self, x: u32, y: u32) -> [u8; 3] {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    /// Luminance proxy used by the block matcher: (r + 2g + b) / 4.
    pub fn gray(&self, x: u32, y: u32) -> u8 {
        let [r, g, b] = self.rgb(x, y);
        ((r as u16 + 2 * g as u16 + b as u16) / 4) as u8
    }

    /// Full grayscale plane with the same (r + 2g + b) / 4 weights.
    pub fn gray_plane(&self) -> Vec<u8> {
        self.pixels
            .chunks_exact(3)
            .map(|p| ((p[0] as u16 + 2 * p[1] as u16 + p[2] as u16) / 4) as u8)
            .collect()
    }

    pub fn same_shape(&self, other: &TactileFrame) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Copy of this frame with a new timestamp.
    pub fn with_timestamp(&self, timestamp: f64) -> Result<Self> {
        Self::new(
            self.width,
            self.height,
            self.pixels.clone(),
            timestamp,
            self.distortion,
        )
    }

    /// Copy with the distortion flag replaced; pixels untouched.
    pub fn with_distortion(&self, distortion: Distortion) -> Self {
        Self {
            distortion,
            ..self.clone()
        }
    }
}

/// Signed per-pixel difference of two frames, 3 channels in [-255, 255].
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceImage {
    width: u32,
    height: u32,
    values: Vec<i16>,
}

impl DifferenceImage {
    pub fn from_raw(width: u32, height: u32, values: Vec<i16>) -> Result<Self> {
        let expected = width as usize * height as usize * 3;
        if values.len() != expected {
            return Err(CoreError::BufferSize {
                expected,
                actual: values.len(),
            });
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn values(&self) -> &[i16] {
        &self.values
    }

    /// Signed RGB triple at (x, y).
    pub fn rgb(&self, x: u32, y: u32) -> [i16; 3] {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.values[i], self.values[i + 1], self.values[i + 2]]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }
}

/// Per-pixel signed subtraction `deformed - undeformed`.
pub fn difference_image(
    deformed: &TactileFrame,
    undeformed: &TactileFrame,
) -> Result<DifferenceImage> {
    if !deformed.same_shape(undeformed) {
        return Err(CoreError::DimensionMismatch {
            expected: format!("{}x{}", undeformed.width(), undeformed.height()),
            actual: format!("{}x{}", deformed.width(), deformed.height()),
        });
    }
    if deformed.distortion() != undeformed.distortion() {
        return Err(CoreError::DistortionMismatch);
    }
    let values = deformed
        .pixels()
        .iter()
        .zip(undeformed.pixels())
        .map(|(&d, &u)| d as i16 - u as i16)
        .collect();
    DifferenceImage::from_raw(deformed.width(), deformed.height(), values)
}

/// A single stream-validation failure: which frame broke which rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamViolation {
    pub index: usize,
    pub rule: &'static str,
}

impl std::fmt::Display for StreamViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "frame {}: {}", self.index, self.rule)
    }
}

/// Checks a frame sequence for monotone timestamps, constant dimensions and
/// constant distortion state. Collects all violations instead of failing on
/// the first.
pub fn validate_stream(frames: &[TactileFrame]) -> Vec<StreamViolation> {
    let mut violations = Vec::new();
    for (i, pair) in frames.windows(2).enumerate() {
        let (prev, cur) = (&pair[0], &pair[1]);
        let index = i + 1;
        if cur.timestamp() <= prev.timestamp() {
            violations.push(StreamViolation {
                index,
                rule: "timestamps must be strictly increasing",
            });
        }
        if !cur.same_shape(prev) {
            violations.push(StreamViolation {
                index,
                rule: "frame dimensions must be constant",
            });
        }
        if cur.distortion() != prev.distortion() {
            violations.push(StreamViolation {
                index,
                rule: "distortion state must be constant",
            });
        }
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(w: u32, h: u32, fill: u8, ts: f64) -> TactileFrame {
        TactileFrame::new(
            w,
            h,
            vec![fill; (w * h * 3) as usize],
            ts,
            Distortion::Rectified,
        )
        .unwrap()
    }

    #[test]
    fn diff_with_self_is_zero() {
        let f = frame(32, 32, 77, 0.0);
        let d = difference_image(&f, &f).unwrap();
        assert!(d.is_zero());
    }

    #[test]
    fn diff_arithmetic_is_signed() {
        let mut a = vec![0u8; 32 * 32 * 3];
        let mut b = vec![0u8; 32 * 32 * 3];
        let i = (10 * 32 + 10) * 3;
        a[i..i + 3].copy_from_slice(&[200, 100, 50]);
        b[i..i + 3].copy_from_slice(&[180, 110, 50]);
        let fa = TactileFrame::new(32, 32, a, 0.0, Distortion::Rectified).unwrap();
        let fb = TactileFrame::new(32, 32, b, 0.0, Distortion::Rectified).unwrap();
        let d = difference_image(&fa, &fb).unwrap();
        assert_eq!(d.rgb(10, 10), [20, -10, 0]);
    }

    #[test]
    fn diff_rejects_shape_and_state_mismatch() {
        let a = frame(32, 32, 0, 0.0);
        let b = frame(32, 48, 0, 0.0);
        assert!(matches!(
            difference_image(&a, &b),
            Err(CoreError::DimensionMismatch { .. })
        ));
        let c = frame(32, 32, 0, 0.0).with_distortion(Distortion::Distorted);
        assert!(matches!(
            difference_image(&a, &c),
            Err(CoreError::DistortionMismatch)
        ));
    }

    #[test]
    fn frame_invariants_enforced() {
        assert!(matches!(
            TactileFrame::new(16, 32, vec![0; 16 * 32 * 3], 0.0, Distortion::Rectified),
            Err(CoreError::InvalidDimensions { .. })
        ));
        assert!(matches!(
            TactileFrame::new(32, 32, vec![0; 7], 0.0, Distortion::Rectified),
            Err(CoreError::BufferSize { .. })
        ));
    }

    #[test]
    fn empty_stream_is_ok() {
        assert!(validate_stream(&[]).is_empty());
    }

    #[test]
    fn equal_timestamps_flagged_at_index_one() {
        let a = frame(32, 32, 0, 1.0);
        let b = frame(32, 32, 0, 1.0);
        let v = validate_stream(&[a, b]);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].index, 1);
        assert!(v[0].rule.contains("strictly increasing"));
    }

    #[test]
    fn dimension_and_state_changes_flagged() {
        let a = frame(32, 32, 0, 0.0);
        let b = frame(32, 48, 0, 1.0);
        let c = frame(32, 48, 0, 2.0).with_distortion(Distortion::Distorted);
        let v = validate_stream(&[a, b, c]);
        assert!(v
            .iter()
            .any(|x| x.index == 1 && x.rule.contains("dimensions")));
        assert!(v
            .iter()
            .any(|x| x.index == 2 && x.rule.contains("distortion")));
    }

    #[test]
    fn gray_weights() {
        let mut px = vec![0u8; 32 * 32 * 3];
        px[0] = 100; // r
        px[1] = 50; // g
        px[2] = 20; // b
        let f = TactileFrame::new(32, 32, px, 0.0, Distortion::Rectified).unwrap();
        assert_eq!(f.gray(0, 0), ((100 + 2 * 50 + 20) / 4) as u8);
        assert_eq!(f.gray_plane()[0], f.gray(0, 0));
    }
}
