use crate::error::{Result, SimError};

/// Rigid object pressed into the gel. `sag` is the height of the indenter
/// surface above its deepest point; the membrane indentation at press depth
/// `p` is `max(0, p - sag)`, which is non-negative and compactly supported.
#[derive(Debug, Clone, PartialEq)]
pub enum IndenterShape {
    Sphere { radius_mm: f32 },
    /// Flat circular punch.
    Cylinder { radius_mm: f32 },
    /// Flat plus-shaped punch; `arm_len_mm` is the half-length of each arm.
    Cross { arm_len_mm: f32, arm_w_mm: f32 },
    /// Flat annular punch.
    Ring { outer_mm: f32, inner_mm: f32 },
    /// Flat punch shaped like a block letter rendered from a 7x7 bitmap.
    TextGlyph { glyph: char, size_mm: f32 },
}

impl IndenterShape {
    /// Shape height above its deepest point at lateral offset (dx, dy) mm
    /// from the indenter axis. Infinite outside the body.
    pub fn sag(&self, dx_mm: f32, dy_mm: f32) -> f32 {
        match *self {
            IndenterShape::Sphere { radius_mm: r } => {
                let d2 = dx_mm * dx_mm + dy_mm * dy_mm;
                if d2 <= r * r {
                    r - (r * r - d2).sqrt()
                } else {
                    f32::INFINITY
                }
            }
            IndenterShape::Cylinder { radius_mm: r } => {
                if dx_mm * dx_mm + dy_mm * dy_mm <= r * r {
                    0.0
                } else {
                    f32::INFINITY
                }
            }
            IndenterShape::Cross { arm_len_mm, arm_w_mm } => {
                let hw = arm_w_mm * 0.5;
                let in_h = dx_mm.abs() <= arm_len_mm && dy_mm.abs() <= hw;
                let in_v = dy_mm.abs() <= arm_len_mm && dx_mm.abs() <= hw;
                if in_h || in_v {
                    0.0
                } else {
                    f32::INFINITY
                }
            }
            IndenterShape::Ring { outer_mm, inner_mm } => {
                let d2 = dx_mm * dx_mm + dy_mm * dy_mm;
                if d2 <= outer_mm * outer_mm && d2 >= inner_mm * inner_mm {
                    0.0
                } else {
                    f32::INFINITY
                }
            }
            IndenterShape::TextGlyph { glyph, size_mm } => {
                let half = size_mm * 0.5;
                if dx_mm.abs() > half || dy_mm.abs() > half {
                    return f32::INFINITY;
                }
                let cell = size_mm / 7.0;
                let col = (((dx_mm + half) / cell) as usize).min(6);
                let row = (((dy_mm + half) / cell) as usize).min(6);
                if glyph_bitmap(glyph)[row] & (1 << (6 - col)) != 0 {
                    0.0
                } else {
                    f32::INFINITY
                }
            }
        }
    }

    /// Indentation depth (mm) at lateral offset (dx, dy) for press depth `p`.
    pub fn indentation(&self, dx_mm: f32, dy_mm: f32, press_mm: f32) -> f32 {
        let s = self.sag(dx_mm, dy_mm);
        if s.is_finite() {
            (press_mm - s).max(0.0)
        } else {
            0.0
        }
    }

    /// Radius in mm bounding the contact support at press depth `p`.
    pub fn support_radius(&self, press_mm: f32) -> f32 {
        if press_mm <= 0.0 {
            return 0.0;
        }
        match *self {
            IndenterShape::Sphere { radius_mm: r } => {
                let p = press_mm.min(r);
                (p * (2.0 * r - p)).sqrt()
            }
            IndenterShape::Cylinder { radius_mm } => radius_mm,
            IndenterShape::Cross { arm_len_mm, arm_w_mm } => {
                (arm_len_mm * arm_len_mm + 0.25 * arm_w_mm * arm_w_mm).sqrt()
            }
            IndenterShape::Ring { outer_mm, .. } => outer_mm,
            IndenterShape::TextGlyph { size_mm, .. } => size_mm * std::f32::consts::SQRT_2 * 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            IndenterShape::Sphere { radius_mm } | IndenterShape::Cylinder { radius_mm } => {
                radius_mm > 0.0
            }
            IndenterShape::Cross { arm_len_mm, arm_w_mm } => {
                arm_len_mm > 0.0 && arm_w_mm > 0.0 && arm_w_mm <= 2.0 * arm_len_mm
            }
            IndenterShape::Ring { outer_mm, inner_mm } => {
                outer_mm > 0.0 && inner_mm >= 0.0 && inner_mm < outer_mm
            }
            IndenterShape::TextGlyph { size_mm, .. } => size_mm > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(SimError::InvalidScene(format!("bad indenter {self:?}")))
        }
    }
}

/// 7x7 block-letter bitmaps, one u8 per row, MSB-first in bit 6..0.
fn glyph_bitmap(glyph: char) -> [u8; 7] {
    match glyph.to_ascii_uppercase() {
        'M' => [
            0b1100011, 0b1110111, 0b1111111, 0b1101011, 0b1100011, 0b1100011, 0b1100011,
        ],
        'T' => [
            0b1111111, 0b1111111, 0b0011100, 0b0011100, 0b0011100, 0b0011100, 0b0011100,
        ],
        'Y' => [
            0b1100011, 0b0110110, 0b0011100, 0b0011100, 0b0011100, 0b0011100, 0b0011100,
        ],
        'I' => [
            0b1111111, 0b0011100, 0b0011100, 0b0011100, 0b0011100, 0b0011100, 0b1111111,
        ],
        'L' => [
            0b1100000, 0b1100000, 0b1100000, 0b1100000, 0b1100000, 0b1111111, 0b1111111,
        ],
        'O' => [
            0b0111110, 0b1100011, 0b1100011, 0b1100011, 0b1100011, 0b1100011, 0b0111110,
        ],
        'H' => [
            0b1100011, 0b1100011, 0b1100011, 0b1111111, 0b1100011, 0b1100011, 0b1100011,
        ],
        _ => [
            0b1100011, 0b0110110, 0b0011100, 0b0011100, 0b0011100, 0b0110110, 0b1100011,
        ], // X
    }
}

/// One imposed sensor state: normal press depth, tangential shear of the
/// marker sheet, and the indenter axis position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Keyframe {
    pub press_mm: f32,
    pub shear_px: (f32, f32),
    pub center_px: (f32, f32),
}

impl Keyframe {
    pub fn rest(center_px: (f32, f32)) -> Self {
        Self {
            press_mm: 0.0,
            shear_px: (0.0, 0.0),
            center_px,
        }
    }
}

/// How the imposed shear decays across the gel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShearProfile {
    /// Whole marker sheet translates together.
    Rigid,
    /// Full shear inside the contact radius, cosine falloff to zero over an
    /// annulus of this width, pinned outside. No contact, no shear.
    Tapered { falloff_px: f32 },
    /// Pinned core, cosine ramp up to full shear outside: the incipient-slip
    /// pattern where the periphery moves first.
    Peripheral { core_px: f32, ramp_px: f32 },
    /// Keyframe shear modulated linearly with position:
    /// `u_x = sx * (1 + rel_grad_x * (x - cx))` and likewise for y. Zero
    /// shear keyframes stay undeformed.
    Linear { rel_grad_x: f32, rel_grad_y: f32 },
}

/// Complete description of a synthetic sensor scene.
#[derive(Debug, Clone, PartialEq)]
pub struct SimScene {
    pub name: String,
    pub width: u32,
    pub height: u32,
    /// Lateral scale between indenter millimeters and sensor pixels.
    pub px_per_mm: f32,
    pub marker_pitch: f32,
    pub marker_radius: f32,
    pub marker_color: [u8; 3],
    pub base_color: [u8; 3],
    /// Per-channel illumination gain against the membrane surface gradient:
    /// `shading_gain[c] = (gain_gx, gain_gy)` in intensity per (mm/px),
    /// echoing the sensor's directional LEDs.
    pub shading_gain: [[f32; 2]; 3],
    /// Additive Gaussian pixel noise, intensity units.
    pub noise_sigma: f32,
    /// Membrane smoothing radius in px, proportional to gel thickness.
    pub gel_blur_sigma: f32,
    pub indenter: IndenterShape,
    pub motion: Vec<Keyframe>,
    pub shear_profile: ShearProfile,
    /// Darkening of the contact core, 0 (none) to 1 (black): markers under a
    /// strongly shaded indenter become undetectable.
    pub occlusion_strength: f32,
    pub seed: u64,
}

impl Default for SimScene {
    fn default() -> Self {
        Self {
            name: "scene".into(),
            width: 320,
            height: 240,
            px_per_mm: 12.0,
            marker_pitch: 18.0,
            marker_radius: 3.0,
            marker_color: [28, 28, 32],
            base_color: [132, 136, 142],
            shading_gain: [[900.0, 0.0], [0.0, 900.0], [-640.0, -640.0]],
            noise_sigma: 2.0,
            gel_blur_sigma: 2.5,
            indenter: IndenterShape::Sphere { radius_mm: 4.0 },
            motion: vec![Keyframe::rest((160.0, 120.0))],
            shear_profile: ShearProfile::Tapered { falloff_px: 40.0 },
            occlusion_strength: 0.0,
            seed: 0,
        }
    }
}

impl SimScene {
    pub fn validate(&self) -> Result<()> {
        if self.marker_pitch <= 2.0 * self.marker_radius {
            return Err(SimError::InvalidScene(format!(
                "marker pitch {} must exceed twice the marker radius {}",
                self.marker_pitch, self.marker_radius
            )));
        }
        if self.px_per_mm <= 0.0 {
            return Err(SimError::InvalidScene("px_per_mm must be positive".into()));
        }
        if self.noise_sigma < 0.0 || self.gel_blur_sigma < 0.0 {
            return Err(SimError::InvalidScene(
                "noise and blur sigmas must be non-negative".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.occlusion_strength) {
            return Err(SimError::InvalidScene(
                "occlusion strength must be in [0, 1]".into(),
            ));
        }
        if self.motion.iter().any(|k| k.press_mm < 0.0) {
            return Err(SimError::InvalidScene(
                "keyframe press depth must be non-negative".into(),
            ));
        }
        self.indenter.validate()
    }

    /// Rest positions of the printed marker lattice: pitch-spaced, centered
    /// in the frame, margins of at least half a pitch.
    pub fn marker_rest_positions(&self) -> Vec<(f32, f32)> {
        lattice(self.width as f32, self.marker_pitch)
            .into_iter()
            .flat_map(|x| {
                lattice(self.height as f32, self.marker_pitch)
                    .into_iter()
                    .map(move |y| (x, y))
            })
            .collect()
    }

    /// Imposed marker displacement at a rest position for one keyframe.
    pub fn displacement_at(&self, x: f32, y: f32, kf: &Keyframe) -> (f32, f32) {
        let (sx, sy) = kf.shear_px;
        let w = match self.shear_profile {
            ShearProfile::Rigid => 1.0,
            ShearProfile::Tapered { falloff_px } => {
                let r0 = self.indenter.support_radius(kf.press_mm) * self.px_per_mm;
                if r0 <= 0.0 {
                    0.0
                } else {
                    let r = (x - kf.center_px.0).hypot(y - kf.center_px.1);
                    cosine_taper(r, r0, falloff_px)
                }
            }
            ShearProfile::Peripheral { core_px, ramp_px } => {
                let r = (x - kf.center_px.0).hypot(y - kf.center_px.1);
                1.0 - cosine_taper(r, core_px, ramp_px)
            }
            ShearProfile::Linear {
                rel_grad_x,
                rel_grad_y,
            } => {
                return (
                    sx * (1.0 + rel_grad_x * (x - kf.center_px.0)),
                    sy * (1.0 + rel_grad_y * (y - kf.center_px.1)),
                );
            }
        };
        (sx * w, sy * w)
    }

    pub fn keyframe(&self, index: usize) -> Result<&Keyframe> {
        self.motion.get(index).ok_or(SimError::KeyframeOutOfRange {
            index,
            len: self.motion.len(),
        })
    }
}

/// 1 for r <= r0, smooth cosine descent to 0 over [r0, r0 + width].
fn cosine_taper(r: f32, r0: f32, width: f32) -> f32 {
    if r <= r0 {
        1.0
    } else if width <= 0.0 || r >= r0 + width {
        0.0
    } else {
        0.5 * (1.0 + (std::f32::consts::PI * (r - r0) / width).cos())
    }
}

fn lattice(extent: f32, pitch: f32) -> Vec<f32> {
    let n = (extent / pitch).floor().max(1.0) as usize;
    let span = (n - 1) as f32 * pitch;
    let start = (extent - span) * 0.5;
    (0..n).map(|i| start + i as f32 * pitch).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_indentation_peaks_at_press_depth() {
        let s = IndenterShape::Sphere { radius_mm: 4.0 };
        assert_eq!(s.indentation(0.0, 0.0, 1.0), 1.0);
        assert_eq!(s.indentation(10.0, 0.0, 1.0), 0.0);
        let r = s.support_radius(1.0);
        assert!((r - (1.0f32 * 7.0).sqrt()).abs() < 1e-6);
        assert!(s.indentation(r * 0.99, 0.0, 1.0) > 0.0);
        assert_eq!(s.indentation(r * 1.01, 0.0, 1.0), 0.0);
    }

    #[test]
    fn flat_shapes_have_flat_indentation() {
        for shape in [
            IndenterShape::Cylinder { radius_mm: 3.0 },
            IndenterShape::Cross {
                arm_len_mm: 3.0,
                arm_w_mm: 1.0,
            },
            IndenterShape::Ring {
                outer_mm: 3.0,
                inner_mm: 2.0,
            },
            IndenterShape::TextGlyph {
                glyph: 'M',
                size_mm: 5.0,
            },
        ] {
            assert_eq!(shape.indentation(0.25, 0.1, 0.5), {
                if shape.sag(0.25, 0.1).is_finite() {
                    0.5
                } else {
                    0.0
                }
            });
        }
    }

    #[test]
    fn ring_has_hole() {
        let ring = IndenterShape::Ring {
            outer_mm: 3.0,
            inner_mm: 2.0,
        };
        assert_eq!(ring.indentation(0.0, 0.0, 1.0), 0.0);
        assert_eq!(ring.indentation(2.5, 0.0, 1.0), 1.0);
    }

    #[test]
    fn pitch_must_exceed_marker_diameter() {
        let scene = SimScene {
            marker_pitch: 5.0,
            marker_radius: 3.0,
            ..Default::default()
        };
        assert!(scene.validate().is_err());
    }

    #[test]
    fn lattice_is_centered_with_margins() {
        let xs = lattice(320.0, 18.0);
        assert_eq!(xs.len(), 17);
        let margin = xs[0];
        assert!((margin - (320.0 - xs[xs.len() - 1])).abs() < 1e-3);
        assert!(margin >= 9.0);
    }

    #[test]
    fn taper_profiles() {
        assert_eq!(cosine_taper(0.0, 10.0, 5.0), 1.0);
        assert_eq!(cosine_taper(15.0, 10.0, 5.0), 0.0);
        let mid = cosine_taper(12.5, 10.0, 5.0);
        assert!((mid - 0.5).abs() < 1e-6);
    }

    #[test]
    fn rigid_profile_ignores_press() {
        let scene = SimScene {
            shear_profile: ShearProfile::Rigid,
            ..Default::default()
        };
        let kf = Keyframe {
            press_mm: 0.0,
            shear_px: (3.0, 2.0),
            center_px: (160.0, 120.0),
        };
        assert_eq!(scene.displacement_at(5.0, 5.0, &kf), (3.0, 2.0));
    }

    #[test]
    fn tapered_profile_needs_contact() {
        let scene = SimScene::default();
        let kf = Keyframe {
            press_mm: 0.0,
            shear_px: (3.0, 2.0),
            center_px: (160.0, 120.0),
        };
        assert_eq!(scene.displacement_at(160.0, 120.0, &kf), (0.0, 0.0));
        let kf = Keyframe {
            press_mm: 1.0,
            ..kf
        };
        assert_eq!(scene.displacement_at(160.0, 120.0, &kf), (3.0, 2.0));
    }
}
