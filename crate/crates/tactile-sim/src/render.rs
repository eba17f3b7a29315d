use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tactile_core::{DepthMap, Distortion, GridSpec, ShearField, TactileFrame};

use crate::error::{Result, SimError};
use crate::scene::{Keyframe, SimScene};

/// Seconds between consecutive keyframes in rendered streams.
pub const FRAME_DT: f64 = 1.0 / 30.0;

/// Contrast (intensity units) below which a marker counts as occluded.
pub const VISIBILITY_CONTRAST: f32 = 25.0;

/// One rendered marker: where it was printed, where the imposed shear moved
/// it, and whether it is still distinguishable from the shaded background.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimMarker {
    pub rest: (f32, f32),
    pub displaced: (f32, f32),
    pub visible: bool,
}

/// Everything the simulator knows about one keyframe: the sensor image plus
/// the exact ground truth the estimators are tested against.
#[derive(Debug, Clone)]
pub struct RenderOutput {
    pub frame: TactileFrame,
    pub depth: DepthMap,
    /// Imposed displacement field sampled at the grid anchors.
    pub truth: ShearField,
    /// Pixels where the membrane is displaced (depth > 0), row-major.
    pub contact_mask: Vec<bool>,
    pub markers: Vec<SimMarker>,
}

/// Render one keyframe of a scene. Deterministic for a fixed scene seed and
/// keyframe index.
pub fn render_frame(scene: &SimScene, index: usize, grid: GridSpec) -> Result<RenderOutput> {
    scene.validate()?;
    let kf = *scene.keyframe(index)?;
    let (w, h) = (scene.width as usize, scene.height as usize);

    check_in_frame(scene, &kf)?;

    let depth = membrane_depth(scene, &kf);
    let contact_mask: Vec<bool> = depth.iter().map(|&d| d > 0.0).collect();

    // Directional shading against the membrane gradient.
    let mut canvas = vec![0f32; w * h * 3];
    for y in 0..h {
        for x in 0..w {
            let (gx, gy) = gradient(&depth, w, h, x, y);
            let i = (y * w + x) * 3;
            for c in 0..3 {
                canvas[i + c] = scene.base_color[c] as f32
                    + scene.shading_gain[c][0] * gx
                    + scene.shading_gain[c][1] * gy;
            }
        }
    }

    // Markers move with the imposed shear; the membrane shading does not.
    let mut markers = Vec::new();
    for (rx, ry) in scene.marker_rest_positions() {
        let (ux, uy) = scene.displacement_at(rx, ry, &kf);
        let (dx, dy) = (rx + ux, ry + uy);
        let visible = marker_visible(scene, &kf, dx, dy, &canvas, w, h);
        draw_disk(&mut canvas, w, h, dx, dy, scene.marker_radius, scene.marker_color);
        markers.push(SimMarker {
            rest: (rx, ry),
            displaced: (dx, dy),
            visible,
        });
    }

    // Optically dark indenter core occludes whatever lies under it.
    if scene.occlusion_strength > 0.0 {
        let ppm = scene.px_per_mm;
        for y in 0..h {
            for x in 0..w {
                let dxm = (x as f32 - kf.center_px.0) / ppm;
                let dym = (y as f32 - kf.center_px.1) / ppm;
                if scene.indenter.indentation(dxm, dym, kf.press_mm) > 0.0 {
                    let f = 1.0 - scene.occlusion_strength;
                    let i = (y * w + x) * 3;
                    for c in 0..3 {
                        canvas[i + c] *= f;
                    }
                }
            }
        }
    }

    let mut rng = noise_rng(scene.seed, index);
    let mut pixels = Vec::with_capacity(w * h * 3);
    if scene.noise_sigma > 0.0 {
        for &v in &canvas {
            let n = normal_sample(&mut rng) * scene.noise_sigma;
            pixels.push((v + n).round().clamp(0.0, 255.0) as u8);
        }
    } else {
        pixels.extend(canvas.iter().map(|&v| v.round().clamp(0.0, 255.0) as u8));
    }

    let frame = TactileFrame::new(
        scene.width,
        scene.height,
        pixels,
        index as f64 * FRAME_DT,
        Distortion::Rectified,
    )?;
    let truth = ShearField::from_fn(grid, scene.width, scene.height, |x, y| {
        scene.displacement_at(x, y, &kf)
    });
    let depth_map = DepthMap::new(scene.width, scene.height, depth)?;

    Ok(RenderOutput {
        frame,
        depth: depth_map,
        truth,
        contact_mask,
        markers,
    })
}

/// Render the whole motion list as a frame stream.
pub fn render_sequence(scene: &SimScene, grid: GridSpec) -> Result<Vec<RenderOutput>> {
    (0..scene.motion.len())
        .map(|i| render_frame(scene, i, grid))
        .collect()
}

/// Rigid integer-pixel translation of a frame with clamped edges; the
/// timestamp and distortion state are preserved.
pub fn translate_frame(frame: &TactileFrame, dx: i32, dy: i32) -> TactileFrame {
    let (w, h) = (frame.width() as i32, frame.height() as i32);
    let mut pixels = Vec::with_capacity((w * h * 3) as usize);
    for y in 0..h {
        for x in 0..w {
            let sx = (x - dx).clamp(0, w - 1) as u32;
            let sy = (y - dy).clamp(0, h - 1) as u32;
            pixels.extend_from_slice(&frame.rgb(sx, sy));
        }
    }
    TactileFrame::new(
        frame.width(),
        frame.height(),
        pixels,
        frame.timestamp(),
        frame.distortion(),
    )
    .expect("translated frame keeps valid dimensions")
}

fn check_in_frame(scene: &SimScene, kf: &Keyframe) -> Result<()> {
    if kf.press_mm <= 0.0 {
        return Ok(());
    }
    let r = scene.indenter.support_radius(kf.press_mm) * scene.px_per_mm;
    let (x0, x1) = (kf.center_px.0 - r, kf.center_px.0 + r);
    let (y0, y1) = (kf.center_px.1 - r, kf.center_px.1 + r);
    if x0 < 0.0 || y0 < 0.0 || x1 >= scene.width as f32 || y1 >= scene.height as f32 {
        return Err(SimError::IndenterOutOfFrame {
            x0,
            x1,
            y0,
            y1,
            w: scene.width,
            h: scene.height,
        });
    }
    Ok(())
}

/// Clamped-indenter membrane: raw indentation, Gaussian smoothing, peak
/// rescaled back to the press depth so the deepest point stays exact.
fn membrane_depth(scene: &SimScene, kf: &Keyframe) -> Vec<f32> {
    let (w, h) = (scene.width as usize, scene.height as usize);
    let mut depth = vec![0f32; w * h];
    if kf.press_mm <= 0.0 {
        return depth;
    }
    let ppm = scene.px_per_mm;
    for y in 0..h {
        for x in 0..w {
            let dxm = (x as f32 - kf.center_px.0) / ppm;
            let dym = (y as f32 - kf.center_px.1) / ppm;
            depth[y * w + x] = scene.indenter.indentation(dxm, dym, kf.press_mm);
        }
    }
    if scene.gel_blur_sigma > 0.0 {
        gaussian_blur(&mut depth, w, h, scene.gel_blur_sigma);
        let peak = depth.iter().cloned().fold(0.0f32, f32::max);
        if peak > 0.0 {
            // Sub-0.5% indentation is not contact; the cutoff keeps the
            // blurred support compact and round instead of inheriting the
            // truncated kernel's square corona.
            let cut = CONTACT_CUTOFF_FRAC * peak;
            let scale = kf.press_mm / peak;
            for d in depth.iter_mut() {
                *d = if *d < cut {
                    0.0
                } else {
                    (*d * scale).min(kf.press_mm)
                };
            }
        }
    }
    depth
}

/// Fraction of the peak indentation below which the membrane counts as
/// unloaded.
const CONTACT_CUTOFF_FRAC: f32 = 0.005;

/// Separable Gaussian blur with zero padding (depth is compactly supported).
fn gaussian_blur(data: &mut [f32], w: usize, h: usize, sigma: f32) {
    let radius = (3.0 * sigma).ceil() as i64;
    let mut kernel = Vec::with_capacity(2 * radius as usize + 1);
    for i in -radius..=radius {
        kernel.push((-0.5 * (i as f32 / sigma).powi(2)).exp());
    }
    let sum: f32 = kernel.iter().sum();
    for k in kernel.iter_mut() {
        *k /= sum;
    }

    let mut tmp = vec![0f32; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (ki, k) in kernel.iter().enumerate() {
                let sx = x as i64 + ki as i64 - radius;
                if sx >= 0 && sx < w as i64 {
                    acc += k * data[y * w + sx as usize];
                }
            }
            tmp[y * w + x] = acc;
        }
    }
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (ki, k) in kernel.iter().enumerate() {
                let sy = y as i64 + ki as i64 - radius;
                if sy >= 0 && sy < h as i64 {
                    acc += k * tmp[sy as usize * w + x];
                }
            }
            data[y * w + x] = acc;
        }
    }
}

/// Central-difference membrane gradient in mm per px; zero outside the frame.
fn gradient(depth: &[f32], w: usize, h: usize, x: usize, y: usize) -> (f32, f32) {
    let at = |x: i64, y: i64| -> f32 {
        if x < 0 || y < 0 || x >= w as i64 || y >= h as i64 {
            0.0
        } else {
            depth[y as usize * w + x as usize]
        }
    };
    let (x, y) = (x as i64, y as i64);
    let gx = (at(x + 1, y) - at(x - 1, y)) * 0.5;
    let gy = (at(x, y + 1) - at(x, y - 1)) * 0.5;
    (gx, gy)
}

/// Anti-aliased opaque disk; coverage alpha ramps over one pixel at the rim.
fn draw_disk(canvas: &mut [f32], w: usize, h: usize, cx: f32, cy: f32, radius: f32, color: [u8; 3]) {
    let reach = radius + 1.0;
    let x0 = ((cx - reach).floor().max(0.0)) as usize;
    let x1 = ((cx + reach).ceil().min(w as f32 - 1.0)) as usize;
    let y0 = ((cy - reach).floor().max(0.0)) as usize;
    let y1 = ((cy + reach).ceil().min(h as f32 - 1.0)) as usize;
    if x0 > x1 || y0 > y1 {
        return;
    }
    for y in y0..=y1 {
        for x in x0..=x1 {
            let d = (x as f32 - cx).hypot(y as f32 - cy);
            let alpha = (radius + 0.5 - d).clamp(0.0, 1.0);
            if alpha > 0.0 {
                let i = (y * w + x) * 3;
                for c in 0..3 {
                    canvas[i + c] = canvas[i + c] * (1.0 - alpha) + color[c] as f32 * alpha;
                }
            }
        }
    }
}

/// Contrast oracle: a marker is recoverable when the local background stays
/// brighter than the dot by `VISIBILITY_CONTRAST` after occlusion darkening.
fn marker_visible(
    scene: &SimScene,
    kf: &Keyframe,
    x: f32,
    y: f32,
    canvas: &[f32],
    w: usize,
    h: usize,
) -> bool {
    let xi = (x.round() as i64).clamp(0, w as i64 - 1) as usize;
    let yi = (y.round() as i64).clamp(0, h as i64 - 1) as usize;
    let i = (yi * w + xi) * 3;
    let bg = (canvas[i] + 2.0 * canvas[i + 1] + canvas[i + 2]) / 4.0;
    let dot = (scene.marker_color[0] as f32
        + 2.0 * scene.marker_color[1] as f32
        + scene.marker_color[2] as f32)
        / 4.0;
    let dxm = (x - kf.center_px.0) / scene.px_per_mm;
    let dym = (y - kf.center_px.1) / scene.px_per_mm;
    let occluded = scene.occlusion_strength > 0.0
        && scene.indenter.indentation(dxm, dym, kf.press_mm) > 0.0;
    let factor = if occluded {
        1.0 - scene.occlusion_strength
    } else {
        1.0
    };
    (bg - dot) * factor >= VISIBILITY_CONTRAST
}

fn noise_rng(seed: u64, index: usize) -> ChaCha8Rng {
    // Distinct stream per keyframe, stable across runs.
    ChaCha8Rng::seed_from_u64(seed ^ (index as u64).wrapping_mul(0x9E3779B97F4A7C15))
}

/// Standard normal via Box-Muller.
fn normal_sample(rng: &mut ChaCha8Rng) -> f32 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    ((-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()) as f32
}
