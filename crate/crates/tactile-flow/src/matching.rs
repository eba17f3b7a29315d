//! Grid-sampled block matching: for every anchor of a fixed lattice, search
//! the target frame for the reference patch over ±search px, score by sum of
//! absolute differences on grayscale patches, then refine the winning lag by
//! fitting a parabola to the SAD surface. Self-contained and deterministic;
//! no external vision dependencies.

use tactile_core::{io, CoreError, ShearConfig, ShearField, TactileFrame};

use crate::error::Result;

/// Flow result: the displacement field plus which cells the matcher trusts.
/// Invalid cells carry zero vectors and are excluded from statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowEstimate {
    pub field: ShearField,
    pub valid_mask: Vec<bool>,
    /// Mean per-pixel residual of valid cells, intensity units.
    pub mean_error: f32,
}

impl FlowEstimate {
    pub fn valid_count(&self) -> usize {
        self.valid_mask.iter().filter(|&&v| v).count()
    }
}

#[derive(Clone, Copy, Default)]
struct CellMatch {
    ux: f32,
    uy: f32,
    valid: bool,
    residual: f32,
}

/// Optical flow from `reference` to `target`: each vector points from the
/// reference position to where that patch sits in the target.
pub fn flow(
    target: &TactileFrame,
    reference: &TactileFrame,
    config: &ShearConfig,
) -> Result<FlowEstimate> {
    flow_with_threads(target, reference, config, io::worker_threads())
}

/// `flow` with an explicit worker count. Results are identical for any
/// thread count; cells are data-parallel.
pub fn flow_with_threads(
    target: &TactileFrame,
    reference: &TactileFrame,
    config: &ShearConfig,
    threads: usize,
) -> Result<FlowEstimate> {
    config.validate()?;
    if !target.same_shape(reference) {
        return Err(CoreError::DimensionMismatch {
            expected: format!("{}x{}", reference.width(), reference.height()),
            actual: format!("{}x{}", target.width(), target.height()),
        }
        .into());
    }
    if target.distortion() != reference.distortion() {
        return Err(CoreError::DistortionMismatch.into());
    }

    let grid = config.grid()?;
    let (w, h) = (reference.width() as usize, reference.height() as usize);
    let ref_gray = reference.gray_plane();
    let tgt_gray = target.gray_plane();
    let anchors = grid.anchors(reference.width(), reference.height());

    let matcher = Matcher {
        ref_gray: &ref_gray,
        tgt_gray: &tgt_gray,
        w,
        h,
        window: config.window as i64,
        search: config.search as i64,
        ceiling: ceiling_sad(config),
    };

    let mut cells = vec![CellMatch::default(); anchors.len()];
    let threads = threads.max(1).min(anchors.len().max(1));
    if threads <= 1 {
        for (cell, &anchor) in cells.iter_mut().zip(&anchors) {
            *cell = matcher.match_cell(anchor);
        }
    } else {
        let chunk = anchors.len().div_ceil(threads);
        std::thread::scope(|scope| {
            for (cell_chunk, anchor_chunk) in
                cells.chunks_mut(chunk).zip(anchors.chunks(chunk))
            {
                let matcher = &matcher;
                scope.spawn(move || {
                    for (cell, &anchor) in cell_chunk.iter_mut().zip(anchor_chunk) {
                        *cell = matcher.match_cell(anchor);
                    }
                });
            }
        });
    }

    let u_x = cells.iter().map(|c| c.ux).collect();
    let u_y = cells.iter().map(|c| c.uy).collect();
    let valid_mask: Vec<bool> = cells.iter().map(|c| c.valid).collect();
    let n_valid = valid_mask.iter().filter(|&&v| v).count();
    let mean_error = if n_valid > 0 {
        cells.iter().filter(|c| c.valid).map(|c| c.residual).sum::<f32>() / n_valid as f32
    } else {
        0.0
    };

    Ok(FlowEstimate {
        field: ShearField::new(grid, anchors, u_x, u_y)?,
        valid_mask,
        mean_error,
    })
}

/// Validity ceiling: fraction of the worst possible SAD for this window.
fn ceiling_sad(config: &ShearConfig) -> i64 {
    let side = 2 * config.window as i64 + 1;
    let max_sad = side * side * 255;
    (config.residual_ceiling_frac as f64 * max_sad as f64) as i64
}

struct Matcher<'a> {
    ref_gray: &'a [u8],
    tgt_gray: &'a [u8],
    w: usize,
    h: usize,
    window: i64,
    search: i64,
    ceiling: i64,
}

impl Matcher<'_> {
    fn match_cell(&self, anchor: (f32, f32)) -> CellMatch {
        let ax = anchor.0.round() as i64;
        let ay = anchor.1.round() as i64;
        let s = self.search;
        let side = 2 * s + 1;

        // Full SAD surface over the search square, row-major (dy, dx).
        let mut surface = vec![0i64; (side * side) as usize];
        let mut best_sad = i64::MAX;
        let mut best = (0i64, 0i64);
        for dy in -s..=s {
            for dx in -s..=s {
                let sad = self.sad(ax, ay, dx, dy);
                surface[((dy + s) * side + (dx + s)) as usize] = sad;
                if sad < best_sad || (sad == best_sad && closer(dx, dy, best)) {
                    best_sad = sad;
                    best = (dx, dy);
                }
            }
        }

        let valid = best_sad <= self.ceiling;
        if !valid {
            return CellMatch {
                ux: 0.0,
                uy: 0.0,
                valid: false,
                residual: self.per_pixel(best_sad),
            };
        }

        let at = |dx: i64, dy: i64| surface[((dy + s) * side + (dx + s)) as usize];
        let (bx, by) = best;
        // A zero-SAD lag is a perfect match; refinement could only move away.
        let (off_x, off_y) = if best_sad == 0 {
            (0.0, 0.0)
        } else {
            let ox = if bx > -s && bx < s {
                parabolic_offset(at(bx - 1, by), best_sad, at(bx + 1, by))
            } else {
                0.0
            };
            let oy = if by > -s && by < s {
                parabolic_offset(at(bx, by - 1), best_sad, at(bx, by + 1))
            } else {
                0.0
            };
            (ox, oy)
        };

        CellMatch {
            ux: bx as f32 + off_x,
            uy: by as f32 + off_y,
            valid: true,
            residual: self.per_pixel(best_sad),
        }
    }

    fn per_pixel(&self, sad: i64) -> f32 {
        let side = 2 * self.window + 1;
        sad as f32 / (side * side) as f32
    }

    fn sad(&self, ax: i64, ay: i64, dx: i64, dy: i64) -> i64 {
        let r = self.window;
        let (w, h) = (self.w as i64, self.h as i64);
        let interior = ax - r >= 0
            && ax + r < w
            && ay - r >= 0
            && ay + r < h
            && ax + dx - r >= 0
            && ax + dx + r < w
            && ay + dy - r >= 0
            && ay + dy + r < h;
        let mut acc = 0i64;
        if interior {
            let side = (2 * r + 1) as usize;
            for row in -r..=r {
                let ri = ((ay + row) * w + ax - r) as usize;
                let ti = ((ay + dy + row) * w + ax + dx - r) as usize;
                let a = &self.ref_gray[ri..ri + side];
                let b = &self.tgt_gray[ti..ti + side];
                for (x, y) in a.iter().zip(b) {
                    acc += (*x as i64 - *y as i64).abs();
                }
            }
        } else {
            // Border cells sample with clamped edges.
            for row in -r..=r {
                for col in -r..=r {
                    let rx = (ax + col).clamp(0, w - 1) as usize;
                    let ry = (ay + row).clamp(0, h - 1) as usize;
                    let tx = (ax + dx + col).clamp(0, w - 1) as usize;
                    let ty = (ay + dy + row).clamp(0, h - 1) as usize;
                    let a = self.ref_gray[ry * self.w + rx] as i64;
                    let b = self.tgt_gray[ty * self.w + tx] as i64;
                    acc += (a - b).abs();
                }
            }
        }
        acc
    }
}

/// Deterministic tie-break: prefer the smaller L2 displacement, then
/// lexicographic (dx, dy).
fn closer(dx: i64, dy: i64, best: (i64, i64)) -> bool {
    let l2 = dx * dx + dy * dy;
    let bl2 = best.0 * best.0 + best.1 * best.1;
    l2 < bl2 || (l2 == bl2 && (dx, dy) < best)
}

/// Vertex offset of the parabola through (-1, lo), (0, mid), (1, hi),
/// clamped to half a pixel. `mid` is the minimum of the three.
fn parabolic_offset(lo: i64, mid: i64, hi: i64) -> f32 {
    let denom = lo - 2 * mid + hi;
    if denom <= 0 {
        return 0.0;
    }
    let off = (lo - hi) as f32 / (2 * denom) as f32;
    off.clamp(-0.5, 0.5)
}
