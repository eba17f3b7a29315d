//! Dot detection: global Otsu threshold, connected components, and an
//! intensity-weighted sub-pixel centroid per blob. Used for diagnostics and
//! simulator validation; the block matcher samples a fixed anchor lattice
//! instead of detected dots.

use tactile_core::TactileFrame;

use crate::error::{FlowError, Result};

/// Detected dark dots: sub-pixel centroids and equivalent-disk radii.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkerSet {
    pub centroids: Vec<(f32, f32)>,
    pub radii: Vec<f32>,
}

impl MarkerSet {
    pub fn len(&self) -> usize {
        self.centroids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centroids.is_empty()
    }

    /// Nearest centroid to a point and its distance.
    pub fn nearest(&self, x: f32, y: f32) -> Option<((f32, f32), f32)> {
        self.centroids
            .iter()
            .map(|&c| (c, (c.0 - x).hypot(c.1 - y)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }
}

/// Smallest blob (px) that counts as a marker; kills noise speckle.
const MIN_BLOB_AREA: usize = 3;

/// Detect dark circular markers on a lighter gel background.
///
/// `expected_count` is a hint; fewer than half that many detections is an
/// error.
pub fn detect_markers(frame: &TactileFrame, expected_count: usize) -> Result<MarkerSet> {
    let w = frame.width() as usize;
    let h = frame.height() as usize;
    let gray = frame.gray_plane();
    let threshold = otsu_threshold(&gray);
    // Blobs much bigger than a marker's share of the frame (shadowed contact
    // patches, a thresholded uniform frame) are not dots.
    let max_blob_area = (w * h) / expected_count.max(32);

    let mut labels = vec![false; w * h];
    for (i, &g) in gray.iter().enumerate() {
        labels[i] = g < threshold;
    }

    let mut visited = vec![false; w * h];
    let mut stack = Vec::new();
    let mut blobs: Vec<(f32, f32, f32, usize)> = Vec::new(); // (cx, cy, weight, area)

    for start in 0..w * h {
        if !labels[start] || visited[start] {
            continue;
        }
        // Flood fill one 4-connected component.
        let mut sum_w = 0f64;
        let mut sum_x = 0f64;
        let mut sum_y = 0f64;
        let mut area = 0usize;
        stack.push(start);
        visited[start] = true;
        while let Some(i) = stack.pop() {
            let (x, y) = (i % w, i / w);
            let weight = (threshold as f64 - gray[i] as f64).max(1.0);
            sum_w += weight;
            sum_x += weight * x as f64;
            sum_y += weight * y as f64;
            area += 1;
            let mut push = |j: usize| {
                if labels[j] && !visited[j] {
                    visited[j] = true;
                    stack.push(j);
                }
            };
            if x > 0 {
                push(i - 1);
            }
            if x + 1 < w {
                push(i + 1);
            }
            if y > 0 {
                push(i - w);
            }
            if y + 1 < h {
                push(i + w);
            }
        }
        if area >= MIN_BLOB_AREA && area <= max_blob_area {
            blobs.push((
                (sum_x / sum_w) as f32,
                (sum_y / sum_w) as f32,
                sum_w as f32,
                area,
            ));
        }
    }

    // Merge centroid pairs closer than 2 px, keeping the heavier blob.
    blobs.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.total_cmp(&b.0)));
    let mut kept: Vec<(f32, f32, f32, usize)> = Vec::new();
    'outer: for b in blobs {
        for k in &kept {
            if (b.0 - k.0).hypot(b.1 - k.1) < 2.0 {
                continue 'outer;
            }
        }
        kept.push(b);
    }
    kept.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)));

    let required = expected_count.div_ceil(2);
    if kept.len() < required {
        return Err(FlowError::TooFewMarkers {
            found: kept.len(),
            expected: expected_count,
            required,
        });
    }

    Ok(MarkerSet {
        centroids: kept.iter().map(|b| (b.0, b.1)).collect(),
        radii: kept
            .iter()
            .map(|b| (b.3 as f32 / std::f32::consts::PI).sqrt())
            .collect(),
    })
}

/// Otsu's threshold on a 256-bin histogram: maximizes between-class
/// variance. Returns a level such that `gray < level` is the dark class.
pub fn otsu_threshold(gray: &[u8]) -> u8 {
    let mut hist = [0u64; 256];
    for &g in gray {
        hist[g as usize] += 1;
    }
    let total: u64 = gray.len() as u64;
    if total == 0 {
        return 0;
    }
    let sum_all: f64 = hist
        .iter()
        .enumerate()
        .map(|(v, &c)| v as f64 * c as f64)
        .sum();

    let mut best_t = 0usize;
    let mut best_var = -1.0f64;
    let mut w0 = 0u64;
    let mut sum0 = 0f64;
    for t in 0..256 {
        w0 += hist[t];
        sum0 += t as f64 * hist[t] as f64;
        let w1 = total - w0;
        if w0 == 0 {
            continue;
        }
        if w1 == 0 {
            break;
        }
        let m0 = sum0 / w0 as f64;
        let m1 = (sum_all - sum0) / w1 as f64;
        let var = w0 as f64 * w1 as f64 * (m0 - m1) * (m0 - m1);
        if var > best_var {
            best_var = var;
            best_t = t;
        }
    }
    // Split point: dark class is <= best_t, so the threshold level is t+1.
    (best_t + 1).min(255) as u8
}
