use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tactile_core::dataset::{write_diff_png, write_manifest, ManifestEntry, Split};
use tactile_core::{difference_image, io, CoreError, GridSpec};

use crate::error::Result;
use crate::render::render_frame;
use crate::scene::{Keyframe, SimScene};

/// Which split an object's samples feed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SceneRole {
    /// Samples split 90/10 into train/val.
    Train,
    /// Whole object reserved for validation.
    ValObject,
    /// Whole object completely unseen until test time.
    TestObject,
}

/// Pose randomization ranges for dataset sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleRanges {
    pub press_min_mm: f32,
    pub press_max_mm: f32,
    pub shear_max_px: f32,
    pub center_jitter_px: f32,
}

impl Default for SampleRanges {
    fn default() -> Self {
        Self {
            press_min_mm: 0.3,
            press_max_mm: 1.0,
            shear_max_px: 3.0,
            center_jitter_px: 6.0,
        }
    }
}

/// One object in a dataset: its scene, its split role, its pose ranges.
#[derive(Debug, Clone)]
pub struct DatasetScene {
    pub scene: SimScene,
    pub role: SceneRole,
    pub ranges: SampleRanges,
}

/// Generate a dataset directory: per sample a difference image (offset PNG),
/// a rectified depth map (GSD1), the ground-truth shear field (GSF1), and one
/// manifest row. Per-object 10% validation holdout for training objects,
/// whole-object splits for the rest. Byte-identical for a fixed seed.
pub fn generate_dataset(
    scenes: &[DatasetScene],
    samples_per_scene: usize,
    seed: u64,
    grid: GridSpec,
    out_dir: &Path,
) -> Result<Vec<ManifestEntry>> {
    fs::create_dir_all(out_dir)
        .map_err(|e| CoreError::io(out_dir.display().to_string(), e))?;

    let mut entries = Vec::new();
    let mut id = 0u32;
    for (scene_idx, ds) in scenes.iter().enumerate() {
        ds.scene.validate()?;
        let base_center = ds
            .scene
            .motion
            .first()
            .map(|k| k.center_px)
            .unwrap_or((ds.scene.width as f32 / 2.0, ds.scene.height as f32 / 2.0));
        for sample_idx in 0..samples_per_scene {
            let mut rng = sample_rng(seed, scene_idx, sample_idx);
            let r = &ds.ranges;
            let press = rng.gen_range(r.press_min_mm..=r.press_max_mm);
            let shear = (
                rng.gen_range(-r.shear_max_px..=r.shear_max_px),
                rng.gen_range(-r.shear_max_px..=r.shear_max_px),
            );
            let center = (
                base_center.0 + rng.gen_range(-r.center_jitter_px..=r.center_jitter_px),
                base_center.1 + rng.gen_range(-r.center_jitter_px..=r.center_jitter_px),
            );
            let kf = Keyframe {
                press_mm: press,
                shear_px: shear,
                center_px: center,
            };

            let mut sample_scene = ds.scene.clone();
            sample_scene.motion = vec![Keyframe::rest(center), kf];
            sample_scene.seed = rng.gen();

            let rest = render_frame(&sample_scene, 0, grid)?;
            let pressed = render_frame(&sample_scene, 1, grid)?;
            let diff = difference_image(&pressed.frame, &rest.frame)?;

            let split = match ds.role {
                SceneRole::Train => {
                    if sample_idx % 10 == 9 {
                        Split::Val
                    } else {
                        Split::Train
                    }
                }
                SceneRole::ValObject => Split::ValObject,
                SceneRole::TestObject => Split::TestObject,
            };
            let entry = ManifestEntry {
                id,
                split,
                object: ds.scene.name.clone(),
                press_mm: press,
                shear_px: shear,
                center_px: center,
            };
            write_diff_png(&out_dir.join(entry.diff_file()), &diff)?;
            io::write_depth_map(&out_dir.join(entry.depth_file()), &pressed.depth)?;
            io::write_shear_field(&out_dir.join(entry.flow_file()), &pressed.truth)?;
            entries.push(entry);
            id += 1;
        }
    }
    write_manifest(&out_dir.join("manifest.tsv"), &entries)?;
    Ok(entries)
}

fn sample_rng(seed: u64, scene_idx: usize, sample_idx: usize) -> ChaCha8Rng {
    let mix = seed
        ^ (scene_idx as u64).wrapping_mul(0xA24BAED4963EE407)
        ^ (sample_idx as u64).wrapping_mul(0x9FB21C651E98DF25);
    ChaCha8Rng::seed_from_u64(mix)
}
