//! Dataset directory formats shared by the simulator (writer) and the depth
//! pipeline (reader): the sample manifest and the offset-encoded signed
//! difference-image PNGs (stored byte = value/2 + 128).

use std::fs;
use std::path::Path;

use crate::error::{CoreError, Result};
use crate::frame::DifferenceImage;

/// Which split a dataset sample belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    /// Training sample from a training object.
    Train,
    /// Per-object 10% holdout from a training object.
    Val,
    /// Every sample of an object reserved whole for validation.
    ValObject,
    /// Every sample of an object never seen during fitting.
    TestObject,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::ValObject => "val-object",
            Split::TestObject => "test-object",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "train" => Some(Split::Train),
            "val" => Some(Split::Val),
            "val-object" => Some(Split::ValObject),
            "test-object" => Some(Split::TestObject),
            _ => None,
        }
    }
}

/// One manifest row: sample id, split, object id, and the pose that
/// generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub id: u32,
    pub split: Split,
    pub object: String,
    pub press_mm: f32,
    pub shear_px: (f32, f32),
    pub center_px: (f32, f32),
}

impl ManifestEntry {
    pub fn diff_file(&self) -> String {
        format!("diff_{:04}.png", self.id)
    }

    pub fn depth_file(&self) -> String {
        format!("depth_{:04}.gsd", self.id)
    }

    pub fn flow_file(&self) -> String {
        format!("flow_{:04}.gsf", self.id)
    }
}

const MANIFEST_HEADER: &str = "id\tsplit\tobject\tpress_mm\tshear_dx_px\tshear_dy_px\tcenter_x_px\tcenter_y_px";

pub fn manifest_to_tsv(entries: &[ManifestEntry]) -> String {
    let mut out = String::from(MANIFEST_HEADER);
    out.push('\n');
    for e in entries {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            e.id,
            e.split.as_str(),
            e.object,
            e.press_mm,
            e.shear_px.0,
            e.shear_px.1,
            e.center_px.0,
            e.center_px.1
        ));
    }
    out
}

pub fn write_manifest(path: &Path, entries: &[ManifestEntry]) -> Result<()> {
    fs::write(path, manifest_to_tsv(entries))
        .map_err(|e| CoreError::io(path.display().to_string(), e))
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let text =
        fs::read_to_string(path).map_err(|e| CoreError::io(path.display().to_string(), e))?;
    let origin = path.display().to_string();
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == MANIFEST_HEADER => {}
        _ => {
            return Err(CoreError::format(
                origin,
                "manifest",
                "missing or unexpected header row",
            ))
        }
    }
    let mut entries = Vec::new();
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 8 {
            return Err(CoreError::format(
                origin,
                "manifest",
                format!("line {}: expected 8 fields, got {}", lineno + 1, fields.len()),
            ));
        }
        let parse_f32 = |s: &str, what: &str| -> Result<f32> {
            s.parse().map_err(|_| {
                CoreError::format(
                    origin.clone(),
                    "manifest",
                    format!("line {}: bad {what} {s:?}", lineno + 1),
                )
            })
        };
        entries.push(ManifestEntry {
            id: fields[0].parse().map_err(|_| {
                CoreError::format(
                    origin.clone(),
                    "manifest",
                    format!("line {}: bad id {:?}", lineno + 1, fields[0]),
                )
            })?,
            split: Split::parse(fields[1]).ok_or_else(|| {
                CoreError::format(
                    origin.clone(),
                    "manifest",
                    format!("line {}: bad split {:?}", lineno + 1, fields[1]),
                )
            })?,
            object: fields[2].to_string(),
            press_mm: parse_f32(fields[3], "press")?,
            shear_px: (parse_f32(fields[4], "shear dx")?, parse_f32(fields[5], "shear dy")?),
            center_px: (
                parse_f32(fields[6], "center x")?,
                parse_f32(fields[7], "center y")?,
            ),
        });
    }
    Ok(entries)
}

/// Offset-encode a signed difference image into RGB8 PNG bytes:
/// stored = value/2 + 128. The low bit is quantized away.
pub fn encode_diff_png(diff: &DifferenceImage) -> Result<Vec<u8>> {
    let stored: Vec<u8> = diff.values().iter().map(|&v| (v / 2 + 128) as u8).collect();
    let mut bytes = Vec::new();
    let enc = image::codecs::png::PngEncoder::new(&mut bytes);
    image::ImageEncoder::write_image(
        enc,
        &stored,
        diff.width(),
        diff.height(),
        image::ExtendedColorType::Rgb8,
    )
    .map_err(|e| CoreError::format("<memory>", "diff PNG", e.to_string()))?;
    Ok(bytes)
}

pub fn decode_diff_png(bytes: &[u8], origin: &str) -> Result<DifferenceImage> {
    let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| CoreError::format(origin, "diff PNG", e.to_string()))?
        .into_rgb8();
    let (w, h) = (img.width(), img.height());
    let values = img.into_raw().iter().map(|&b| (b as i16 - 128) * 2).collect();
    DifferenceImage::from_raw(w, h, values)
}

pub fn write_diff_png(path: &Path, diff: &DifferenceImage) -> Result<()> {
    fs::write(path, encode_diff_png(diff)?)
        .map_err(|e| CoreError::io(path.display().to_string(), e))
}

pub fn read_diff_png(path: &Path) -> Result<DifferenceImage> {
    let bytes = fs::read(path).map_err(|e| CoreError::io(path.display().to_string(), e))?;
    decode_diff_png(&bytes, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diff_png_offset_encoding_quantizes_to_two() {
        let vals: Vec<i16> = (-255..=255).cycle().take(32 * 32 * 3).collect();
        let diff = DifferenceImage::from_raw(32, 32, vals.clone()).unwrap();
        let bytes = encode_diff_png(&diff).unwrap();
        let back = decode_diff_png(&bytes, "<mem>").unwrap();
        for (orig, dec) in vals.iter().zip(back.values()) {
            assert_eq!(*dec, (orig / 2) * 2);
            assert!((orig - dec).abs() <= 1);
        }
    }

    #[test]
    fn manifest_round_trip() {
        let entries = vec![
            ManifestEntry {
                id: 0,
                split: Split::Train,
                object: "sphere_a".into(),
                press_mm: 0.75,
                shear_px: (1.5, -2.0),
                center_px: (80.0, 60.0),
            },
            ManifestEntry {
                id: 1,
                split: Split::TestObject,
                object: "cross_b".into(),
                press_mm: 1.0,
                shear_px: (0.0, 0.0),
                center_px: (81.5, 59.25),
            },
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.tsv");
        write_manifest(&path, &entries).unwrap();
        let back = read_manifest(&path).unwrap();
        assert_eq!(entries, back);
    }

    #[test]
    fn manifest_rejects_bad_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.tsv");
        std::fs::write(&path, "id\tsplit\nnope").unwrap();
        assert!(read_manifest(&path).is_err());
    }
}
