//! On-disk formats: GSF1 shear fields, GSD1 depth maps, PNG frames with a
//! key=value sidecar header. Binary formats are little-endian and round-trip
//! bit-exactly.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::depth::DepthMap;
use crate::error::{CoreError, Result};
use crate::field::{GridSpec, ShearField};
use crate::frame::{Distortion, TactileFrame};

const GSF_MAGIC: &[u8; 4] = b"GSF1";
const GSD_MAGIC: &[u8; 4] = b"GSD1";

fn path_str(path: &Path) -> String {
    path.display().to_string()
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    path: String,
    format: &'static str,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(CoreError::format(
                self.path.clone(),
                self.format,
                format!("truncated at byte {}", self.pos),
            ));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn f32(&mut self) -> Result<f32> {
        let b = self.take(4)?;
        Ok(f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn f32_vec(&mut self, n: usize) -> Result<Vec<f32>> {
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            out.push(self.f32()?);
        }
        Ok(out)
    }

    fn expect_magic(&mut self, magic: &[u8; 4]) -> Result<()> {
        let b = self.take(4)?;
        if b != magic {
            return Err(CoreError::format(
                self.path.clone(),
                self.format,
                format!("bad magic {:?}", &b),
            ));
        }
        Ok(())
    }

    fn expect_end(&self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(CoreError::format(
                self.path.clone(),
                self.format,
                format!("{} trailing bytes", self.buf.len() - self.pos),
            ));
        }
        Ok(())
    }
}

/// Serialize a shear field: magic "GSF1", u32 grid_h, u32 grid_w, f32 anchors
/// (row-major, x then y per cell), f32 u_x, f32 u_y.
pub fn encode_shear_field(field: &ShearField) -> Vec<u8> {
    let n = field.cells();
    let mut out = Vec::with_capacity(4 + 8 + n * 16);
    out.extend_from_slice(GSF_MAGIC);
    out.extend_from_slice(&field.grid().grid_h.to_le_bytes());
    out.extend_from_slice(&field.grid().grid_w.to_le_bytes());
    for &(x, y) in field.anchors() {
        out.extend_from_slice(&x.to_le_bytes());
        out.extend_from_slice(&y.to_le_bytes());
    }
    for &v in field.u_x() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for &v in field.u_y() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_shear_field(bytes: &[u8], origin: &str) -> Result<ShearField> {
    let mut r = Reader {
        buf: bytes,
        pos: 0,
        path: origin.to_string(),
        format: "GSF1",
    };
    r.expect_magic(GSF_MAGIC)?;
    let grid_h = r.u32()?;
    let grid_w = r.u32()?;
    let grid = GridSpec::new(grid_h, grid_w)?;
    let n = grid.cells();
    let mut anchors = Vec::with_capacity(n);
    for _ in 0..n {
        let x = r.f32()?;
        let y = r.f32()?;
        anchors.push((x, y));
    }
    let u_x = r.f32_vec(n)?;
    let u_y = r.f32_vec(n)?;
    r.expect_end()?;
    ShearField::new(grid, anchors, u_x, u_y)
}

pub fn write_shear_field(path: &Path, field: &ShearField) -> Result<()> {
    fs::write(path, encode_shear_field(field)).map_err(|e| CoreError::io(path_str(path), e))
}

pub fn read_shear_field(path: &Path) -> Result<ShearField> {
    let bytes = fs::read(path).map_err(|e| CoreError::io(path_str(path), e))?;
    decode_shear_field(&bytes, &path_str(path))
}

/// Serialize a depth map: magic "GSD1", u32 width, u32 height, f32 depths
/// row-major.
pub fn encode_depth_map(map: &DepthMap) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + map.values().len() * 4);
    out.extend_from_slice(GSD_MAGIC);
    out.extend_from_slice(&map.width().to_le_bytes());
    out.extend_from_slice(&map.height().to_le_bytes());
    for &v in map.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_depth_map(bytes: &[u8], origin: &str) -> Result<DepthMap> {
    let mut r = Reader {
        buf: bytes,
        pos: 0,
        path: origin.to_string(),
        format: "GSD1",
    };
    r.expect_magic(GSD_MAGIC)?;
    let w = r.u32()?;
    let h = r.u32()?;
    let depth = r.f32_vec(w as usize * h as usize)?;
    r.expect_end()?;
    DepthMap::new(w, h, depth)
}

pub fn write_depth_map(path: &Path, map: &DepthMap) -> Result<()> {
    fs::write(path, encode_depth_map(map)).map_err(|e| CoreError::io(path_str(path), e))
}

pub fn read_depth_map(path: &Path) -> Result<DepthMap> {
    let bytes = fs::read(path).map_err(|e| CoreError::io(path_str(path), e))?;
    decode_depth_map(&bytes, &path_str(path))
}

/// Encode an RGB frame as PNG bytes.
pub fn encode_frame_png(frame: &TactileFrame) -> Result<Vec<u8>> {
    let mut bytes = Vec::new();
    let enc = image::codecs::png::PngEncoder::new(&mut bytes);
    image::ImageEncoder::write_image(
        enc,
        frame.pixels(),
        frame.width(),
        frame.height(),
        image::ExtendedColorType::Rgb8,
    )
    .map_err(|e| CoreError::format("<memory>", "PNG", e.to_string()))?;
    Ok(bytes)
}

/// Write a frame as `<path>` (PNG) plus a sidecar `<path minus .png>.meta`
/// carrying timestamp and distortion as key=value lines.
pub fn write_frame(path: &Path, frame: &TactileFrame) -> Result<()> {
    let png = encode_frame_png(frame)?;
    fs::write(path, png).map_err(|e| CoreError::io(path_str(path), e))?;
    let meta_path = sidecar_path(path);
    let meta = format!(
        "timestamp={}\ndistortion={}\n",
        frame.timestamp(),
        frame.distortion().as_str()
    );
    fs::write(&meta_path, meta).map_err(|e| CoreError::io(path_str(&meta_path), e))
}

pub fn sidecar_path(png_path: &Path) -> std::path::PathBuf {
    png_path.with_extension("meta")
}

pub fn read_frame(path: &Path) -> Result<TactileFrame> {
    let mut png_bytes = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut png_bytes))
        .map_err(|e| CoreError::io(path_str(path), e))?;
    let img = image::load_from_memory_with_format(&png_bytes, image::ImageFormat::Png)
        .map_err(|e| CoreError::format(path_str(path), "PNG", e.to_string()))?
        .into_rgb8();

    let meta_path = sidecar_path(path);
    let meta = fs::read_to_string(&meta_path).map_err(|e| CoreError::io(path_str(&meta_path), e))?;
    let mut timestamp: Option<f64> = None;
    let mut distortion: Option<Distortion> = None;
    for line in meta.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CoreError::format(path_str(&meta_path), "frame meta", format!("bad line {line:?}"))
        })?;
        match key.trim() {
            "timestamp" => {
                timestamp = Some(value.trim().parse().map_err(|_| {
                    CoreError::format(
                        path_str(&meta_path),
                        "frame meta",
                        format!("bad timestamp {value:?}"),
                    )
                })?)
            }
            "distortion" => {
                distortion = Some(Distortion::parse(value.trim()).ok_or_else(|| {
                    CoreError::format(
                        path_str(&meta_path),
                        "frame meta",
                        format!("bad distortion {value:?}"),
                    )
                })?)
            }
            _ => {}
        }
    }
    let timestamp = timestamp.ok_or_else(|| {
        CoreError::format(path_str(&meta_path), "frame meta", "missing timestamp")
    })?;
    let distortion = distortion.ok_or_else(|| {
        CoreError::format(path_str(&meta_path), "frame meta", "missing distortion")
    })?;

    let (w, h) = (img.width(), img.height());
    TactileFrame::new(w, h, img.into_raw(), timestamp, distortion)
}

/// Number of worker threads for data-parallel loops: `TACTILE_THREADS` when
/// set, otherwise the machine's available parallelism.
pub fn worker_threads() -> usize {
    if let Ok(v) = std::env::var("TACTILE_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            return n.max(1);
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

pub fn write_all(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| CoreError::io(path_str(path), e))?;
    f.write_all(bytes).map_err(|e| CoreError::io(path_str(path), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gsf_round_trip_is_bit_exact() {
        let grid = GridSpec::new(3, 4).unwrap();
        let field = ShearField::from_fn(grid, 64, 48, |x, y| (x * 0.1 - 2.0, y * -0.3 + 1.0));
        let bytes = encode_shear_field(&field);
        let back = decode_shear_field(&bytes, "<mem>").unwrap();
        assert_eq!(field, back);
        assert_eq!(bytes, encode_shear_field(&back));
    }

    #[test]
    fn gsf_rejects_bad_magic_and_truncation() {
        let grid = GridSpec::new(2, 2).unwrap();
        let field = ShearField::zero(grid, 32, 32);
        let mut bytes = encode_shear_field(&field);
        bytes[0] = b'X';
        assert!(decode_shear_field(&bytes, "<mem>").is_err());
        let bytes = encode_shear_field(&field);
        assert!(decode_shear_field(&bytes[..bytes.len() - 2], "<mem>").is_err());
    }

    #[test]
    fn gsd_round_trip() {
        let map = DepthMap::new(3, 2, vec![0.0, 0.5, 1.25, 0.0, 2.0, 0.125]).unwrap();
        let bytes = encode_depth_map(&map);
        let back = decode_depth_map(&bytes, "<mem>").unwrap();
        assert_eq!(map, back);
    }

    #[test]
    fn frame_png_sidecar_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("frame_0000.png");
        let mut px = vec![0u8; 32 * 32 * 3];
        for (i, p) in px.iter_mut().enumerate() {
            *p = (i % 251) as u8;
        }
        let frame = TactileFrame::new(32, 32, px, 1.5, Distortion::Distorted).unwrap();
        write_frame(&path, &frame).unwrap();
        let back = read_frame(&path).unwrap();
        assert_eq!(frame, back);
    }
}
