//! On-disk formats: lossless rasters (PNG), polyline text files and wisp
//! label rasters.
//!
//! * Scalar rasters (matte, depth) are 8- or 16-bit grayscale; values are
//!   normalized to `[0, 1]`. Color inputs are converted to luma first.
//! * Binary rasters (face mask, per-wisp masks) treat any nonzero sample as set.
//! * Wisp masks come either as one label raster (`0` = background, `i` =
//!   wisp `i`) or as a directory of binary rasters read in filename order.
//! * Polylines are text, one `x y` pair per line, pixel coordinates with the
//!   origin at the top-left and y down. Blank lines and `#` comments are ignored.

use std::collections::BTreeSet;
use std::path::Path;

use image::{DynamicImage, ImageBuffer, Luma, RgbaImage};

use crate::error::{Error, Result};
use crate::geometry::{vec2, Vec2};
use crate::raster::{Mask, ScalarMap};

fn open(path: &Path) -> Result<DynamicImage> {
    if !path.exists() {
        return Err(Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "file not found"),
        ));
    }
    image::open(path).map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_rgba(path: &Path) -> Result<RgbaImage> {
    Ok(open(path)?.into_rgba8())
}

pub fn save_rgba(path: &Path, img: &RgbaImage) -> Result<()> {
    img.save_with_format(path, image::ImageFormat::Png)
        .map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })
}

pub fn load_scalar(path: &Path) -> Result<ScalarMap> {
    let img = open(path)?;
    let (w, h) = (img.width(), img.height());
    let data = match img {
        DynamicImage::ImageLuma16(buf) => buf.into_raw().into_iter().map(|v| v as f32 / 65535.0).collect(),
        DynamicImage::ImageLumaA16(_) | DynamicImage::ImageRgb16(_) | DynamicImage::ImageRgba16(_) => img
            .into_luma16()
            .into_raw()
            .into_iter()
            .map(|v| v as f32 / 65535.0)
            .collect(),
        other => other
            .into_luma8()
            .into_raw()
            .into_iter()
            .map(|v| v as f32 / 255.0)
            .collect(),
    };
    Ok(ScalarMap::from_vec(w, h, data))
}

/// Quantize a `[0, 1]` raster to 16-bit grayscale.
pub fn save_scalar(path: &Path, map: &ScalarMap) -> Result<()> {
    let buf: ImageBuffer<Luma<u16>, Vec<u16>> = ImageBuffer::from_raw(
        map.width(),
        map.height(),
        map.data()
            .iter()
            .map(|&v| (v.clamp(0.0, 1.0) * 65535.0).round() as u16)
            .collect(),
    )
    .expect("buffer size");
    buf.save_with_format(path, image::ImageFormat::Png)
        .map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })
}

fn load_labels(path: &Path) -> Result<(u32, u32, Vec<u16>)> {
    let img = open(path)?;
    let (w, h) = (img.width(), img.height());
    let labels = match img {
        DynamicImage::ImageLuma8(buf) => buf.into_raw().into_iter().map(u16::from).collect(),
        DynamicImage::ImageLuma16(buf) => buf.into_raw(),
        other => other.into_luma16().into_raw(),
    };
    Ok((w, h, labels))
}

pub fn load_mask(path: &Path) -> Result<Mask> {
    let (w, h, labels) = load_labels(path)?;
    Ok(Mask::from_vec(w, h, labels.into_iter().map(|v| v != 0).collect()))
}

pub fn save_mask(path: &Path, mask: &Mask) -> Result<()> {
    let buf: ImageBuffer<Luma<u8>, Vec<u8>> = ImageBuffer::from_raw(
        mask.width(),
        mask.height(),
        mask.data().iter().map(|&b| if b { 255 } else { 0 }).collect(),
    )
    .expect("buffer size");
    buf.save_with_format(path, image::ImageFormat::Png)
        .map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })
}

/// Load wisp masks from a label raster or a directory of binary rasters.
/// Label rasters yield one mask per distinct nonzero label, ascending.
pub fn load_wisp_masks(path: &Path) -> Result<Vec<Mask>> {
    if path.is_dir() {
        let mut entries: Vec<_> = std::fs::read_dir(path)
            .map_err(|e| Error::io(path, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        entries.sort();
        return entries.iter().map(|p| load_mask(p)).collect();
    }
    let (w, h, labels) = load_labels(path)?;
    let ids: BTreeSet<u16> = labels.iter().copied().filter(|&v| v != 0).collect();
    Ok(ids
        .into_iter()
        .map(|id| Mask::from_vec(w, h, labels.iter().map(|&v| v == id).collect()))
        .collect())
}

/// Write masks as one label raster; earlier masks win where they overlap.
/// Uses 8-bit samples when there are fewer than 256 wisps.
pub fn save_label_raster(path: &Path, width: u32, height: u32, masks: &[Mask]) -> Result<()> {
    let mut labels = vec![0u16; width as usize * height as usize];
    for (i, m) in masks.iter().enumerate() {
        assert_eq!(m.dims(), (width, height));
        for (l, &on) in labels.iter_mut().zip(m.data()) {
            if on && *l == 0 {
                *l = (i + 1) as u16;
            }
        }
    }
    let res = if masks.len() < 256 {
        let buf: ImageBuffer<Luma<u8>, Vec<u8>> =
            ImageBuffer::from_raw(width, height, labels.into_iter().map(|v| v as u8).collect())
                .expect("buffer size");
        buf.save_with_format(path, image::ImageFormat::Png)
    } else {
        let buf: ImageBuffer<Luma<u16>, Vec<u16>> =
            ImageBuffer::from_raw(width, height, labels).expect("buffer size");
        buf.save_with_format(path, image::ImageFormat::Png)
    };
    res.map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse_polyline(text: &str, origin: &Path) -> Result<Vec<Vec2>> {
    let mut pts = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |reason: String| Error::Parse {
            path: origin.to_path_buf(),
            line: n + 1,
            reason,
        };
        let fields: Vec<&str> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .collect();
        if fields.len() != 2 {
            return Err(bad(format!("expected \"x y\", got {line:?}")));
        }
        let parse = |s: &str| -> Result<f64> {
            let v: f64 = s.parse().map_err(|_| bad(format!("not a number: {s:?}")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(bad(format!("not finite: {s:?}")))
            }
        };
        pts.push(vec2(parse(fields[0])?, parse(fields[1])?));
    }
    Ok(pts)
}

pub fn load_polyline(path: &Path) -> Result<Vec<Vec2>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_polyline(&text, path)
}

pub fn format_polyline(points: &[Vec2]) -> String {
    points.iter().map(|p| format!("{} {}\n", p.x, p.y)).collect()
}

pub fn save_polyline(path: &Path, points: &[Vec2]) -> Result<()> {
    std::fs::write(path, format_polyline(points)).map_err(|e| Error::io(path, e))
}
