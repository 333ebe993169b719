//! Self-consistency warping error of a rendered sequence.
//!
//! The trajectory dump gives every wisp mesh in every frame. For each wisp
//! the spline that carried frame `t` to frame `t + 1` is refitted from the
//! mesh positions, frame `t` is pulled through it and compared with frame
//! `t + 1` over the pixels covered by the wisp's triangles there
//! (short-term error). The long-term error does the same from the first
//! frame to every later one.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use image::RgbaImage;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formats::load_rgba;
use crate::geometry::{barycentric, Vec2};
use crate::simulation::TrajectoryDump;
use crate::warping::{tps_fit, LayerRaster, Region};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnoseReport {
    /// Mean squared error (intensity levels², averaged over RGB) between
    /// frame `t + 1` and frame `t` carried forward; one entry per pair.
    pub short_term: Vec<f64>,
    /// Same between frame `t` and the first frame carried to `t`, for
    /// `t = 1..T`.
    pub long_term: Vec<f64>,
    /// Largest vertex displacement from the rest pose, per frame.
    pub max_displacement: Vec<f64>,
    /// Hair pixels compared, per pair.
    pub pixels: Vec<usize>,
}

impl DiagnoseReport {
    pub fn frame_count(&self) -> usize {
        self.max_displacement.len()
    }

    pub fn is_finite(&self) -> bool {
        self.short_term
            .iter()
            .chain(&self.long_term)
            .chain(&self.max_displacement)
            .all(|v| v.is_finite())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
        let _ = writeln!(out, "frames {}", self.frame_count());
        let _ = writeln!(out, "pairs {}", self.short_term.len());
        let _ = writeln!(out, "mean_short_term_mse {:.6}", mean(&self.short_term));
        let _ = writeln!(out, "mean_long_term_mse {:.6}", mean(&self.long_term));
        let _ = writeln!(out, "# t short_term long_term pixels max_displacement");
        for t in 0..self.frame_count() {
            if t == 0 {
                let _ = writeln!(out, "0 - - - {:.6}", self.max_displacement[0]);
            } else {
                let _ = writeln!(
                    out,
                    "{t} {:.6} {:.6} {} {:.6}",
                    self.short_term[t - 1],
                    self.long_term[t - 1],
                    self.pixels[t - 1],
                    self.max_displacement[t]
                );
            }
        }
        out
    }
}

fn opaque_layer(img: &RgbaImage) -> LayerRaster {
    LayerRaster {
        region: Region::new(0, 0, img.width(), img.height()),
        pixels: img
            .pixels()
            .map(|p| [p[0] as f32, p[1] as f32, p[2] as f32, 1.0])
            .collect(),
    }
}

/// Pixel centers inside any of `triangles`, clipped to the frame.
fn covered_pixels(positions: &[Vec2], triangles: &[[usize; 3]], w: u32, h: u32) -> Vec<(u32, u32)> {
    let mut hit = vec![false; w as usize * h as usize];
    for t in triangles {
        let [a, b, c] = t.map(|i| positions[i]);
        let lo = a.inf(&b).inf(&c);
        let hi = a.sup(&b).sup(&c);
        let x0 = lo.x.ceil().max(0.0) as i64;
        let y0 = lo.y.ceil().max(0.0) as i64;
        let x1 = hi.x.floor().min(w as f64 - 1.0) as i64;
        let y1 = hi.y.floor().min(h as f64 - 1.0) as i64;
        for y in y0..=y1 {
            for x in x0..=x1 {
                let p = Vec2::new(x as f64, y as f64);
                if let Some(bc) = barycentric(&p, &a, &b, &c) {
                    if bc.iter().all(|&v| v >= -1e-9) {
                        hit[y as usize * w as usize + x as usize] = true;
                    }
                }
            }
        }
    }
    hit.iter()
        .enumerate()
        .filter(|(_, &on)| on)
        .map(|(i, _)| ((i % w as usize) as u32, (i / w as usize) as u32))
        .collect()
}

/// Squared error summed over RGB and the number of pixels compared, for
/// `target` against `source` pulled back through the mesh motion
/// `from → to`.
fn warp_error(
    source: &LayerRaster,
    target: &RgbaImage,
    from: &[Vec<Vec2>],
    to: &[Vec<Vec2>],
    triangles: &[Vec<[usize; 3]>],
) -> Result<(f64, usize)> {
    let (w, h) = target.dimensions();
    let mut sum = 0.0;
    let mut count = 0;
    for k in 0..triangles.len() {
        if triangles[k].is_empty() {
            continue;
        }
        let pixels = covered_pixels(&to[k], &triangles[k], w, h);
        let back = if from[k] == to[k] {
            None
        } else {
            Some(tps_fit(&to[k], &from[k], 0.0)?)
        };
        for (x, y) in pixels {
            let p = Vec2::new(x as f64, y as f64);
            let s = match &back {
                Some(m) => source.sample(m.eval(p)),
                None => source.get(x as i64, y as i64),
            };
            let t = target.get_pixel(x, y).0;
            for c in 0..3 {
                let d = s[c] as f64 - t[c] as f64;
                sum += d * d;
            }
            count += 1;
        }
    }
    Ok((sum, count))
}

/// Diagnose an in-memory sequence against its trajectory.
pub fn diagnose_frames(frames: &[RgbaImage], dump: &TrajectoryDump) -> Result<DiagnoseReport> {
    if frames.len() != dump.frames.len() {
        return Err(Error::Diagnose(format!(
            "{} frames but the trajectory has {}",
            frames.len(),
            dump.frames.len()
        )));
    }
    if frames.is_empty() {
        return Err(Error::Diagnose("empty sequence".into()));
    }
    let dims = frames[0].dimensions();
    if let Some(i) = frames.iter().position(|f| f.dimensions() != dims) {
        return Err(Error::Diagnose(format!("frame {i} size differs from frame 0")));
    }
    let layers: Vec<LayerRaster> = frames.par_iter().map(opaque_layer).collect();
    let pairs: Vec<(f64, f64, usize)> = (1..frames.len())
        .into_par_iter()
        .map(|t| {
            let (s_sum, n) = warp_error(&layers[t - 1], &frames[t], &dump.frames[t - 1], &dump.frames[t], &dump.triangles)?;
            let (l_sum, m) = warp_error(&layers[0], &frames[t], &dump.frames[0], &dump.frames[t], &dump.triangles)?;
            let mse = |s: f64, n: usize| if n == 0 { 0.0 } else { s / (3 * n) as f64 };
            Ok((mse(s_sum, n), mse(l_sum, m), n))
        })
        .collect::<Result<_>>()?;
    let rest = &dump.frames[0];
    let max_displacement = dump
        .frames
        .iter()
        .map(|f| {
            f.iter()
                .zip(rest)
                .flat_map(|(a, b)| a.iter().zip(b).map(|(p, q)| (p - q).norm()))
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(DiagnoseReport {
        short_term: pairs.iter().map(|p| p.0).collect(),
        long_term: pairs.iter().map(|p| p.1).collect(),
        pixels: pairs.iter().map(|p| p.2).collect(),
        max_displacement,
    })
}

/// Frame files `frame_NNNN.png` in a directory, in order.
pub fn list_frames(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("frame_") && n.ends_with(".png"))
        })
        .collect();
    out.sort();
    Ok(out)
}

/// Diagnose a frame directory written by the animate command.
pub fn run_diagnose(frames_dir: &Path, trajectory: &Path) -> Result<DiagnoseReport> {
    let dump = TrajectoryDump::load(trajectory)?;
    let paths = list_frames(frames_dir)?;
    if paths.len() != dump.frames.len() {
        return Err(Error::Diagnose(format!(
            "{} holds {} frames but {} lists {}",
            frames_dir.display(),
            paths.len(),
            trajectory.display(),
            dump.frames.len()
        )));
    }
    let frames = paths.iter().map(|p| load_rgba(p)).collect::<Result<Vec<_>>>()?;
    diagnose_frames(&frames, &dump)
}
