use crate::error::{Error, Result};
use crate::raster::Mask;
use crate::warping::{LayerRaster, Region};

/// Stop once no hole pixel changes by this many intensity levels.
pub const INPAINT_TOLERANCE: f64 = 0.5;
pub const INPAINT_MAX_ITERATIONS: usize = 500;

/// Fill `hole` by diffusion from the surrounding pixels.
///
/// `background` must cover the whole frame described by `hole`. Existing
/// values inside the hole are ignored. Each sweep visits hole pixels in
/// raster order and replaces each with the mean of its 4-neighbors that
/// are known or already filled. Sweeps stop when the largest change drops
/// below [`INPAINT_TOLERANCE`] or after [`INPAINT_MAX_ITERATIONS`], but
/// never while a hole pixel is still unfilled.
pub fn inpaint_background(background: &LayerRaster, hole: &Mask) -> Result<LayerRaster> {
    let (w, h) = hole.dims();
    if background.region != Region::new(0, 0, w, h) {
        return Err(Error::Inpaint(format!(
            "background region {:?} does not match the {w}x{h} frame",
            background.region
        )));
    }
    let n = (w * h) as usize;
    if hole.count() == n && n > 0 {
        return Err(Error::Inpaint("hole covers the entire frame".into()));
    }
    let mut color: Vec<[f64; 3]> = background
        .pixels
        .iter()
        .map(|p| {
            // Known pixels are opaque; unpremultiply defensively.
            let a = if p[3] > 0.0 { p[3] as f64 } else { 1.0 };
            [p[0] as f64 / a, p[1] as f64 / a, p[2] as f64 / a]
        })
        .collect();
    let holes: Vec<usize> = (0..n).filter(|&i| hole.data()[i]).collect();
    let mut filled: Vec<bool> = hole.data().iter().map(|&on| !on).collect();
    for &i in &holes {
        color[i] = [0.0; 3];
    }
    let (wi, hi) = (w as usize, h as usize);
    let mut unfilled = holes.len();
    let mut iterations = 0;
    loop {
        let mut max_change = 0.0f64;
        for &i in &holes {
            let (x, y) = (i % wi, i / wi);
            let mut sum = [0.0f64; 3];
            let mut count = 0;
            let mut take = |j: usize| {
                if filled[j] {
                    for c in 0..3 {
                        sum[c] += color[j][c];
                    }
                    count += 1;
                }
            };
            if y > 0 {
                take(i - wi);
            }
            if y + 1 < hi {
                take(i + wi);
            }
            if x > 0 {
                take(i - 1);
            }
            if x + 1 < wi {
                take(i + 1);
            }
            if count == 0 {
                continue;
            }
            let next = sum.map(|s| s / count as f64);
            if filled[i] {
                for c in 0..3 {
                    max_change = max_change.max((next[c] - color[i][c]).abs());
                }
            } else {
                filled[i] = true;
                unfilled -= 1;
                max_change = f64::INFINITY;
            }
            color[i] = next;
        }
        iterations += 1;
        if unfilled == 0 && (max_change < INPAINT_TOLERANCE || iterations >= INPAINT_MAX_ITERATIONS) {
            break;
        }
        if iterations > INPAINT_MAX_ITERATIONS + n {
            return Err(Error::Inpaint("hole pixels unreachable from known pixels".into()));
        }
    }
    Ok(LayerRaster {
        region: background.region,
        pixels: color
            .into_iter()
            .map(|c| [c[0] as f32, c[1] as f32, c[2] as f32, 1.0])
            .collect(),
    })
}
