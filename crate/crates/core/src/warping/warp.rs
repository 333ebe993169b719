use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Vec2;

use super::tps::{tps_fit, TpsModel};

/// Extra pixels around the displaced rest region when warping.
pub const WARP_MARGIN: i64 = 2;

/// Sample coordinates this close to an integer are snapped onto it.
const SNAP_EPS: f64 = 1e-9;

/// Axis-aligned pixel rectangle; may extend past the frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Region {
    pub x0: i64,
    pub y0: i64,
    pub width: u32,
    pub height: u32,
}

impl Region {
    pub fn new(x0: i64, y0: i64, width: u32, height: u32) -> Self {
        Region { x0, y0, width, height }
    }

    pub fn len(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        x >= self.x0 && y >= self.y0 && x < self.x0 + self.width as i64 && y < self.y0 + self.height as i64
    }

    /// Grow by `by` pixels on every side.
    pub fn grow(&self, by: i64) -> Region {
        Region {
            x0: self.x0 - by,
            y0: self.y0 - by,
            width: (self.width as i64 + 2 * by).max(0) as u32,
            height: (self.height as i64 + 2 * by).max(0) as u32,
        }
    }
}

/// Per-pixel displacement over a region: pixel `(x, y)` maps to
/// `(x, y) + at(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpField {
    pub region: Region,
    displacement: Vec<Vec2>,
}

impl WarpField {
    pub fn displacements(&self) -> &[Vec2] {
        &self.displacement
    }

    pub fn at(&self, x: i64, y: i64) -> Option<Vec2> {
        if !self.region.contains(x, y) {
            return None;
        }
        let i = (y - self.region.y0) as usize * self.region.width as usize + (x - self.region.x0) as usize;
        Some(self.displacement[i])
    }

    pub fn max_magnitude(&self) -> f64 {
        self.displacement.iter().map(|d| d.norm()).fold(0.0, f64::max)
    }
}

/// Evaluate `model` at every pixel center of `region`.
pub fn densify(model: &TpsModel, region: Region) -> WarpField {
    let w = region.width as usize;
    let mut displacement = vec![Vec2::zeros(); region.len()];
    if w > 0 {
        displacement.par_chunks_mut(w).enumerate().for_each(|(row, out)| {
            let y = (region.y0 + row as i64) as f64;
            for (col, d) in out.iter_mut().enumerate() {
                let p = Vec2::new((region.x0 + col as i64) as f64, y);
                *d = model.eval(p) - p;
            }
        });
    }
    WarpField { region, displacement }
}

/// A positioned RGBA raster with premultiplied color on a 0..255 scale and
/// alpha in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct LayerRaster {
    pub region: Region,
    pub pixels: Vec<[f32; 4]>,
}

impl LayerRaster {
    pub fn transparent(region: Region) -> Self {
        LayerRaster {
            region,
            pixels: vec![[0.0; 4]; region.len()],
        }
    }

    pub fn get(&self, x: i64, y: i64) -> [f32; 4] {
        if !self.region.contains(x, y) {
            return [0.0; 4];
        }
        self.pixels[(y - self.region.y0) as usize * self.region.width as usize + (x - self.region.x0) as usize]
    }

    pub fn alpha_mass(&self) -> f64 {
        self.pixels.iter().map(|p| p[3] as f64).sum()
    }

    /// Bilinear sample; outside the raster everything is transparent.
    pub fn sample(&self, p: Vec2) -> [f32; 4] {
        let snap = |v: f64| {
            let r = v.round();
            if (v - r).abs() <= SNAP_EPS {
                r
            } else {
                v
            }
        };
        let (x, y) = (snap(p.x), snap(p.y));
        let (fx, fy) = (x.floor(), y.floor());
        let (tx, ty) = (x - fx, y - fy);
        let (ix, iy) = (fx as i64, fy as i64);
        if tx == 0.0 && ty == 0.0 {
            return self.get(ix, iy);
        }
        let taps = [
            (ix, iy, (1.0 - tx) * (1.0 - ty)),
            (ix + 1, iy, tx * (1.0 - ty)),
            (ix, iy + 1, (1.0 - tx) * ty),
            (ix + 1, iy + 1, tx * ty),
        ];
        let mut acc = [0.0f64; 4];
        for (px, py, w) in taps {
            if w == 0.0 {
                continue;
            }
            let v = self.get(px, py);
            for c in 0..4 {
                acc[c] += w * v[c] as f64;
            }
        }
        acc.map(|v| v as f32)
    }
}

/// Region covering the raster's non-transparent pixels, or `None`.
fn support(layer: &LayerRaster) -> Option<Region> {
    let r = layer.region;
    let (mut x0, mut y0, mut x1, mut y1) = (i64::MAX, i64::MAX, i64::MIN, i64::MIN);
    for (i, p) in layer.pixels.iter().enumerate() {
        if p[3] > 0.0 {
            let x = r.x0 + (i % r.width as usize) as i64;
            let y = r.y0 + (i / r.width as usize) as i64;
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
    }
    (x0 <= x1).then(|| Region::new(x0, y0, (x1 - x0 + 1) as u32, (y1 - y0 + 1) as u32))
}

/// Backward TPS warp of a layer driven by its mesh.
///
/// Fits the map from current vertex positions back to rest positions,
/// evaluates it over the layer's support grown by the largest vertex
/// displacement plus [`WARP_MARGIN`], and samples the layer there.
pub fn warp_layer(layer: &LayerRaster, rest: &[Vec2], now: &[Vec2], lambda: f64) -> Result<LayerRaster> {
    if rest.len() != now.len() {
        return Err(Error::Warp(format!(
            "{} rest points but {} current points",
            rest.len(),
            now.len()
        )));
    }
    if rest == now {
        return Ok(layer.clone());
    }
    let Some(base) = support(layer) else {
        return Ok(layer.clone());
    };
    let max_disp = rest
        .iter()
        .zip(now)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if !max_disp.is_finite() {
        return Err(Error::Warp("non-finite mesh position".into()));
    }
    let region = base.grow(max_disp.ceil() as i64 + WARP_MARGIN);
    let inverse = tps_fit(now, rest, lambda)?;
    Ok(warp_with(layer, &inverse, region))
}

/// Sample `layer` at `model(p)` for every pixel `p` of `region`.
pub fn warp_with(layer: &LayerRaster, model: &TpsModel, region: Region) -> LayerRaster {
    let field = densify(model, region);
    let mut out = LayerRaster::transparent(region);
    let w = region.width as usize;
    if w > 0 {
        out.pixels
            .par_chunks_mut(w)
            .zip(field.displacement.par_chunks(w))
            .enumerate()
            .for_each(|(row, (px, disp))| {
                let y = (region.y0 + row as i64) as f64;
                for (col, (o, d)) in px.iter_mut().zip(disp).enumerate() {
                    let p = Vec2::new((region.x0 + col as i64) as f64, y);
                    *o = layer.sample(p + d);
                }
            });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::vec2;

    fn disc_layer() -> LayerRaster {
        let region = Region::new(0, 0, 100, 100);
        let mut l = LayerRaster::transparent(region);
        for y in 0..100 {
            for x in 0..100 {
                let d = ((x as f64 - 50.0).powi(2) + (y as f64 - 50.0).powi(2)).sqrt();
                if d <= 30.0 {
                    l.pixels[y * 100 + x] = [(x * 2) as f32, (y * 2) as f32, 90.0, 1.0];
                }
            }
        }
        l
    }

    fn controls() -> Vec<Vec2> {
        let mut v = Vec::new();
        for j in 0..7 {
            for i in 0..7 {
                v.push(vec2(20.0 + 10.0 * i as f64, 20.0 + 10.0 * j as f64));
            }
        }
        v
    }

    #[test]
    fn identity_model_gives_zero_field() {
        let c = controls();
        let m = tps_fit(&c, &c, 0.0).unwrap();
        let f = densify(&m, Region::new(-3, 4, 20, 10));
        assert!(f.max_magnitude() <= 1e-9);
        assert_eq!(f.displacements().len(), 200);
    }

    #[test]
    fn translation_gives_constant_field() {
        let c = controls();
        let t: Vec<Vec2> = c.iter().map(|p| p + vec2(3.0, 4.0)).collect();
        let m = tps_fit(&c, &t, 0.0).unwrap();
        let f = densify(&m, Region::new(0, 0, 90, 90));
        for d in f.displacements() {
            assert!((d - vec2(3.0, 4.0)).norm() <= 1e-9);
        }
    }

    #[test]
    fn field_at_controls_matches_model() {
        let c = controls();
        let t: Vec<Vec2> = c.iter().enumerate().map(|(i, p)| p + vec2((i % 3) as f64, (i % 5) as f64 * 0.5)).collect();
        let m = tps_fit(&c, &t, 0.0).unwrap();
        let f = densify(&m, Region::new(0, 0, 100, 100));
        for p in &c {
            let d = f.at(p.x as i64, p.y as i64).unwrap();
            assert!((d - (m.eval(*p) - p)).norm() <= 1e-9);
        }
    }

    #[test]
    fn half_resolution_field_agrees_on_affine_models() {
        let c = controls();
        let t: Vec<Vec2> = c.iter().map(|p| vec2(1.1 * p.x + 0.2 * p.y + 3.0, -0.1 * p.x + 0.9 * p.y)).collect();
        let m = tps_fit(&c, &t, 0.0).unwrap();
        let full = densify(&m, Region::new(0, 0, 81, 81));
        // Evaluate on even pixels only and interpolate the odd ones.
        let coarse = |x: i64, y: i64| m.eval(vec2(x as f64, y as f64)) - vec2(x as f64, y as f64);
        for y in (0..80).step_by(2) {
            for x in (0..80).step_by(2) {
                let mid = (coarse(x, y) + coarse(x + 2, y) + coarse(x, y + 2) + coarse(x + 2, y + 2)) / 4.0;
                assert!((mid - full.at(x + 1, y + 1).unwrap()).norm() <= 1e-2);
            }
        }
    }

    #[test]
    fn identity_warp_returns_input() {
        let l = disc_layer();
        let c = controls();
        let once = warp_layer(&l, &c, &c, 0.0).unwrap();
        assert_eq!(once, l);
        assert_eq!(warp_layer(&once, &c, &c, 0.0).unwrap(), l);
    }

    #[test]
    fn integer_translation_moves_content() {
        let l = disc_layer();
        let c = controls();
        let now: Vec<Vec2> = c.iter().map(|p| p + vec2(10.0, 0.0)).collect();
        let out = warp_layer(&l, &c, &now, 0.0).unwrap();
        for y in 0..100 {
            for x in 0..100 {
                assert_eq!(out.get(x + 10, y), l.get(x, y), "at {x},{y}");
            }
        }
        assert!((out.alpha_mass() - l.alpha_mass()).abs() < 1e-6);
    }

    #[test]
    fn small_rotation_preserves_alpha_mass() {
        let l = disc_layer();
        let c = controls();
        let (s, co) = (0.1f64.sin(), 0.1f64.cos());
        let center = vec2(50.0, 50.0);
        let now: Vec<Vec2> = c
            .iter()
            .map(|p| {
                let d = p - center;
                center + vec2(co * d.x - s * d.y, s * d.x + co * d.y)
            })
            .collect();
        let out = warp_layer(&l, &c, &now, 0.0).unwrap();
        let (a, b) = (l.alpha_mass(), out.alpha_mass());
        assert!((a - b).abs() <= 0.02 * a, "{a} vs {b}");
    }

    #[test]
    fn samples_outside_are_transparent() {
        let l = disc_layer();
        assert_eq!(l.sample(vec2(-5.0, 50.0)), [0.0; 4]);
        let edge = l.sample(vec2(-0.5, 50.0));
        assert_eq!(edge, [0.0; 4]);
        let half = l.sample(vec2(49.5, 50.0));
        assert!((half[0] - 99.0).abs() < 1e-4);
    }

    #[test]
    fn mismatched_points_error() {
        let c = controls();
        assert!(matches!(warp_layer(&disc_layer(), &c, &c[..5], 0.0), Err(Error::Warp(_))));
    }
}
