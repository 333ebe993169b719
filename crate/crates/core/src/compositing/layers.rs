use crate::raster::{Mask, ScalarMap};
use crate::scene::StillScene;
use crate::warping::{LayerRaster, Region};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LayerKind {
    Background,
    Face,
    Wisp(usize),
}

/// A renderable layer with its ordering keys.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub kind: LayerKind,
    pub raster: LayerRaster,
    /// Mean scene depth over the layer's mask; larger is farther.
    pub depth: f64,
    /// Topmost row of the layer's mask; smaller is higher on the head.
    pub height: f64,
}

/// Layers cut from a still scene. The background still has its hole.
#[derive(Debug, Clone)]
pub struct SceneLayers {
    pub background: Layer,
    /// Pixels covered by hair or face, to be inpainted.
    pub hole: Mask,
    pub face: Layer,
    pub wisps: Vec<Layer>,
}

fn mean_over(depth: &ScalarMap, mask: &Mask) -> Option<f64> {
    let mut sum = 0.0f64;
    let mut n = 0usize;
    for (d, &on) in depth.data().iter().zip(mask.data()) {
        if on {
            sum += *d as f64;
            n += 1;
        }
    }
    (n > 0).then(|| sum / n as f64)
}

/// Premultiplied raster of `image` with per-pixel alpha, cropped to the
/// pixels where alpha is non-zero unless `full_frame` is set.
fn cut(scene: &StillScene, full_frame: bool, alpha: impl Fn(u32, u32) -> f32) -> LayerRaster {
    let (w, h) = (scene.width(), scene.height());
    let (mut x0, mut y0, mut x1, mut y1) = (w, h, 0u32, 0u32);
    if full_frame {
        (x0, y0, x1, y1) = (0, 0, w.saturating_sub(1), h.saturating_sub(1));
    } else {
        for y in 0..h {
            for x in 0..w {
                if alpha(x, y) > 0.0 {
                    x0 = x0.min(x);
                    y0 = y0.min(y);
                    x1 = x1.max(x);
                    y1 = y1.max(y);
                }
            }
        }
    }
    if x0 > x1 || y0 > y1 {
        return LayerRaster::transparent(Region::new(0, 0, 0, 0));
    }
    let region = Region::new(x0 as i64, y0 as i64, x1 - x0 + 1, y1 - y0 + 1);
    let mut out = LayerRaster::transparent(region);
    for y in y0..=y1 {
        for x in x0..=x1 {
            let a = alpha(x, y);
            if a > 0.0 {
                let p = scene.image.get_pixel(x, y).0;
                out.pixels[((y - y0) * region.width + (x - x0)) as usize] =
                    [p[0] as f32 * a, p[1] as f32 * a, p[2] as f32 * a, a];
            }
        }
    }
    out
}

/// Split a scene into background, face and one layer per wisp mask.
///
/// Wisp `k` takes the image color with alpha `matte · mask_k`; the face
/// takes alpha from the face mask. The background keeps every pixel where
/// neither hair (matte > 0) nor face is present.
pub fn extract_layers(scene: &StillScene) -> SceneLayers {
    let (w, h) = (scene.width(), scene.height());
    let matte = &scene.hair_matte;
    let hole = Mask::from_fn(w, h, |x, y| *matte.get(x, y) > 0.0 || *scene.face_mask.get(x, y));
    let background = Layer {
        kind: LayerKind::Background,
        raster: cut(scene, true, |x, y| if *hole.get(x, y) { 0.0 } else { 1.0 }),
        depth: f64::INFINITY,
        height: f64::INFINITY,
    };
    let top = |m: &Mask| m.bbox().map_or(f64::INFINITY, |b| b.min_y as f64);
    let face = Layer {
        kind: LayerKind::Face,
        raster: cut(scene, false, |x, y| if *scene.face_mask.get(x, y) { 1.0 } else { 0.0 }),
        depth: mean_over(&scene.depth, &scene.face_mask).unwrap_or(0.0),
        height: top(&scene.face_mask),
    };
    let wisps = scene
        .wisp_masks
        .iter()
        .enumerate()
        .map(|(k, m)| Layer {
            kind: LayerKind::Wisp(k),
            raster: cut(scene, false, |x, y| if *m.get(x, y) { matte.get(x, y).clamp(0.0, 1.0) } else { 0.0 }),
            depth: mean_over(&scene.depth, m).unwrap_or(0.0),
            height: top(m),
        })
        .collect();
    SceneLayers {
        background,
        hole,
        face,
        wisps,
    }
}
