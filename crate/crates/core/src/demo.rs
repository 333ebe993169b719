//! A synthetic portrait used by the examples and end-to-end tests.
//!
//! The scene is 512×770: a face under a band of crown hair split in two,
//! four side strands, a fringe over the forehead, a loose lock over the
//! chin and a short lock below the left ear. Hair regions are described
//! by signed scores (pixels inside, positive); the matte is a two-pixel
//! soft ramp on the best score and each matte pixel belongs to the wisp
//! with the highest score.

use image::{Rgba, RgbaImage};

use crate::config::SceneConfig;
use crate::error::Result;
use crate::geometry::{vec2, Vec2};
use crate::raster::{Mask, ScalarMap};
use crate::scene::StillScene;

pub const DEMO_WIDTH: u32 = 512;
pub const DEMO_HEIGHT: u32 = 770;

const FACE_CENTER: (f64, f64) = (256.0, 410.0);
const FACE_RADII: (f64, f64) = (118.0, 160.0);
/// The bare scalp and forehead; its upper arc is the hairline.
const SKULL_CENTER: (f64, f64) = (256.0, 330.0);
const SKULL_RADII: (f64, f64) = (150.0, 170.0);

fn ellipse_score(x: f64, y: f64, c: (f64, f64), r: (f64, f64)) -> f64 {
    let q = (((x - c.0) / r.0).powi(2) + ((y - c.1) / r.1).powi(2)).sqrt();
    (1.0 - q) * r.0.min(r.1)
}

fn face_score(x: f64, y: f64) -> f64 {
    let skull = ellipse_score(x, y, SKULL_CENTER, SKULL_RADII).min(SKULL_CENTER.1 - y);
    ellipse_score(x, y, FACE_CENTER, FACE_RADII).max(skull)
}

/// A hanging strand whose centerline sways sinusoidally and whose width
/// tapers linearly from top to bottom.
#[derive(Debug, Clone, Copy)]
struct Strand {
    x0: f64,
    top: f64,
    bottom: f64,
    sway: f64,
    period: f64,
    w_top: f64,
    w_bottom: f64,
}

impl Strand {
    fn score(&self, x: f64, y: f64) -> f64 {
        let t = ((y - self.top) / (self.bottom - self.top)).clamp(0.0, 1.0);
        let center = self.x0 + self.sway * ((y - self.top) / self.period).sin();
        let half = 0.5 * (self.w_top + (self.w_bottom - self.w_top) * t);
        (half - (x - center).abs()).min(y - self.top).min(self.bottom - y)
    }
}

#[derive(Debug, Clone, Copy)]
enum Shape {
    /// Crown half: a band between the head outline and the scalp, above
    /// the hairline ends, on one side of the midline.
    Crown { left: bool },
    Strand { strand: Strand, behind_face: bool },
}

struct Wisp {
    shape: Shape,
    depth: f32,
}

fn wisps() -> Vec<Wisp> {
    let strand = |x0, top, bottom, sway, w_top, w_bottom| Strand {
        x0,
        top,
        bottom,
        sway,
        period: 90.0,
        w_top,
        w_bottom,
    };
    vec![
        Wisp { shape: Shape::Crown { left: true }, depth: 0.62 },
        Wisp { shape: Shape::Crown { left: false }, depth: 0.62 },
        Wisp { shape: Shape::Strand { strand: strand(100.0, 300.0, 640.0, 6.0, 30.0, 8.0), behind_face: true }, depth: 0.66 },
        Wisp { shape: Shape::Strand { strand: strand(132.0, 330.0, 600.0, -5.0, 26.0, 6.0), behind_face: true }, depth: 0.64 },
        Wisp { shape: Shape::Strand { strand: strand(380.0, 330.0, 610.0, 5.0, 26.0, 6.0), behind_face: true }, depth: 0.64 },
        Wisp { shape: Shape::Strand { strand: strand(412.0, 300.0, 650.0, -6.0, 30.0, 8.0), behind_face: true }, depth: 0.66 },
        Wisp { shape: Shape::Strand { strand: strand(236.0, 150.0, 250.0, 14.0, 34.0, 8.0), behind_face: false }, depth: 0.38 },
        Wisp { shape: Shape::Strand { strand: strand(318.0, 520.0, 700.0, 8.0, 22.0, 6.0), behind_face: false }, depth: 0.42 },
        Wisp { shape: Shape::Strand { strand: strand(62.0, 520.0, 700.0, 4.0, 20.0, 6.0), behind_face: false }, depth: 0.68 },
    ]
}

fn shape_score(shape: &Shape, x: f64, y: f64) -> f64 {
    match *shape {
        Shape::Crown { left } => {
            let head = ellipse_score(x, y, SKULL_CENTER, (SKULL_RADII.0 + 24.0, SKULL_RADII.1 + 24.0));
            let side = if left { 256.0 - x } else { x - 255.0 };
            head.min(-face_score(x, y)).min(SKULL_CENTER.1 + 10.0 - y).min(side + 0.5)
        }
        Shape::Strand { strand, behind_face } => {
            let s = strand.score(x, y);
            if behind_face {
                s.min(-face_score(x, y))
            } else {
                s
            }
        }
    }
}

/// Upper arc of the scalp: the hairline.
pub fn demo_forehead() -> Vec<Vec2> {
    (0..=32)
        .map(|i| {
            let a = std::f64::consts::PI * (i as f64 / 32.0);
            vec2(
                SKULL_CENTER.0 - SKULL_RADII.0 * a.cos(),
                SKULL_CENTER.1 - SKULL_RADII.1 * a.sin(),
            )
        })
        .collect()
}

fn texture(x: f64, y: f64, k: usize) -> [f64; 3] {
    let streak = 22.0 * (0.55 * x + 0.04 * y + k as f64).sin() + 10.0 * (0.13 * y - 0.2 * x).sin();
    [72.0 + streak, 46.0 + 0.8 * streak, 30.0 + 0.5 * streak]
}

/// Physics tuned for the demo portrait: stiff springs and light gravity
/// keep meshes of a few dozen vertices from sagging under their own
/// weight, and stronger drag lets the sway settle within the clip.
pub fn demo_config() -> SceneConfig {
    SceneConfig {
        spring_constant: 2000.0,
        gravity: vec2(0.0, 50.0),
        damping: 0.5,
        wind_v0: vec2(40.0, 0.0),
        ..SceneConfig::default()
    }
}

/// Build the synthetic portrait.
pub fn demo_scene() -> Result<StillScene> {
    let (w, h) = (DEMO_WIDTH, DEMO_HEIGHT);
    let specs = wisps();
    let n = (w * h) as usize;
    let mut matte = vec![0.0f32; n];
    let mut label = vec![usize::MAX; n];
    let mut face = vec![false; n];
    let mut depth = vec![1.0f32; n];
    let mut image = RgbaImage::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let (xf, yf) = (x as f64, y as f64);
            let i = (y * w + x) as usize;
            let fs = face_score(xf, yf);
            let mut best = (f64::NEG_INFINITY, usize::MAX);
            for (k, s) in specs.iter().enumerate() {
                let v = shape_score(&s.shape, xf, yf);
                if v > best.0 {
                    best = (v, k);
                }
            }
            let alpha = ((best.0 + 1.0) / 2.0).clamp(0.0, 1.0);
            // Backdrop: a cool vertical gradient with soft diagonal bands.
            let g = yf / h as f64;
            let band = 8.0 * (0.02 * (xf + yf)).sin();
            let mut c = [60.0 + 70.0 * g + band, 90.0 + 50.0 * g + band, 140.0 - 30.0 * g];
            if fs > 0.0 {
                face[i] = true;
                depth[i] = 0.5;
                let shade = 20.0 * ((yf - FACE_CENTER.1) / FACE_RADII.1);
                c = [224.0 - shade, 182.0 - shade, 152.0 - shade];
            }
            if alpha > 0.0 {
                matte[i] = alpha as f32;
                label[i] = best.1;
                depth[i] = specs[best.1].depth;
                let hair = texture(xf, yf, best.1);
                for ch in 0..3 {
                    c[ch] = alpha * hair[ch] + (1.0 - alpha) * c[ch];
                }
            }
            let q = |v: f64| (v + 0.5).floor().clamp(0.0, 255.0) as u8;
            image.put_pixel(x, y, Rgba([q(c[0]), q(c[1]), q(c[2]), 255]));
        }
    }
    let masks = (0..specs.len())
        .map(|k| Mask::from_vec(w, h, label.iter().map(|&l| l == k).collect()))
        .collect();
    StillScene::new(
        image,
        ScalarMap::from_vec(w, h, matte),
        masks,
        demo_forehead(),
        ScalarMap::from_vec(w, h, depth),
        Mask::from_vec(w, h, face),
    )
}
