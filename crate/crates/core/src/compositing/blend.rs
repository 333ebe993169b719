use image::{Rgba, RgbaImage};

use crate::warping::LayerRaster;

/// Paint `layers` back to front with the over operator and quantize once,
/// rounding half up.
pub fn composite_frame(width: u32, height: u32, layers: &[&LayerRaster]) -> RgbaImage {
    let mut acc = vec![[0.0f64; 3]; width as usize * height as usize];
    for layer in layers {
        let r = layer.region;
        for ly in 0..r.height as i64 {
            let y = r.y0 + ly;
            if y < 0 || y >= height as i64 {
                continue;
            }
            for lx in 0..r.width as i64 {
                let x = r.x0 + lx;
                if x < 0 || x >= width as i64 {
                    continue;
                }
                let p = layer.pixels[(ly * r.width as i64 + lx) as usize];
                let a = p[3] as f64;
                if a <= 0.0 {
                    continue;
                }
                let dst = &mut acc[(y * width as i64 + x) as usize];
                for c in 0..3 {
                    dst[c] = p[c] as f64 + dst[c] * (1.0 - a);
                }
            }
        }
    }
    RgbaImage::from_fn(width, height, |x, y| {
        let v = acc[(y * width + x) as usize];
        let q = |c: f64| (c + 0.5).floor().clamp(0.0, 255.0) as u8;
        Rgba([q(v[0]), q(v[1]), q(v[2]), 255])
    })
}
