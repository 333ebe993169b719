//! Bend a checkerboard layer with a thin plate spline and save the result.
//!
//! Run: `cargo run --example tps_warp [out.png]`

use cinewisp::compositing::composite_frame;
use cinewisp::formats::save_rgba;
use cinewisp::geometry::vec2;
use cinewisp::warping::{tps_fit, warp_layer, LayerRaster, Region};

fn main() -> cinewisp::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "tps_warp.png".into());
    let region = Region::new(40, 20, 80, 160);
    let mut layer = LayerRaster::transparent(region);
    for y in 0..region.height {
        for x in 0..region.width {
            let v = if (x / 10 + y / 10) % 2 == 0 { 230.0 } else { 40.0 };
            layer.pixels[(y * region.width + x) as usize] = [v, v * 0.8, 60.0, 1.0];
        }
    }
    // Top row fixed, lower rows swing right more and more.
    let mut rest = Vec::new();
    let mut now = Vec::new();
    for j in 0..=4 {
        for i in 0..=2 {
            let p = vec2(40.0 + 40.0 * i as f64, 20.0 + 40.0 * j as f64);
            rest.push(p);
            now.push(p + vec2(6.0 * (j * j) as f64 / 4.0, -(j as f64)));
        }
    }
    let model = tps_fit(&rest, &now, 0.0)?;
    println!("max radial weight {:.3e}", model.max_radial_weight());
    let warped = warp_layer(&layer, &rest, &now, 0.0)?;
    println!(
        "alpha mass: rest {:.1}, warped {:.1}; warped region {:?}",
        layer.alpha_mass(),
        warped.alpha_mass(),
        warped.region
    );
    let backdrop = LayerRaster {
        region: Region::new(0, 0, 200, 200),
        pixels: vec![[255.0, 255.0, 255.0, 1.0]; 200 * 200],
    };
    let img = composite_frame(200, 200, &[&backdrop, &warped]);
    save_rgba(std::path::Path::new(&out), &img)?;
    println!("wrote {out}");
    Ok(())
}
