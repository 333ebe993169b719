//! Split the demo portrait into layers, fill the background behind the
//! hair and show the painting order.
//!
//! Run: `cargo run --example composite_layers [out_dir]`

use std::path::PathBuf;

use cinewisp::compositing::{composite_frame, extract_layers, inpaint_background, sort_layers, LayerKind};
use cinewisp::demo::demo_scene;
use cinewisp::formats::save_rgba;

fn main() -> cinewisp::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "composite_layers".into()));
    std::fs::create_dir_all(&out).map_err(|e| cinewisp::Error::io(&out, e))?;
    let scene = demo_scene()?;
    let (w, h) = (scene.width(), scene.height());
    let layers = extract_layers(&scene);
    println!("hole: {} pixels", layers.hole.count());
    let background = inpaint_background(&layers.background.raster, &layers.hole)?;
    save_rgba(&out.join("background.png"), &composite_frame(w, h, &[&background]))?;

    let plan = sort_layers(&layers.face, &layers.wisps);
    println!("painting order, back to front:");
    for kind in &plan.order {
        match kind {
            LayerKind::Background => println!("  background"),
            LayerKind::Face => println!("  face        depth {:.3}", layers.face.depth),
            LayerKind::Wisp(k) => println!(
                "  wisp {k}      depth {:.3}, top row {:.0}",
                layers.wisps[*k].depth, layers.wisps[*k].height
            ),
        }
    }
    let rasters: Vec<_> = plan
        .order
        .iter()
        .map(|k| match *k {
            LayerKind::Background => &background,
            LayerKind::Face => &layers.face.raster,
            LayerKind::Wisp(i) => &layers.wisps[i].raster,
        })
        .collect();
    save_rgba(&out.join("recomposited.png"), &composite_frame(w, h, &rasters))?;
    println!("wrote {}", out.display());
    Ok(())
}
