//! Render the demo portrait as a frame sequence, the same way the
//! `animate` command does.
//!
//! Run: `cargo run --example animate_portrait [out_dir] [frames]`

use std::path::PathBuf;

use cinewisp::cli::{frame_name, TRAJECTORY_FILE};
use cinewisp::config::SceneConfig;
use cinewisp::demo::{demo_config, demo_scene};
use cinewisp::formats::save_rgba;
use cinewisp::pipeline::prepare;

fn main() -> cinewisp::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "animate_portrait".into()));
    let frames: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(90);
    std::fs::create_dir_all(&out).map_err(|e| cinewisp::Error::io(&out, e))?;

    let scene = demo_scene()?;
    let config = SceneConfig {
        frame_count: frames,
        ..demo_config()
    };
    let prepared = prepare(&scene, &config)?;
    for t in &prepared.timings {
        println!("{:<12} {:.3} s", t.stage.to_string(), t.seconds);
    }
    prepared
        .trajectory
        .write_dump(&prepared.meshes, &out.join(TRAJECTORY_FILE))?;
    for t in 0..prepared.frame_count() {
        save_rgba(&out.join(frame_name(t)), &prepared.render_frame(t)?)?;
    }
    let peak = prepared.trajectory.max_displacements().into_iter().fold(0.0, f64::max);
    println!(
        "wrote {} frames to {} (peak vertex displacement {peak:.1} px)",
        prepared.frame_count(),
        out.display()
    );
    Ok(())
}
