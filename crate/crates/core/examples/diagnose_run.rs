//! Measure how well each rendered frame is explained by warping the
//! previous one (and the first one) along the simulated meshes.
//!
//! Run: `cargo run --example diagnose_run [frames]`

use std::path::Path;

use cinewisp::config::SceneConfig;
use cinewisp::demo::{demo_config, demo_scene};
use cinewisp::diagnose::diagnose_frames;
use cinewisp::pipeline::prepare;
use cinewisp::simulation::TrajectoryDump;

fn main() -> cinewisp::Result<()> {
    let frames: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(30);
    let scene = demo_scene()?;
    let config = SceneConfig {
        frame_count: frames,
        ..demo_config()
    };
    let prepared = prepare(&scene, &config)?;
    let rendered = prepared.render_all()?;
    let dump = TrajectoryDump::parse(&prepared.trajectory.to_dump_text(&prepared.meshes), Path::new("memory"))?;
    let report = diagnose_frames(&rendered, &dump)?;
    print!("{}", report.to_text());
    Ok(())
}
