//! Write the demo portrait and its physics as files the command line
//! tool reads.
//!
//! Run: `cargo run --example write_demo_scene [dir]`, then
//! `cargo run -- animate --image dir/image.png ... --config dir/demo.cfg`.

use std::fmt::Write as _;
use std::path::PathBuf;

use cinewisp::demo::{demo_config, demo_scene};
use cinewisp::scene::save_scene;

fn main() -> cinewisp::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "demo_scene".into()));
    let paths = save_scene(&demo_scene()?, &dir)?;
    let mut cfg = String::from("# demo portrait physics\n");
    for (k, v) in demo_config().to_map() {
        let _ = writeln!(cfg, "{k} = {v}");
    }
    let cfg_path = dir.join("demo.cfg");
    std::fs::write(&cfg_path, cfg).map_err(|e| cinewisp::Error::io(&cfg_path, e))?;
    for (name, path) in paths.all() {
        println!("{name:8} {}", path.display());
    }
    println!("config   {}", cfg_path.display());
    Ok(())
}
