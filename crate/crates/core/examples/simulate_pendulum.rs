//! A hanging chain of springs, pinned at the top and pushed sideways.
//!
//! Run: `cargo run --example simulate_pendulum`

use cinewisp::config::SceneConfig;
use cinewisp::geometry::vec2;
use cinewisp::meshing::{Edge, WispMesh};
use cinewisp::simulation::simulate;

fn main() -> cinewisp::Result<()> {
    let links = 5;
    let vertices: Vec<_> = (0..=links).map(|i| vec2(100.0, 20.0 + 10.0 * i as f64)).collect();
    let edges = (0..links)
        .map(|i| Edge {
            a: i,
            b: i + 1,
            rest_length: 10.0,
        })
        .collect();
    let mut chain = WispMesh::from_edges(vertices, edges, vec![]);
    chain.pinned[0] = true;

    let config = SceneConfig {
        spring_constant: 2000.0,
        gravity: vec2(0.0, 50.0),
        damping: 0.5,
        wind_v0: vec2(60.0, 0.0),
        frame_count: 30,
        ..SceneConfig::default()
    };
    config.check()?;
    let traj = simulate(std::slice::from_ref(&chain), None, &config)?;
    println!("frame  time    tip x    tip y   max displacement");
    for (t, (s, d)) in traj.frames.iter().zip(traj.max_displacements()).enumerate() {
        let tip = s.meshes[0].positions[links];
        println!("{t:5}  {:.3}  {:7.2}  {:7.2}  {d:7.3}", s.time, tip.x, tip.y);
    }
    Ok(())
}
