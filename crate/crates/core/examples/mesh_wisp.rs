//! Mesh one wisp of the demo portrait and the auxiliary hair mesh.
//!
//! Run: `cargo run --example mesh_wisp [wisp index]`

use cinewisp::demo::{demo_config, demo_scene};
use cinewisp::meshing::delaunay::max_circumcircle_violation;
use cinewisp::pipeline::build_meshes;

fn main() -> cinewisp::Result<()> {
    let k: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(6);
    let scene = demo_scene()?;
    let (meshes, aux) = build_meshes(&scene, &scene.wisp_masks, &demo_config())?;
    for (i, m) in meshes.iter().enumerate() {
        println!(
            "wisp {i}: {:?}, {} vertices, {} edges, {} triangles, {} pinned, anchored {}",
            m.class,
            m.vertex_count(),
            m.edges.len(),
            m.triangles.len(),
            m.pinned_count(),
            m.anchor.is_some()
        );
    }
    if let Some(a) = &aux {
        println!("aux: {} vertices, {} triangles, {} pinned", a.vertex_count(), a.triangles.len(), a.pinned_count());
    }
    let Some(mesh) = meshes.get(k) else {
        eprintln!("no wisp {k}");
        std::process::exit(1);
    };
    println!(
        "\nwisp {k}: area {:.1} px², worst circumcircle violation {:.1e}",
        mesh.area(),
        max_circumcircle_violation(&mesh.vertices, &mesh.triangles)
    );
    print!("{}", mesh.to_debug_text());
    Ok(())
}
