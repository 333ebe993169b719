use crate::error::{Error, Result};
use crate::geometry::{barycentric, polyline_distance, Vec2};
use crate::raster::{rasterize_polyline, Mask, ScalarMap};

use super::mesh::{build_mesh, Anchor, MeshParams, WispClass, WispMesh};

/// Dilation applied to the rasterized forehead polyline, in pixels.
pub const FOREHEAD_DILATION: f64 = 2.0;

/// Scalp-connected iff the mask meets the forehead polyline dilated by
/// [`FOREHEAD_DILATION`].
pub fn classify_wisp(mask: &Mask, forehead: &[Vec2]) -> WispClass {
    let line = rasterize_polyline(forehead, mask.width(), mask.height()).dilate(FOREHEAD_DILATION);
    if line.intersects(mask) {
        WispClass::ScalpConnected
    } else {
        WispClass::ScalpUnconnected
    }
}

fn pin_radius(mesh: &WispMesh) -> f64 {
    FOREHEAD_DILATION + mesh.cell.x.max(mesh.cell.y)
}

fn pin_near(mesh: &mut WispMesh, forehead: &[Vec2], subset: &[usize]) -> usize {
    let radius = pin_radius(mesh);
    let mut pinned = 0;
    let mut nearest: Option<(f64, usize)> = None;
    for &i in subset {
        let d = polyline_distance(&mesh.vertices[i], forehead);
        if d <= radius {
            mesh.pinned[i] = true;
            pinned += 1;
        }
        if nearest.is_none_or(|(best, _)| d < best) {
            nearest = Some((d, i));
        }
    }
    if pinned == 0 {
        if let Some((_, i)) = nearest {
            mesh.pinned[i] = true;
            pinned = 1;
        }
    }
    pinned
}

/// Pin every vertex within one grid cell of the dilated forehead polyline;
/// if none qualifies, pin the single nearest vertex. Returns the number
/// of pinned vertices.
pub fn pin_scalp_vertices(mesh: &mut WispMesh, forehead: &[Vec2]) -> Result<usize> {
    if mesh.class != WispClass::ScalpConnected {
        return Err(Error::Contract(
            "pin_scalp_vertices called on a scalp-unconnected wisp".into(),
        ));
    }
    let all: Vec<usize> = (0..mesh.vertex_count()).collect();
    Ok(pin_near(mesh, forehead, &all))
}

/// Mesh the whole hair region (matte ≥ 0.5) at resolution `grid_n_aux`
/// and pin the vertices lying on the scalp. Every disconnected piece of
/// hair keeps its triangles and gets at least one pin of its own.
pub fn build_auxiliary_mesh(matte: &ScalarMap, forehead: &[Vec2], grid_n_aux: usize) -> Result<WispMesh> {
    let support = matte.map(|&v| v >= 0.5);
    if support.is_empty() {
        return Err(Error::Mesh("hair matte has no support at threshold 0.5".into()));
    }
    let params = MeshParams {
        keep_all_components: true,
        ..MeshParams::new(grid_n_aux)
    };
    let mut mesh = build_mesh(&support, &params)?;
    mesh.class = WispClass::ScalpConnected;
    for comp in mesh.vertex_components() {
        pin_near(&mut mesh, forehead, &comp);
    }
    Ok(mesh)
}

/// Anchor the topmost vertex (ties: smallest x) of a scalp-unconnected
/// wisp to the auxiliary triangle containing it, or to the nearest
/// auxiliary vertex when no triangle does.
pub fn bind_unconnected(mesh: &mut WispMesh, aux: &WispMesh) -> Result<Anchor> {
    if mesh.class != WispClass::ScalpUnconnected {
        return Err(Error::Contract(
            "bind_unconnected called on a scalp-connected wisp".into(),
        ));
    }
    if aux.vertices.is_empty() {
        return Err(Error::Mesh("auxiliary mesh is empty".into()));
    }
    let top = mesh
        .topmost_vertex()
        .ok_or_else(|| Error::Mesh("wisp mesh has no vertices".into()))?;
    let p = mesh.vertices[top];
    let inside = aux.triangles.iter().enumerate().find_map(|(k, t)| {
        let w = barycentric(&p, &aux.vertices[t[0]], &aux.vertices[t[1]], &aux.vertices[t[2]])?;
        w.iter().all(|&x| x >= -1e-12).then_some((k, *t, w))
    });
    let anchor = match inside {
        Some((k, t, w)) => Anchor {
            vertex: top,
            aux_triangle: Some(k),
            aux_vertices: t,
            weights: w,
        },
        None => {
            let nearest = (0..aux.vertices.len())
                .min_by(|&a, &b| {
                    (aux.vertices[a] - p)
                        .norm_squared()
                        .total_cmp(&(aux.vertices[b] - p).norm_squared())
                })
                .expect("non-empty");
            Anchor {
                vertex: top,
                aux_triangle: None,
                aux_vertices: [nearest; 3],
                weights: [1.0, 0.0, 0.0],
            }
        }
    };
    mesh.pinned.iter_mut().for_each(|p| *p = false);
    mesh.anchor = Some(anchor);
    Ok(anchor)
}
