use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::extraction::trace_boundary;
use crate::geometry::{signed_area2, vec2, Vec2};
use crate::raster::Mask;

use super::delaunay;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WispClass {
    ScalpConnected,
    ScalpUnconnected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub rest_length: f64,
}

/// Binding of one wisp vertex to the auxiliary mesh. The vertex follows
/// the barycentric blend of the three auxiliary vertices' displacements.
/// A nearest-vertex binding repeats that vertex with weights `(1, 0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchor {
    pub vertex: usize,
    pub aux_triangle: Option<usize>,
    pub aux_vertices: [usize; 3],
    pub weights: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct WispMesh {
    pub vertices: Vec<Vec2>,
    pub edges: Vec<Edge>,
    pub triangles: Vec<[usize; 3]>,
    pub pinned: Vec<bool>,
    pub anchor: Option<Anchor>,
    pub class: WispClass,
    pub source_mask: Option<usize>,
    /// Grid cell size used to build the mesh.
    pub cell: Vec2,
    /// Per vertex: `(neighbor, edge index)` sorted by neighbor.
    neighbors: Vec<Vec<(usize, usize)>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshParams {
    /// Cells per axis of the bounding-rectangle lattice.
    pub grid_n: usize,
    /// Add boundary samples one long cell side apart on top of the lattice.
    pub boundary_points: bool,
    /// Keep every triangle component instead of only the largest.
    pub keep_all_components: bool,
}

impl MeshParams {
    pub fn new(grid_n: usize) -> Self {
        MeshParams {
            grid_n,
            boundary_points: true,
            keep_all_components: false,
        }
    }
}

/// Mesh a wisp mask with default parameters at resolution `grid_n`.
pub fn build_wisp_mesh(mask: &Mask, grid_n: usize) -> Result<WispMesh> {
    build_mesh(mask, &MeshParams::new(grid_n))
}

/// Build a triangle mesh over a mask.
///
/// Candidates are the `(grid_n + 1)²` lattice points of the mask's
/// bounding rectangle (pixel squares, so a 60-pixel mask spans 60 units)
/// that lie within one cell diagonal of a mask pixel, plus boundary
/// samples spaced about one cell apart. After Delaunay triangulation,
/// triangles whose centroid falls outside the mask are dropped; unless
/// `keep_all_components` is set only the largest edge-connected group of
/// triangles survives, so every vertex is tied to the rest by springs.
pub fn build_mesh(mask: &Mask, params: &MeshParams) -> Result<WispMesh> {
    if params.grid_n < 1 {
        return Err(Error::Mesh("grid_n must be positive".into()));
    }
    let bb = mask
        .bbox()
        .ok_or_else(|| Error::Mesh("cannot mesh an empty mask".into()))?;
    let n = params.grid_n;
    let origin = vec2(bb.min_x as f64 - 0.5, bb.min_y as f64 - 0.5);
    let cell = vec2(bb.width() as f64 / n as f64, bb.height() as f64 / n as f64);
    let diag = cell.norm();

    let mut candidates: Vec<Vec2> = Vec::new();
    for j in 0..=n {
        for i in 0..=n {
            let p = origin + vec2(i as f64 * cell.x, j as f64 * cell.y);
            if near_mask(mask, &p, diag) {
                candidates.push(p);
            }
        }
    }
    if params.boundary_points {
        let step = cell.x.max(cell.y).round().max(1.0) as usize;
        let min_sep = (0.35 * cell.x.min(cell.y)).max(0.5);
        for comp in mask.components(true) {
            for (k, &(x, y)) in trace_boundary(&comp).iter().enumerate() {
                if k % step != 0 {
                    continue;
                }
                let p = vec2(x as f64, y as f64);
                if candidates.iter().all(|q| (q - p).norm() >= min_sep) {
                    candidates.push(p);
                }
            }
        }
    }
    if candidates.len() < 3 {
        return Err(Error::Mesh(format!(
            "mask yields only {} mesh vertices",
            candidates.len()
        )));
    }

    let inside = |t: &[usize; 3]| {
        let c = (candidates[t[0]] + candidates[t[1]] + candidates[t[2]]) / 3.0;
        mask.on((c.x + 0.5).floor() as i64, (c.y + 0.5).floor() as i64)
    };
    let tris: Vec<[usize; 3]> = delaunay::triangulate(&candidates)
        .into_iter()
        .filter(inside)
        .collect();
    let tris = if params.keep_all_components {
        tris
    } else {
        largest_component(&tris)
    };
    if tris.is_empty() {
        return Err(Error::Mesh("no triangle of the mesh lies inside the mask".into()));
    }

    // Compact to the vertices still referenced, keeping candidate order.
    let mut remap = vec![usize::MAX; candidates.len()];
    let mut vertices = Vec::new();
    for t in &tris {
        for &v in t {
            if remap[v] == usize::MAX {
                remap[v] = 0;
            }
        }
    }
    for (i, r) in remap.iter_mut().enumerate() {
        if *r != usize::MAX {
            *r = vertices.len();
            vertices.push(candidates[i]);
        }
    }
    let triangles: Vec<[usize; 3]> = tris
        .iter()
        .map(|t| [remap[t[0]], remap[t[1]], remap[t[2]]])
        .collect();
    let mut mesh = WispMesh::from_triangles(vertices, triangles);
    mesh.cell = cell;
    Ok(mesh)
}

fn near_mask(mask: &Mask, p: &Vec2, radius: f64) -> bool {
    let x0 = (p.x - radius).floor() as i64;
    let x1 = (p.x + radius).ceil() as i64;
    let y0 = (p.y - radius).floor() as i64;
    let y1 = (p.y + radius).ceil() as i64;
    let r2 = radius * radius + 1e-9;
    for y in y0..=y1 {
        for x in x0..=x1 {
            if mask.on(x, y) {
                let (dx, dy) = (x as f64 - p.x, y as f64 - p.y);
                if dx * dx + dy * dy <= r2 {
                    return true;
                }
            }
        }
    }
    false
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn largest_component(tris: &[[usize; 3]]) -> Vec<[usize; 3]> {
    use std::collections::HashMap;
    let mut parent: Vec<usize> = (0..tris.len()).collect();
    let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
    for (ti, t) in tris.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            let key = (a.min(b), a.max(b));
            if let Some(&other) = owner.get(&key) {
                let (ra, rb) = (find(&mut parent, ti), find(&mut parent, other));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            } else {
                owner.insert(key, ti);
            }
        }
    }
    let roots: Vec<usize> = (0..tris.len()).map(|i| find(&mut parent, i)).collect();
    let mut size = vec![0usize; tris.len()];
    for &r in &roots {
        size[r] += 1;
    }
    // Ties go to the component holding the earliest triangle.
    let best = roots
        .iter()
        .copied()
        .max_by(|&a, &b| size[a].cmp(&size[b]).then(b.cmp(&a)));
    match best {
        Some(b) => tris
            .iter()
            .zip(&roots)
            .filter(|(_, &r)| r == b)
            .map(|(t, _)| *t)
            .collect(),
        None => Vec::new(),
    }
}

impl WispMesh {
    /// Mesh from explicit geometry; edges and rest lengths come from the
    /// triangles. Starts unpinned, unanchored and scalp-connected.
    pub fn from_triangles(vertices: Vec<Vec2>, triangles: Vec<[usize; 3]>) -> Self {
        let mut pairs: Vec<(usize, usize)> = triangles
            .iter()
            .flat_map(|t| (0..3).map(move |k| (t[k].min(t[(k + 1) % 3]), t[k].max(t[(k + 1) % 3]))))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        let edges: Vec<Edge> = pairs
            .into_iter()
            .map(|(a, b)| Edge {
                a,
                b,
                rest_length: (vertices[b] - vertices[a]).norm(),
            })
            .collect();
        Self::from_edges(vertices, edges, triangles)
    }

    /// Mesh from explicit springs, for spring systems that are not
    /// triangulations (a single pendulum, say).
    pub fn from_edges(vertices: Vec<Vec2>, edges: Vec<Edge>, triangles: Vec<[usize; 3]>) -> Self {
        let mut neighbors = vec![Vec::new(); vertices.len()];
        for (k, e) in edges.iter().enumerate() {
            neighbors[e.a].push((e.b, k));
            neighbors[e.b].push((e.a, k));
        }
        for n in &mut neighbors {
            n.sort_unstable();
        }
        WispMesh {
            pinned: vec![false; vertices.len()],
            vertices,
            edges,
            triangles,
            anchor: None,
            class: WispClass::ScalpConnected,
            source_mask: None,
            cell: vec2(1.0, 1.0),
            neighbors,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, usize)] {
        &self.neighbors[i]
    }

    pub fn pinned_count(&self) -> usize {
        self.pinned.iter().filter(|&&p| p).count()
    }

    pub fn area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| signed_area2(&self.vertices[t[0]], &self.vertices[t[1]], &self.vertices[t[2]]).abs() / 2.0)
            .sum()
    }

    /// Index of the topmost vertex, ties broken by smallest x.
    pub fn topmost_vertex(&self) -> Option<usize> {
        (0..self.vertices.len()).min_by(|&a, &b| {
            let (p, q) = (&self.vertices[a], &self.vertices[b]);
            p.y.total_cmp(&q.y).then(p.x.total_cmp(&q.x))
        })
    }

    /// Vertex indices grouped by spring connectivity, each group in index
    /// order, groups ordered by their smallest index.
    pub fn vertex_components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        for e in &self.edges {
            let (ra, rb) = (find(&mut parent, e.a), find(&mut parent, e.b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for i in 0..self.vertices.len() {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(i);
        }
        groups.into_values().collect()
    }

    /// Check structural invariants: rest lengths, manifold edges, distinct
    /// vertices, Delaunay property (relative tolerance `1e-9`) and the
    /// pin/anchor contract for the mesh's class.
    pub fn check_invariants(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Mesh(m));
        for e in &self.edges {
            if e.rest_length != (self.vertices[e.b] - self.vertices[e.a]).norm() || !(e.rest_length > 0.0) {
                return bad(format!("edge {}-{} has a bad rest length", e.a, e.b));
            }
        }
        let mut uses: std::collections::HashMap<(usize, usize), usize> = Default::default();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *uses.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        if let Some((e, n)) = uses.iter().find(|(_, &n)| n > 2) {
            return bad(format!("edge {e:?} shared by {n} triangles"));
        }
        for i in 0..self.vertices.len() {
            for j in i + 1..self.vertices.len() {
                if (self.vertices[i] - self.vertices[j]).norm() <= 1e-6 {
                    return bad(format!("vertices {i} and {j} coincide"));
                }
            }
        }
        if delaunay::max_circumcircle_violation(&self.vertices, &self.triangles) > 1e-9 {
            return bad("triangulation is not Delaunay".into());
        }
        match self.class {
            WispClass::ScalpConnected if self.pinned_count() == 0 => bad("connected wisp has no pinned vertex".into()),
            WispClass::ScalpUnconnected if self.pinned_count() != 0 || self.anchor.is_none() => {
                bad("unconnected wisp must have no pins and one anchor".into())
            }
            _ => Ok(()),
        }
    }

    /// Debug text: `v x y [pin|anchor]` per vertex, then `f i j k` per
    /// triangle (zero-based indices).
    pub fn to_debug_text(&self) -> String {
        let mut s = String::new();
        for (i, v) in self.vertices.iter().enumerate() {
            let tag = if self.pinned[i] {
                " pin"
            } else if self.anchor.is_some_and(|a| a.vertex == i) {
                " anchor"
            } else {
                ""
            };
            let _ = writeln!(s, "v {} {}{}", v.x, v.y, tag);
        }
        for t in &self.triangles {
            let _ = writeln!(s, "f {} {} {}", t[0], t[1], t[2]);
        }
        s
    }
}
