//! Multi-layer mesh representation: one Delaunay mesh per wisp, a coarser
//! auxiliary mesh over the whole hair matte, scalp classification and
//! pinning, and the anchor binding that lets scalp-unconnected wisps ride
//! on the auxiliary mesh.

pub mod delaunay;
mod mesh;
mod scalp;

pub use mesh::{build_mesh, build_wisp_mesh, Anchor, Edge, MeshParams, WispClass, WispMesh};
pub use scalp::{
    bind_unconnected, build_auxiliary_mesh, classify_wisp, pin_scalp_vertices, FOREHEAD_DILATION,
};
