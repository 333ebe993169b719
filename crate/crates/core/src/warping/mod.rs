//! Dense warps from sparse mesh motion via thin plate splines.

mod tps;
mod warp;

pub use tps::{tps_fit, tps_kernel, TpsModel, FALLBACK_LAMBDA};
pub use warp::{densify, warp_layer, warp_with, LayerRaster, Region, WarpField, WARP_MARGIN};
