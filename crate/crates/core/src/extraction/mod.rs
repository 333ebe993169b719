//! Wisp mask tooling: the sketch-filled annotation generator and the shape
//! refinement (contour smoothing + tip sharpening) applied before meshing.

mod contour;
mod refine;
mod sketch;
mod smoothing;

pub use contour::{split_contour, trace_boundary, ContourPair, Pixel, Side};
pub use refine::{rasterize_between, refine_wisp, sharpen_tip, RefineParams};
pub use sketch::{sketch_fill, sketch_fill_all, Stroke};
pub use smoothing::{smooth_contour, PolyCurve};
