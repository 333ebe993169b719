//! Layer extraction, background fill, depth ordering and blending.

mod blend;
mod inpaint;
mod layers;
mod order;

pub use blend::composite_frame;
pub use inpaint::{inpaint_background, INPAINT_MAX_ITERATIONS, INPAINT_TOLERANCE};
pub use layers::{extract_layers, Layer, LayerKind, SceneLayers};
pub use order::{sort_layers, FramePlan, DEPTH_TIE};
