//! Animate hair wisps in a single portrait: wisp masks become mass-spring
//! meshes, the simulated meshes drive thin plate spline warps of each
//! wisp layer, and the layers are recomposited over an inpainted
//! background into a frame sequence.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod compositing;
pub mod config;
pub mod demo;
pub mod diagnose;
pub mod error;
pub mod extraction;
pub mod formats;
pub mod geometry;
pub mod manifest;
pub mod meshing;
pub mod pipeline;
pub mod raster;
pub mod scene;
pub mod simulation;
pub mod warping;

pub use error::{Error, Result, Stage};
