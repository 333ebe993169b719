//! End-to-end rendering: refine, mesh, simulate, warp and composite.

use std::time::Instant;

use image::RgbaImage;
use rayon::prelude::*;

use crate::compositing::{
    composite_frame, extract_layers, inpaint_background, sort_layers, FramePlan, Layer, LayerKind,
};
use crate::config::SceneConfig;
use crate::error::{Error, Result, Stage, StageExt};
use crate::extraction::{refine_wisp, RefineParams};
use crate::meshing::{
    bind_unconnected, build_auxiliary_mesh, build_wisp_mesh, classify_wisp, pin_scalp_vertices, WispClass,
    WispMesh,
};
use crate::raster::Mask;
use crate::scene::StillScene;
use crate::simulation::{simulate, Trajectory};
use crate::warping::{warp_layer, LayerRaster};

/// Wall-clock seconds spent in one stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageTiming {
    pub stage: Stage,
    pub seconds: f64,
}

/// Everything needed to render any frame of the sequence.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub config: SceneConfig,
    pub width: u32,
    pub height: u32,
    /// Masks the layers and meshes were built from.
    pub wisp_masks: Vec<Mask>,
    pub meshes: Vec<WispMesh>,
    pub aux: Option<WispMesh>,
    pub trajectory: Trajectory,
    pub background: LayerRaster,
    pub face: Layer,
    pub wisps: Vec<Layer>,
    pub plan: FramePlan,
    pub timings: Vec<StageTiming>,
}

fn timed<T>(timings: &mut Vec<StageTiming>, stage: Stage, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let start = Instant::now();
    let out = f().stage(stage)?;
    timings.push(StageTiming {
        stage,
        seconds: start.elapsed().as_secs_f64(),
    });
    Ok(out)
}

/// Refine every wisp mask (when enabled), in parallel.
pub fn refine_masks(scene: &StillScene, config: &SceneConfig) -> Result<Vec<Mask>> {
    if !config.refine_masks {
        return Ok(scene.wisp_masks.clone());
    }
    let params = RefineParams {
        poly_degree: config.poly_degree,
        tip_fraction: config.tip_fraction,
        tip_min_width_ratio: config.tip_min_width_ratio,
    };
    scene
        .wisp_masks
        .par_iter()
        .enumerate()
        .map(|(k, m)| {
            refine_wisp(m, &params).map_err(|e| Error::WispMask {
                index: k,
                reason: e.to_string(),
            })
        })
        .collect()
}

/// Mesh every wisp, pin the scalp-connected ones and bind the rest to an
/// auxiliary mesh over the whole hair region.
pub fn build_meshes(scene: &StillScene, masks: &[Mask], config: &SceneConfig) -> Result<(Vec<WispMesh>, Option<WispMesh>)> {
    let contour = &scene.forehead_contour;
    let mut meshes = masks
        .par_iter()
        .enumerate()
        .map(|(k, m)| {
            let wrap = |e: Error| Error::WispMask {
                index: k,
                reason: e.to_string(),
            };
            let mut mesh = build_wisp_mesh(m, config.grid_n).map_err(wrap)?;
            mesh.source_mask = Some(k);
            mesh.class = classify_wisp(m, contour);
            if mesh.class == WispClass::ScalpConnected {
                pin_scalp_vertices(&mut mesh, contour).map_err(wrap)?;
            }
            Ok(mesh)
        })
        .collect::<Result<Vec<_>>>()?;
    let aux = if meshes.iter().any(|m| m.class == WispClass::ScalpUnconnected) {
        let aux = build_auxiliary_mesh(&scene.hair_matte, contour, config.grid_n_aux)?;
        for mesh in meshes.iter_mut().filter(|m| m.class == WispClass::ScalpUnconnected) {
            bind_unconnected(mesh, &aux)?;
        }
        Some(aux)
    } else {
        None
    };
    Ok((meshes, aux))
}

/// Run every stage up to and including simulation and layer preparation.
pub fn prepare(scene: &StillScene, config: &SceneConfig) -> Result<Prepared> {
    config.check().stage(Stage::Config)?;
    let mut timings = Vec::new();
    let masks = timed(&mut timings, Stage::Extraction, || refine_masks(scene, config))?;
    let (meshes, aux) = timed(&mut timings, Stage::Meshing, || build_meshes(scene, &masks, config))?;
    let trajectory = timed(&mut timings, Stage::Simulation, || simulate(&meshes, aux.as_ref(), config))?;
    let (background, face, wisps, plan) = timed(&mut timings, Stage::Compositing, || {
        let refined = StillScene {
            wisp_masks: masks.clone(),
            ..scene.clone()
        };
        let layers = extract_layers(&refined);
        let background = inpaint_background(&layers.background.raster, &layers.hole)?;
        let plan = sort_layers(&layers.face, &layers.wisps);
        Ok((background, layers.face, layers.wisps, plan))
    })?;
    Ok(Prepared {
        config: config.clone(),
        width: scene.width(),
        height: scene.height(),
        wisp_masks: masks,
        meshes,
        aux,
        trajectory,
        background,
        face,
        wisps,
        plan,
        timings,
    })
}

impl Prepared {
    pub fn frame_count(&self) -> usize {
        self.trajectory.len()
    }

    /// Wisp layers warped to frame `t`, indexed like the wisps.
    pub fn warped_wisps(&self, t: usize) -> Result<Vec<LayerRaster>> {
        let frame = self
            .trajectory
            .frames
            .get(t)
            .ok_or_else(|| Error::Contract(format!("frame {t} out of range")))?;
        self.wisps
            .par_iter()
            .zip(&self.meshes)
            .zip(&frame.meshes)
            .map(|((layer, mesh), state)| {
                warp_layer(&layer.raster, &mesh.vertices, &state.positions, self.config.tps_lambda)
            })
            .collect::<Result<Vec<_>>>()
            .stage(Stage::Warping)
    }

    /// Composite frame `t` (0-based; frame 0 is the rest pose).
    pub fn render_frame(&self, t: usize) -> Result<RgbaImage> {
        let warped = self.warped_wisps(t)?;
        let layers: Vec<&LayerRaster> = self
            .plan
            .order
            .iter()
            .map(|k| match *k {
                LayerKind::Background => &self.background,
                LayerKind::Face => &self.face.raster,
                LayerKind::Wisp(i) => &warped[i],
            })
            .collect();
        Ok(composite_frame(self.width, self.height, &layers))
    }

    /// Render every frame, in parallel, in order.
    pub fn render_all(&self) -> Result<Vec<RgbaImage>> {
        (0..self.frame_count())
            .into_par_iter()
            .map(|t| self.render_frame(t))
            .collect()
    }
}

/// Full pipeline: `config.frame_count` frames, the first being the
/// recomposited still.
pub fn render_video(scene: &StillScene, config: &SceneConfig) -> Result<Vec<RgbaImage>> {
    prepare(scene, config)?.render_all()
}

/// [`render_video`] on a dedicated pool of `workers` threads.
pub fn render_video_with_workers(scene: &StillScene, config: &SceneConfig, workers: usize) -> Result<Vec<RgbaImage>> {
    with_workers(workers, || render_video(scene, config))
}

/// Run `f` on a thread pool of the given size.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Contract(format!("cannot start {workers} worker threads: {e}")))?;
    pool.install(f)
}
