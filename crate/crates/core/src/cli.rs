//! Command line front end: `animate`, `annotate` and `diagnose`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::config::load_config;
use crate::diagnose::{run_diagnose, DiagnoseReport};
use crate::error::{Error, Result, Stage, StageExt};
use crate::extraction::{refine_wisp, sketch_fill_all, RefineParams, Stroke};
use crate::formats::{load_polyline, load_scalar, save_label_raster, save_rgba};
use crate::manifest::{digest_path, sha256_hex, FileDigest, RunManifest, WispStats};
use crate::pipeline::{prepare, with_workers};
use crate::scene::{load_scene, ScenePaths};

#[derive(Debug, Parser)]
#[command(name = "cinewisp", version, about = "Animate hair wisps in a still portrait")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a cinemagraph frame sequence from a still and its maps.
    Animate(AnimateArgs),
    /// Turn strokes drawn on a hair matte into a wisp label raster.
    Annotate(AnnotateArgs),
    /// Measure warping self-consistency of a rendered sequence.
    Diagnose(DiagnoseArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// `key = value` config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override one config key; applied after the file. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct AnimateArgs {
    #[arg(long)]
    pub image: PathBuf,
    /// Soft hair matte (grayscale).
    #[arg(long)]
    pub matte: PathBuf,
    /// Wisp label raster, or a directory of binary masks.
    #[arg(long)]
    pub masks: PathBuf,
    /// Forehead polyline, one `x y` pair per line.
    #[arg(long)]
    pub contour: PathBuf,
    /// Relative depth (grayscale, smaller is nearer).
    #[arg(long)]
    pub depth: PathBuf,
    /// Binary face mask.
    #[arg(long)]
    pub face: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Output directory for frames, manifest and trajectory.
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads; output does not depend on it.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Clone, Args)]
pub struct AnnotateArgs {
    #[arg(long)]
    pub matte: PathBuf,
    /// Stroke polylines, one file per wisp, in priority order.
    #[arg(long, num_args = 1.., required = true)]
    pub strokes: Vec<PathBuf>,
    /// Output label raster.
    #[arg(long)]
    pub out: PathBuf,
    /// Keep the raw fills, skipping shape refinement.
    #[arg(long)]
    pub no_refine: bool,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DiagnoseArgs {
    /// Directory holding `frame_NNNN.png`.
    #[arg(long)]
    pub frames: PathBuf,
    /// Trajectory dump written by `animate`.
    #[arg(long)]
    pub trajectory: PathBuf,
    /// Also write the report as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

pub const MANIFEST_FILE: &str = "manifest.json";
pub const TRAJECTORY_FILE: &str = "trajectory.txt";

pub fn frame_name(t: usize) -> String {
    format!("frame_{:04}.png", t + 1)
}

/// Frames rendered and written per parallel batch.
const BATCH: usize = 8;

/// Render the full sequence into `args.out`; returns the manifest.
pub fn run_animate(args: &AnimateArgs) -> Result<RunManifest> {
    let config = load_config(args.config.config.as_deref(), &args.config.set).stage(Stage::Config)?;
    let paths = ScenePaths {
        image: args.image.clone(),
        matte: args.matte.clone(),
        masks: args.masks.clone(),
        contour: args.contour.clone(),
        depth: args.depth.clone(),
        face: args.face.clone(),
    };
    let scene = load_scene(&paths).stage(Stage::Load)?;
    let mut inputs = BTreeMap::new();
    for (name, path) in paths.all() {
        let sha256 = digest_path(path).stage(Stage::Load)?;
        inputs.insert(
            name.to_string(),
            FileDigest {
                file: path.display().to_string(),
                sha256,
            },
        );
    }
    if let Some(c) = &args.config.config {
        inputs.insert(
            "config".into(),
            FileDigest {
                file: c.display().to_string(),
                sha256: digest_path(c).stage(Stage::Load)?,
            },
        );
    }
    std::fs::create_dir_all(&args.out)
        .map_err(|e| Error::io(&args.out, e))
        .stage(Stage::Output)?;

    with_workers(args.workers, || {
        let prepared = prepare(&scene, &config)?;
        prepared
            .trajectory
            .write_dump(&prepared.meshes, &args.out.join(TRAJECTORY_FILE))
            .stage(Stage::Output)?;
        let mut frames = Vec::with_capacity(prepared.frame_count());
        let start = std::time::Instant::now();
        let total = prepared.frame_count();
        for batch in (0..total).collect::<Vec<_>>().chunks(BATCH) {
            let written: Vec<FileDigest> = batch
                .par_iter()
                .map(|&t| {
                    let img = prepared.render_frame(t)?;
                    let name = frame_name(t);
                    let path = args.out.join(&name);
                    save_rgba(&path, &img).stage(Stage::Output)?;
                    let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e)).stage(Stage::Output)?;
                    Ok(FileDigest {
                        file: name,
                        sha256: sha256_hex(&bytes),
                    })
                })
                .collect::<Result<_>>()?;
            frames.extend(written);
            log::info!("rendered {}/{} frames", frames.len(), total);
        }
        let mut timings = RunManifest::timings_from(&prepared.timings);
        timings.push(crate::manifest::TimingEntry {
            stage: "render".into(),
            seconds: start.elapsed().as_secs_f64(),
        });
        let manifest = RunManifest {
            config: config.to_map(),
            inputs,
            timings,
            wisps: prepared
                .meshes
                .iter()
                .enumerate()
                .map(|(k, m)| WispStats::of(k, m))
                .collect(),
            frames,
            workers: args.workers,
        };
        manifest.write(&args.out.join(MANIFEST_FILE)).stage(Stage::Output)?;
        Ok(manifest)
    })
}

/// Fill each stroke on the matte, refine, and write a label raster.
/// Returns the number of labelled pixels per wisp.
pub fn run_annotate(args: &AnnotateArgs) -> Result<Vec<usize>> {
    let config = load_config(args.config.config.as_deref(), &args.config.set).stage(Stage::Config)?;
    let matte = load_scalar(&args.matte).stage(Stage::Load)?;
    let strokes = args
        .strokes
        .iter()
        .map(|p| load_polyline(p).map(|points| Stroke { points }))
        .collect::<Result<Vec<_>>>()
        .stage(Stage::Load)?;
    let mut masks = sketch_fill_all(&strokes, &matte).stage(Stage::Extraction)?;
    if !args.no_refine {
        let params = RefineParams {
            poly_degree: config.poly_degree,
            tip_fraction: config.tip_fraction,
            tip_min_width_ratio: config.tip_min_width_ratio,
        };
        masks = masks
            .iter()
            .enumerate()
            .map(|(i, m)| {
                refine_wisp(m, &params).map_err(|e| Error::WispMask {
                    index: i,
                    reason: format!("stroke {i}: {e}"),
                })
            })
            .collect::<Result<_>>()
            .stage(Stage::Extraction)?;
    }
    let (w, h) = matte.dims();
    save_label_raster(&args.out, w, h, &masks).stage(Stage::Output)?;
    Ok(masks.iter().map(|m| m.count()).collect())
}

pub fn run_diagnose_cmd(args: &DiagnoseArgs) -> Result<DiagnoseReport> {
    let report = run_diagnose(&args.frames, &args.trajectory).stage(Stage::Diagnose)?;
    if let Some(p) = &args.json {
        write_json(p, &report).stage(Stage::Output)?;
    }
    Ok(report)
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Contract(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

/// Parse `argv`, run the command and return the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = match &cli.command {
        Command::Animate(a) => run_animate(a).map(|m| {
            println!("wrote {} frames to {}", m.frames.len(), a.out.display());
        }),
        Command::Annotate(a) => run_annotate(a).map(|counts| {
            println!("wrote {} wisps to {}", counts.len(), a.out.display());
        }),
        Command::Diagnose(a) => run_diagnose_cmd(a).map(|r| print!("{}", r.to_text())),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
