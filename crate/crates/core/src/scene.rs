//! The still scene: the portrait plus every auxiliary map a segmentation,
//! matting, depth or keypoint model would otherwise have produced.

use std::path::{Path, PathBuf};

use image::RgbaImage;

use crate::error::{Error, Result};
use crate::formats;
use crate::geometry::Vec2;
use crate::raster::{Mask, ScalarMap};

/// Smallest accepted raster side.
pub const MIN_SIDE: u32 = 8;
/// Smallest accepted wisp mask, in pixels.
pub const MIN_WISP_PIXELS: usize = 16;
/// Default share of each wisp mask that must lie on matte support.
pub const DEFAULT_MATTE_COVERAGE: f64 = 0.95;

#[derive(Debug, Clone, PartialEq)]
pub struct StillScene {
    pub image: RgbaImage,
    /// Soft hair matte in `[0, 1]`.
    pub hair_matte: ScalarMap,
    pub wisp_masks: Vec<Mask>,
    /// Open forehead polyline, pixel coordinates.
    pub forehead_contour: Vec<Vec2>,
    /// Relative depth in `[0, 1]`; smaller is nearer the camera.
    pub depth: ScalarMap,
    pub face_mask: Mask,
}

/// Where each scene input lives on disk.
#[derive(Debug, Clone)]
pub struct ScenePaths {
    pub image: PathBuf,
    pub matte: PathBuf,
    /// Label raster or directory of binary rasters.
    pub masks: PathBuf,
    pub contour: PathBuf,
    pub depth: PathBuf,
    pub face: PathBuf,
}

impl ScenePaths {
    pub fn all(&self) -> [(&'static str, &Path); 6] {
        [
            ("image", &self.image),
            ("matte", &self.matte),
            ("masks", &self.masks),
            ("contour", &self.contour),
            ("depth", &self.depth),
            ("face", &self.face),
        ]
    }
}

fn dims_error(path: impl Into<PathBuf>, expected: (u32, u32), found: (u32, u32)) -> Error {
    Error::Dimension {
        path: path.into(),
        expected_w: expected.0,
        expected_h: expected.1,
        found_w: found.0,
        found_h: found.1,
    }
}

impl StillScene {
    /// Assemble and validate a scene from in-memory rasters.
    pub fn new(
        image: RgbaImage,
        hair_matte: ScalarMap,
        wisp_masks: Vec<Mask>,
        forehead_contour: Vec<Vec2>,
        depth: ScalarMap,
        face_mask: Mask,
    ) -> Result<Self> {
        Self::with_coverage(
            image,
            hair_matte,
            wisp_masks,
            forehead_contour,
            depth,
            face_mask,
            DEFAULT_MATTE_COVERAGE,
        )
    }

    pub fn with_coverage(
        image: RgbaImage,
        hair_matte: ScalarMap,
        wisp_masks: Vec<Mask>,
        forehead_contour: Vec<Vec2>,
        depth: ScalarMap,
        face_mask: Mask,
        matte_coverage: f64,
    ) -> Result<Self> {
        let dims = image.dimensions();
        let check = |name: String, d: (u32, u32)| {
            if d == dims {
                Ok(())
            } else {
                Err(dims_error(name, dims, d))
            }
        };
        check("<matte>".into(), hair_matte.dims())?;
        check("<depth>".into(), depth.dims())?;
        check("<face>".into(), face_mask.dims())?;
        for (i, m) in wisp_masks.iter().enumerate() {
            check(format!("<wisp mask {i}>"), m.dims())?;
        }
        let scene = StillScene {
            image,
            hair_matte,
            wisp_masks,
            forehead_contour,
            depth,
            face_mask,
        };
        scene.validate(matte_coverage)?;
        Ok(scene)
    }

    pub fn width(&self) -> u32 {
        self.image.width()
    }

    pub fn height(&self) -> u32 {
        self.image.height()
    }

    /// Pixels where the matte is positive.
    pub fn matte_support(&self) -> Mask {
        self.hair_matte.map(|&v| v > 0.0)
    }

    fn validate(&self, matte_coverage: f64) -> Result<()> {
        let (w, h) = self.image.dimensions();
        if w < MIN_SIDE || h < MIN_SIDE {
            return Err(Error::Validation(format!(
                "scene is {w}x{h}; both sides must be at least {MIN_SIDE}"
            )));
        }
        for (name, map) in [("matte", &self.hair_matte), ("depth", &self.depth)] {
            if map.data().iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::Validation(format!("{name} values must lie in [0, 1]")));
            }
        }
        let support = self.matte_support();
        for (index, m) in self.wisp_masks.iter().enumerate() {
            let n = m.count();
            if n < MIN_WISP_PIXELS {
                return Err(Error::WispMask {
                    index,
                    reason: format!("{n} pixels, need at least {MIN_WISP_PIXELS}"),
                });
            }
            let inside = m.and(&support).count();
            let frac = inside as f64 / n as f64;
            if frac < matte_coverage {
                return Err(Error::WispMask {
                    index,
                    reason: format!(
                        "only {:.1}% of the mask lies on matte support (need {:.1}%)",
                        frac * 100.0,
                        matte_coverage * 100.0
                    ),
                });
            }
        }
        if self.forehead_contour.len() < 2 {
            return Err(Error::Validation(format!(
                "forehead contour has {} points, need at least 2",
                self.forehead_contour.len()
            )));
        }
        for p in &self.forehead_contour {
            if !(p.x >= 0.0 && p.y >= 0.0 && p.x <= (w - 1) as f64 && p.y <= (h - 1) as f64) {
                return Err(Error::Validation(format!(
                    "forehead contour point ({}, {}) lies outside the {w}x{h} image",
                    p.x, p.y
                )));
            }
        }
        Ok(())
    }
}

/// Load and validate a scene from disk.
pub fn load_scene(paths: &ScenePaths) -> Result<StillScene> {
    load_scene_with_coverage(paths, DEFAULT_MATTE_COVERAGE)
}

pub fn load_scene_with_coverage(paths: &ScenePaths, matte_coverage: f64) -> Result<StillScene> {
    let image = formats::load_rgba(&paths.image)?;
    let dims = image.dimensions();
    let expect = |path: &Path, d: (u32, u32)| {
        if d == dims {
            Ok(())
        } else {
            Err(dims_error(path, dims, d))
        }
    };
    let matte = formats::load_scalar(&paths.matte)?;
    expect(&paths.matte, matte.dims())?;
    let masks = formats::load_wisp_masks(&paths.masks)?;
    for m in &masks {
        expect(&paths.masks, m.dims())?;
    }
    let contour = formats::load_polyline(&paths.contour)?;
    let depth = formats::load_scalar(&paths.depth)?;
    expect(&paths.depth, depth.dims())?;
    let face = formats::load_mask(&paths.face)?;
    expect(&paths.face, face.dims())?;
    StillScene::with_coverage(image, matte, masks, contour, depth, face, matte_coverage)
}

/// Write a scene in the layout [`load_scene`] reads. Masks go out as one
/// label raster.
pub fn save_scene(scene: &StillScene, dir: &Path) -> Result<ScenePaths> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let paths = ScenePaths {
        image: dir.join("image.png"),
        matte: dir.join("matte.png"),
        masks: dir.join("masks.png"),
        contour: dir.join("forehead.txt"),
        depth: dir.join("depth.png"),
        face: dir.join("face.png"),
    };
    formats::save_rgba(&paths.image, &scene.image)?;
    formats::save_scalar(&paths.matte, &scene.hair_matte)?;
    formats::save_label_raster(&paths.masks, scene.width(), scene.height(), &scene.wisp_masks)?;
    formats::save_polyline(&paths.contour, &scene.forehead_contour)?;
    formats::save_scalar(&paths.depth, &scene.depth)?;
    formats::save_mask(&paths.face, &scene.face_mask)?;
    Ok(paths)
}
