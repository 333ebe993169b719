use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Pipeline stage, used to tag errors surfaced by [`crate::pipeline::prepare`]
/// and the command line driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Load,
    Config,
    Extraction,
    Meshing,
    Simulation,
    Warping,
    Compositing,
    Output,
    Diagnose,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Stage::Load => "load",
            Stage::Config => "config",
            Stage::Extraction => "extraction",
            Stage::Meshing => "meshing",
            Stage::Simulation => "simulation",
            Stage::Warping => "warping",
            Stage::Compositing => "compositing",
            Stage::Output => "output",
            Stage::Diagnose => "diagnose",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {path}: expected {expected_w}x{expected_h}, found {found_w}x{found_h}")]
    Dimension {
        path: PathBuf,
        expected_w: u32,
        expected_h: u32,
        found_w: u32,
        found_h: u32,
    },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("wisp mask {index}: {reason}")]
    WispMask { index: usize, reason: String },

    #[error("parse error in {path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("extraction: {0}")]
    Extraction(String),

    #[error("mesh: {0}")]
    Mesh(String),

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("simulation fault at step {step}, mesh {mesh}, vertex {vertex}: non-finite state")]
    SimulationFault {
        step: usize,
        mesh: String,
        vertex: usize,
    },

    #[error("warp: {0}")]
    Warp(String),

    #[error("inpaint: {0}")]
    Inpaint(String),

    #[error("diagnose: {0}")]
    Diagnose(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("[{stage}] {source}")]
    Staged {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn at(self, stage: Stage) -> Self {
        match self {
            staged @ Error::Staged { .. } => staged,
            other => Error::Staged {
                stage,
                source: Box::new(other),
            },
        }
    }

    /// The innermost error, with any stage tag peeled off.
    pub fn root(&self) -> &Error {
        match self {
            Error::Staged { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::Staged { stage, .. } => Some(*stage),
            _ => None,
        }
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, stage: Stage) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: Stage) -> Result<T> {
        self.map_err(|e| e.at(stage))
    }
}
