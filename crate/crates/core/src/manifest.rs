//! Run manifest: resolved config, content digests, timings and per-wisp
//! mesh statistics, written as JSON.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::meshing::{WispClass, WispMesh};
use crate::pipeline::StageTiming;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WispStats {
    pub index: usize,
    pub class: String,
    pub vertices: usize,
    pub edges: usize,
    pub triangles: usize,
    pub pinned: usize,
    pub anchored: bool,
}

impl WispStats {
    pub fn of(index: usize, mesh: &WispMesh) -> Self {
        WispStats {
            index,
            class: match mesh.class {
                WispClass::ScalpConnected => "scalp-connected",
                WispClass::ScalpUnconnected => "scalp-unconnected",
            }
            .to_string(),
            vertices: mesh.vertex_count(),
            edges: mesh.edges.len(),
            triangles: mesh.triangles.len(),
            pinned: mesh.pinned_count(),
            anchored: mesh.anchor.is_some(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingEntry {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: BTreeMap<String, String>,
    pub inputs: BTreeMap<String, FileDigest>,
    pub timings: Vec<TimingEntry>,
    pub wisps: Vec<WispStats>,
    pub frames: Vec<FileDigest>,
    pub workers: usize,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Digest of a file, or of every file inside a directory in name order.
pub fn digest_path(path: &Path) -> Result<String> {
    if path.is_dir() {
        let mut entries: Vec<_> = std::fs::read_dir(path)
            .map_err(|e| Error::io(path, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        entries.sort();
        let mut h = Sha256::new();
        for p in entries {
            let bytes = std::fs::read(&p).map_err(|e| Error::io(&p, e))?;
            h.update(p.file_name().map(|n| n.as_encoded_bytes()).unwrap_or_default());
            h.update(sha256_hex(&bytes));
        }
        Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
    } else {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Ok(sha256_hex(&bytes))
    }
}

impl RunManifest {
    pub fn timings_from(t: &[StageTiming]) -> Vec<TimingEntry> {
        t.iter()
            .map(|t| TimingEntry {
                stage: t.stage.to_string(),
                seconds: t.seconds,
            })
            .collect()
    }

    pub fn frame_digests(&self) -> Vec<&str> {
        self.frames.iter().map(|f| f.sha256.as_str()).collect()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Contract(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            reason: e.to_string(),
        })
    }
}
