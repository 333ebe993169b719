//! Mass-spring dynamics for wisp meshes.
//!
//! Every mesh edge is a Hookean spring. Free vertices feel gravity, their
//! springs and an optional linear drag, and are advanced with semi-implicit
//! Euler (velocity first, then position from the new velocity). Pinned
//! vertices never move. The anchored vertex of a scalp-unconnected wisp
//! copies the displacement of the auxiliary mesh at its bound triangle.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::config::SceneConfig;
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::meshing::WispMesh;

/// Springs shorter than this contribute no force.
pub const COINCIDENT_EPS: f64 = 1e-9;

/// Positions and velocities of one mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshState {
    pub positions: Vec<Vec2>,
    pub velocities: Vec<Vec2>,
}

impl MeshState {
    /// Rest positions with `v0` on free vertices and zero elsewhere.
    pub fn rest(mesh: &WispMesh, v0: Vec2) -> Self {
        let anchored = mesh.anchor.map(|a| a.vertex);
        let velocities = (0..mesh.vertex_count())
            .map(|i| {
                if mesh.pinned[i] || Some(i) == anchored {
                    Vec2::zeros()
                } else {
                    v0
                }
            })
            .collect();
        MeshState {
            positions: mesh.vertices.clone(),
            velocities,
        }
    }

    /// Largest distance of any vertex from `other`'s position.
    pub fn max_displacement(&self, other: &MeshState) -> f64 {
        self.positions
            .iter()
            .zip(&other.positions)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// State of every wisp mesh plus the auxiliary mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub meshes: Vec<MeshState>,
    pub aux: Option<MeshState>,
    /// Seconds since the start of the simulation.
    pub time: f64,
    pub step: usize,
}

impl SimState {
    pub fn rest(meshes: &[WispMesh], aux: Option<&WispMesh>, v0: Vec2) -> Self {
        SimState {
            meshes: meshes.iter().map(|m| MeshState::rest(m, v0)).collect(),
            aux: aux.map(|m| MeshState::rest(m, v0)),
            time: 0.0,
            step: 0,
        }
    }
}

/// Hooke force on vertex `i` from all its springs.
pub fn spring_force(i: usize, positions: &[Vec2], mesh: &WispMesh, k: f64) -> Vec2 {
    let xi = positions[i];
    let mut f = Vec2::zeros();
    for &(j, e) in mesh.neighbors(i) {
        let d = positions[j] - xi;
        let len = d.norm();
        if len < COINCIDENT_EPS {
            continue;
        }
        f += d * (k * (len - mesh.edges[e].rest_length) / len);
    }
    f
}

/// Gravity plus springs minus drag `c·m·v`.
pub fn accumulate_force(i: usize, state: &MeshState, mesh: &WispMesh, config: &SceneConfig) -> Vec2 {
    let m = config.mass;
    config.gravity * m + spring_force(i, &state.positions, mesh, config.spring_constant)
        - state.velocities[i] * (config.damping * m)
}

fn check_finite(state: &MeshState, step: usize, name: impl Fn() -> String) -> Result<()> {
    let bad = state
        .positions
        .iter()
        .zip(&state.velocities)
        .position(|(x, v)| !(x.iter().all(|c| c.is_finite()) && v.iter().all(|c| c.is_finite())));
    match bad {
        Some(vertex) => Err(Error::SimulationFault {
            step,
            mesh: name(),
            vertex,
        }),
        None => Ok(()),
    }
}

/// Integrate the free vertices of one mesh by `dt`. Pinned and anchored
/// vertices are copied through unchanged.
fn integrate(mesh: &WispMesh, state: &MeshState, config: &SceneConfig) -> MeshState {
    let dt = config.dt;
    let anchored = mesh.anchor.map(|a| a.vertex);
    let mut next = state.clone();
    for i in 0..mesh.vertex_count() {
        if mesh.pinned[i] || Some(i) == anchored {
            continue;
        }
        let a = accumulate_force(i, state, mesh, config) / config.mass;
        let v = state.velocities[i] + a * dt;
        next.velocities[i] = v;
        next.positions[i] = state.positions[i] + v * dt;
    }
    next
}

/// Move the anchored vertex by the displacement of its auxiliary triangle.
fn transfer_anchor(
    mesh: &WispMesh,
    next: &mut MeshState,
    prev: &MeshState,
    aux_mesh: &WispMesh,
    aux_now: &MeshState,
    dt: f64,
) {
    let Some(anchor) = mesh.anchor else { return };
    let mut shift = Vec2::zeros();
    for k in 0..3 {
        let j = anchor.aux_vertices[k];
        shift += (aux_now.positions[j] - aux_mesh.vertices[j]) * anchor.weights[k];
    }
    let i = anchor.vertex;
    next.positions[i] = mesh.vertices[i] + shift;
    next.velocities[i] = (next.positions[i] - prev.positions[i]) / dt;
}

/// Advance every mesh by one integrator step of `config.dt`.
///
/// The auxiliary mesh is stepped first; wisp meshes then step in parallel,
/// each reading only the previous state, so the result does not depend on
/// the thread count.
pub fn step(
    state: &SimState,
    meshes: &[WispMesh],
    aux: Option<&WispMesh>,
    config: &SceneConfig,
) -> Result<SimState> {
    if state.meshes.len() != meshes.len() {
        return Err(Error::Contract(format!(
            "state holds {} meshes, {} given",
            state.meshes.len(),
            meshes.len()
        )));
    }
    let next_step = state.step + 1;
    let aux_next = match (aux, &state.aux) {
        (Some(m), Some(s)) => {
            let n = integrate(m, s, config);
            check_finite(&n, next_step, || "aux".into())?;
            Some(n)
        }
        (None, None) => None,
        _ => return Err(Error::Contract("auxiliary mesh and its state must come together".into())),
    };
    let next: Vec<MeshState> = meshes
        .par_iter()
        .zip(state.meshes.par_iter())
        .enumerate()
        .map(|(k, (mesh, prev))| {
            let mut n = integrate(mesh, prev, config);
            if mesh.anchor.is_some() {
                let (Some(am), Some(an)) = (aux, aux_next.as_ref()) else {
                    return Err(Error::Contract(format!("wisp {k} is anchored but no auxiliary mesh was given")));
                };
                transfer_anchor(mesh, &mut n, prev, am, an, config.dt);
            }
            check_finite(&n, next_step, || format!("wisp {k}"))?;
            Ok(n)
        })
        .collect::<Result<_>>()?;
    Ok(SimState {
        meshes: next,
        aux: aux_next,
        time: next_step as f64 * config.dt,
        step: next_step,
    })
}

/// Snapshots at every output frame, starting with the rest pose.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub frames: Vec<SimState>,
    /// Seconds between consecutive frames.
    pub frame_interval: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Largest vertex displacement from the rest pose in each frame.
    pub fn max_displacements(&self) -> Vec<f64> {
        let Some(rest) = self.frames.first() else {
            return Vec::new();
        };
        self.frames
            .iter()
            .map(|f| {
                f.meshes
                    .iter()
                    .zip(&rest.meshes)
                    .map(|(a, b)| a.max_displacement(b))
                    .fold(0.0, f64::max)
            })
            .collect()
    }

    /// Text dump: the triangles of each wisp mesh (`f k a b c`), then one
    /// `frame t` block per snapshot with a `k i x y` line per vertex.
    pub fn to_dump_text(&self, meshes: &[WispMesh]) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "meshes {}", meshes.len());
        for (k, m) in meshes.iter().enumerate() {
            let _ = writeln!(out, "mesh {k} {} {}", m.vertex_count(), m.triangles.len());
            for t in &m.triangles {
                let _ = writeln!(out, "f {k} {} {} {}", t[0], t[1], t[2]);
            }
        }
        for (t, frame) in self.frames.iter().enumerate() {
            let _ = writeln!(out, "frame {t}");
            for (k, s) in frame.meshes.iter().enumerate() {
                for (i, p) in s.positions.iter().enumerate() {
                    let _ = writeln!(out, "{k} {i} {:?} {:?}", p.x, p.y);
                }
            }
        }
        out
    }

    pub fn write_dump(&self, meshes: &[WispMesh], path: &Path) -> Result<()> {
        std::fs::write(path, self.to_dump_text(meshes)).map_err(|e| Error::io(path, e))
    }
}

/// Run the full simulation: `frame_count` snapshots `substeps` steps apart.
pub fn simulate(meshes: &[WispMesh], aux: Option<&WispMesh>, config: &SceneConfig) -> Result<Trajectory> {
    let mut state = SimState::rest(meshes, aux, config.wind_v0);
    let mut frames = Vec::with_capacity(config.frame_count);
    frames.push(state.clone());
    while frames.len() < config.frame_count {
        for _ in 0..config.substeps {
            state = step(&state, meshes, aux, config)?;
        }
        frames.push(state.clone());
    }
    Ok(Trajectory {
        frames,
        frame_interval: config.frame_interval(),
    })
}

/// Trajectory dump read back from text.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryDump {
    /// Triangles per wisp mesh.
    pub triangles: Vec<Vec<[usize; 3]>>,
    /// `frames[t][k][i]` is vertex `i` of mesh `k` in frame `t`.
    pub frames: Vec<Vec<Vec<Vec2>>>,
}

impl TrajectoryDump {
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let err = |line: usize, reason: &str| Error::Parse {
            path: origin.to_path_buf(),
            line,
            reason: reason.to_string(),
        };
        let mut counts: Vec<usize> = Vec::new();
        let mut triangles: Vec<Vec<[usize; 3]>> = Vec::new();
        let mut frames: Vec<Vec<Vec<Vec2>>> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let tok: Vec<&str> = raw.split_whitespace().collect();
            let num = |s: &str| s.parse::<usize>().map_err(|_| err(line, "expected an integer"));
            let real = |s: &str| s.parse::<f64>().map_err(|_| err(line, "expected a number"));
            match tok.as_slice() {
                [] => {}
                ["meshes", n] => {
                    let n = num(n)?;
                    counts = vec![0; n];
                    triangles = vec![Vec::new(); n];
                }
                ["mesh", k, nv, _nt] => {
                    let k = num(k)?;
                    *counts.get_mut(k).ok_or_else(|| err(line, "mesh index out of range"))? = num(nv)?;
                }
                ["f", k, a, b, c] => {
                    let k = num(k)?;
                    let tri = [num(a)?, num(b)?, num(c)?];
                    if tri.iter().any(|&v| v >= counts.get(k).copied().unwrap_or(0)) {
                        return Err(err(line, "triangle references a missing vertex"));
                    }
                    triangles[k].push(tri);
                }
                ["frame", t] => {
                    if num(t)? != frames.len() {
                        return Err(err(line, "frames out of order"));
                    }
                    frames.push(counts.iter().map(|&c| vec![Vec2::new(f64::NAN, f64::NAN); c]).collect());
                }
                [k, i, x, y] => {
                    let frame = frames.last_mut().ok_or_else(|| err(line, "vertex before first frame"))?;
                    let (k, i) = (num(k)?, num(i)?);
                    let slot = frame
                        .get_mut(k)
                        .and_then(|m| m.get_mut(i))
                        .ok_or_else(|| err(line, "vertex index out of range"))?;
                    *slot = Vec2::new(real(x)?, real(y)?);
                }
                _ => return Err(err(line, "unrecognized line")),
            }
        }
        for (t, f) in frames.iter().enumerate() {
            if f.iter().flatten().any(|p| p.x.is_nan()) {
                return Err(Error::Parse {
                    path: origin.to_path_buf(),
                    line: 0,
                    reason: format!("frame {t} is missing vertices"),
                });
            }
        }
        Ok(TrajectoryDump { triangles, frames })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }
}
