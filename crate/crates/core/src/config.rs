//! Simulation and pipeline parameters.
//!
//! Configs come from a flat `key = value` text file, optionally followed by
//! `key=value` overrides. Every key has a default, unknown keys are
//! rejected and the explicit-integrator stability bound
//! `dt < 2·sqrt(m/K)` is enforced here rather than discovered mid-run.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{vec2, Vec2};

#[derive(Debug, Clone, PartialEq)]
pub struct SceneConfig {
    /// Spring constant `K`, force per unit of stretch.
    pub spring_constant: f64,
    /// Mass per vertex `m`.
    pub mass: f64,
    /// Gravity in pixels/s², y down.
    pub gravity: Vec2,
    /// Integrator step, seconds.
    pub dt: f64,
    /// Integrator steps per output frame.
    pub substeps: usize,
    /// Number of output frames `T`.
    pub frame_count: usize,
    /// Initial velocity of every free vertex, pixels/s.
    pub wind_v0: Vec2,
    /// Velocity damping coefficient `c` (force `-c·m·v`). Zero gives the
    /// undamped gravity + spring model.
    pub damping: f64,
    pub grid_n: usize,
    pub grid_n_aux: usize,
    pub poly_degree: usize,
    pub tip_fraction: f64,
    pub tip_min_width_ratio: f64,
    /// TPS bending regularization.
    pub tps_lambda: f64,
    /// Smooth contours and sharpen tips of every wisp mask before meshing.
    pub refine_masks: bool,
}

impl Default for SceneConfig {
    fn default() -> Self {
        SceneConfig {
            spring_constant: 100.0,
            mass: 1.0,
            gravity: vec2(0.0, 200.0),
            dt: 1.0 / 120.0,
            substeps: 4,
            frame_count: 90,
            wind_v0: vec2(40.0, 0.0),
            damping: 0.05,
            grid_n: 6,
            grid_n_aux: 12,
            poly_degree: 3,
            tip_fraction: 0.15,
            tip_min_width_ratio: 0.2,
            tps_lambda: 0.0,
            refine_masks: true,
        }
    }
}

/// Canonical key names, with the short symbol aliases accepted on input.
const KEYS: &[(&str, &[&str])] = &[
    ("spring_constant", &["K"]),
    ("mass", &["m"]),
    ("gravity", &["g"]),
    ("dt", &[]),
    ("substeps", &[]),
    ("frame_count", &["T"]),
    ("wind_v0", &[]),
    ("damping", &["c"]),
    ("grid_n", &[]),
    ("grid_n_aux", &[]),
    ("poly_degree", &["d"]),
    ("tip_fraction", &[]),
    ("tip_min_width_ratio", &[]),
    ("tps_lambda", &["lambda"]),
    ("refine_masks", &[]),
];

fn canonical_key(key: &str) -> Option<&'static str> {
    KEYS.iter()
        .find(|(name, aliases)| *name == key || aliases.contains(&key))
        .map(|(name, _)| *name)
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: expected a number, got {v:?}")))?;
    if !x.is_finite() {
        return Err(Error::Config(format!("{key}: must be finite")));
    }
    Ok(x)
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: expected a non-negative integer, got {v:?}")))
}

fn parse_vec(key: &str, v: &str) -> Result<Vec2> {
    let parts: Vec<&str> = v
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect();
    match parts.as_slice() {
        [x, y] => Ok(vec2(parse_f64(key, x)?, parse_f64(key, y)?)),
        _ => Err(Error::Config(format!("{key}: expected two components \"x, y\", got {v:?}"))),
    }
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected true/false, got {v:?}"))),
    }
}

impl SceneConfig {
    /// Apply defaults for absent keys and check every constraint.
    pub fn from_map(raw: &BTreeMap<String, String>) -> Result<Self> {
        let mut cfg = SceneConfig::default();
        let mut seen = BTreeMap::new();
        for (key, value) in raw {
            let name = canonical_key(key.trim())
                .ok_or_else(|| Error::Config(format!("unknown key {key:?}")))?;
            if let Some(prev) = seen.insert(name, key.clone()) {
                return Err(Error::Config(format!("{key:?} duplicates {prev:?}")));
            }
            cfg.set(name, value)?;
        }
        cfg.check()?;
        Ok(cfg)
    }

    fn set(&mut self, name: &str, value: &str) -> Result<()> {
        match name {
            "spring_constant" => self.spring_constant = parse_f64(name, value)?,
            "mass" => self.mass = parse_f64(name, value)?,
            "gravity" => self.gravity = parse_vec(name, value)?,
            "dt" => self.dt = parse_f64(name, value)?,
            "substeps" => self.substeps = parse_usize(name, value)?,
            "frame_count" => self.frame_count = parse_usize(name, value)?,
            "wind_v0" => self.wind_v0 = parse_vec(name, value)?,
            "damping" => self.damping = parse_f64(name, value)?,
            "grid_n" => self.grid_n = parse_usize(name, value)?,
            "grid_n_aux" => self.grid_n_aux = parse_usize(name, value)?,
            "poly_degree" => self.poly_degree = parse_usize(name, value)?,
            "tip_fraction" => self.tip_fraction = parse_f64(name, value)?,
            "tip_min_width_ratio" => self.tip_min_width_ratio = parse_f64(name, value)?,
            "tps_lambda" => self.tps_lambda = parse_f64(name, value)?,
            "refine_masks" => self.refine_masks = parse_bool(name, value)?,
            _ => unreachable!("canonical key {name}"),
        }
        Ok(())
    }

    pub fn check(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if !(self.spring_constant > 0.0) {
            return fail(format!("spring_constant K must be > 0, got {}", self.spring_constant));
        }
        if !(self.mass > 0.0) {
            return fail(format!("mass m must be > 0, got {}", self.mass));
        }
        if !(self.dt > 0.0) {
            return fail(format!("dt must be > 0, got {}", self.dt));
        }
        let bound = self.stability_bound();
        if self.dt >= bound {
            return fail(format!(
                "dt < 2*sqrt(m/K) violated: dt = {} but bound is {}",
                self.dt, bound
            ));
        }
        if self.frame_count < 1 {
            return fail("frame_count T must be >= 1".into());
        }
        if self.substeps < 1 {
            return fail("substeps must be >= 1".into());
        }
        if !(self.damping >= 0.0) {
            return fail(format!("damping c must be >= 0, got {}", self.damping));
        }
        if self.grid_n < 2 {
            return fail(format!("grid_n must be >= 2, got {}", self.grid_n));
        }
        if self.grid_n_aux < 2 {
            return fail(format!("grid_n_aux must be >= 2, got {}", self.grid_n_aux));
        }
        if self.poly_degree < 1 {
            return fail("poly_degree must be >= 1".into());
        }
        if !(self.tip_fraction > 0.0 && self.tip_fraction < 0.5) {
            return fail(format!("0 < tip_fraction < 0.5 violated: {}", self.tip_fraction));
        }
        if !(self.tip_min_width_ratio > 0.0 && self.tip_min_width_ratio <= 1.0) {
            return fail(format!(
                "0 < tip_min_width_ratio <= 1 violated: {}",
                self.tip_min_width_ratio
            ));
        }
        if !(self.tps_lambda >= 0.0) {
            return fail(format!("tps_lambda must be >= 0, got {}", self.tps_lambda));
        }
        Ok(())
    }

    /// `2·sqrt(m/K)`; `dt` must stay strictly below it.
    pub fn stability_bound(&self) -> f64 {
        2.0 * (self.mass / self.spring_constant).sqrt()
    }

    /// Seconds between output frames.
    pub fn frame_interval(&self) -> f64 {
        self.dt * self.substeps as f64
    }

    /// Canonical key-value form. Floats use the shortest representation
    /// that parses back to the same value, so `from_map(to_map())` is exact.
    pub fn to_map(&self) -> BTreeMap<String, String> {
        let v = |p: &Vec2| format!("{:?}, {:?}", p.x, p.y);
        let entries = [
            ("spring_constant", format!("{:?}", self.spring_constant)),
            ("mass", format!("{:?}", self.mass)),
            ("gravity", v(&self.gravity)),
            ("dt", format!("{:?}", self.dt)),
            ("substeps", self.substeps.to_string()),
            ("frame_count", self.frame_count.to_string()),
            ("wind_v0", v(&self.wind_v0)),
            ("damping", format!("{:?}", self.damping)),
            ("grid_n", self.grid_n.to_string()),
            ("grid_n_aux", self.grid_n_aux.to_string()),
            ("poly_degree", self.poly_degree.to_string()),
            ("tip_fraction", format!("{:?}", self.tip_fraction)),
            ("tip_min_width_ratio", format!("{:?}", self.tip_min_width_ratio)),
            ("tps_lambda", format!("{:?}", self.tps_lambda)),
            ("refine_masks", self.refine_masks.to_string()),
        ];
        entries
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect()
    }
}

/// Default-apply and validate a raw key-value map.
pub fn validate_config(raw: &BTreeMap<String, String>) -> Result<SceneConfig> {
    SceneConfig::from_map(raw)
}

/// Parse `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse_config_text(text: &str, origin: &Path) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            path: origin.to_path_buf(),
            line: n + 1,
            reason: format!("expected \"key = value\", got {line:?}"),
        })?;
        let k = k.trim();
        if canonical_key(k).is_none() {
            return Err(Error::Config(format!(
                "{}:{}: unknown key {k:?}",
                origin.display(),
                n + 1
            )));
        }
        if map.insert(k.to_string(), v.trim().to_string()).is_some() {
            return Err(Error::Parse {
                path: origin.to_path_buf(),
                line: n + 1,
                reason: format!("key {k:?} given twice"),
            });
        }
    }
    Ok(map)
}

/// Load a config file and apply `key=value` overrides on top of it.
pub fn load_config(path: Option<&Path>, overrides: &[String]) -> Result<SceneConfig> {
    let mut raw = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            parse_config_text(&text, p)?
        }
        None => BTreeMap::new(),
    };
    for item in overrides {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override {item:?} is not key=value")))?;
        let name = canonical_key(k.trim())
            .ok_or_else(|| Error::Config(format!("unknown key {:?}", k.trim())))?;
        // An override replaces whichever spelling the file used.
        raw.retain(|key, _| canonical_key(key) != Some(name));
        raw.insert(name.to_string(), v.trim().to_string());
    }
    SceneConfig::from_map(&raw)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn accepts_dt_under_bound() {
        let cfg = validate_config(&map(&[("K", "100"), ("m", "1"), ("dt", "0.01"), ("T", "90")])).unwrap();
        assert_eq!(cfg.frame_count, 90);
        assert_eq!(cfg.stability_bound(), 0.2);
    }

    #[test]
    fn rejects_dt_at_or_over_bound() {
        let err = validate_config(&map(&[("K", "100"), ("m", "1"), ("dt", "0.25")])).unwrap_err();
        assert!(err.to_string().contains("dt < 2*sqrt(m/K)"), "{err}");
        assert!(validate_config(&map(&[("K", "100"), ("m", "1"), ("dt", "0.2")])).is_err());
    }

    #[test]
    fn empty_map_gives_defaults() {
        assert_eq!(validate_config(&BTreeMap::new()).unwrap(), SceneConfig::default());
    }

    #[test]
    fn rejects_bad_values() {
        for (k, v, needle) in [
            ("K", "0", "spring_constant"),
            ("K", "-3", "spring_constant"),
            ("m", "0", "mass"),
            ("tip_fraction", "0.5", "tip_fraction"),
            ("grid_n", "1", "grid_n"),
            ("T", "0", "frame_count"),
            ("bogus", "1", "unknown key"),
        ] {
            let err = validate_config(&map(&[(k, v)])).unwrap_err();
            assert!(err.to_string().contains(needle), "{k}={v}: {err}");
        }
    }

    #[test]
    fn config_text_and_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scene.cfg");
        std::fs::write(&path, "# test\nK = 50\ngravity = 0, 100\n\nT = 12\n").unwrap();
        let cfg = load_config(Some(&path), &["spring_constant=80".into(), "wind_v0=3 4".into()]).unwrap();
        assert_eq!(cfg.spring_constant, 80.0);
        assert_eq!(cfg.gravity, vec2(0.0, 100.0));
        assert_eq!(cfg.wind_v0, vec2(3.0, 4.0));
        assert_eq!(cfg.frame_count, 12);

        std::fs::write(&path, "K = 50\nfoo = 1\n").unwrap();
        assert!(matches!(load_config(Some(&path), &[]), Err(Error::Config(_))));
        std::fs::write(&path, "K 50\n").unwrap();
        assert!(matches!(load_config(Some(&path), &[]), Err(Error::Parse { line: 1, .. })));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn normalization_is_idempotent(
                k in 1.0f64..1e4, m in 0.01f64..10.0, frac in 0.01f64..0.9,
                c in 0.0f64..1.0, gx in -500.0f64..500.0, gy in -500.0f64..500.0,
                tip in 0.01f64..0.49, grid in 2usize..20,
            ) {
                let dt = frac * 2.0 * (m / k).sqrt();
                let raw = map(&[
                    ("K", &format!("{k}")), ("m", &format!("{m}")), ("dt", &format!("{dt}")),
                    ("c", &format!("{c}")), ("g", &format!("{gx} {gy}")),
                    ("tip_fraction", &format!("{tip}")), ("grid_n", &grid.to_string()),
                ]);
                let once = validate_config(&raw).unwrap();
                let twice = validate_config(&once.to_map()).unwrap();
                prop_assert_eq!(once, twice);
            }
        }
    }
}
