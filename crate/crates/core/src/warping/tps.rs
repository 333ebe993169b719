use nalgebra::{DMatrix, LU};

use crate::error::{Error, Result};
use crate::geometry::Vec2;

/// Regularization used when the exact system is singular.
pub const FALLBACK_LAMBDA: f64 = 1e-6;

/// Pivots smaller than this, relative to the largest, count as zero.
const PIVOT_RTOL: f64 = 1e-13;

/// `r² ln r²`, continuous at zero.
pub fn tps_kernel(r2: f64) -> f64 {
    if r2 <= 0.0 {
        0.0
    } else {
        r2 * r2.ln()
    }
}

/// Thin plate spline `f(p) = a + A·p + Σ wᵢ U(‖p − cᵢ‖)`.
///
/// Control points are centered and scaled to unit RMS radius before the
/// solve. With exact interpolation this changes only the conditioning of
/// the system, not the fitted map; weights and the affine part are stored
/// in those normalized coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct TpsModel {
    controls: Vec<Vec2>,
    /// Controls in normalized coordinates.
    unit_controls: Vec<Vec2>,
    weights: Vec<Vec2>,
    /// Columns: constant, x, y of the normalized coordinates.
    affine: [Vec2; 3],
    center: Vec2,
    scale: f64,
    lambda: f64,
    degenerate: bool,
}

fn solve(unit: &[Vec2], targets: &[Vec2], lambda: f64) -> Option<(Vec<Vec2>, [Vec2; 3])> {
    let n = unit.len();
    let size = n + 3;
    let mut a = DMatrix::<f64>::zeros(size, size);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = tps_kernel((unit[i] - unit[j]).norm_squared());
        }
        a[(i, i)] += lambda;
        let row = [1.0, unit[i].x, unit[i].y];
        for (c, v) in row.into_iter().enumerate() {
            a[(i, n + c)] = v;
            a[(n + c, i)] = v;
        }
    }
    let mut b = DMatrix::<f64>::zeros(size, 2);
    for (i, t) in targets.iter().enumerate() {
        b[(i, 0)] = t.x;
        b[(i, 1)] = t.y;
    }
    let lu = LU::new(a);
    let u = lu.u();
    let diag: Vec<f64> = (0..size).map(|i| u[(i, i)].abs()).collect();
    let top = diag.iter().cloned().fold(0.0, f64::max);
    if !(top > 0.0) || diag.iter().any(|&d| d <= PIVOT_RTOL * top) {
        return None;
    }
    let x = lu.solve(&b)?;
    if x.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let weights = (0..n).map(|i| Vec2::new(x[(i, 0)], x[(i, 1)])).collect();
    let affine = [0, 1, 2].map(|c| Vec2::new(x[(n + c, 0)], x[(n + c, 1)]));
    Some((weights, affine))
}

/// Fit a spline mapping each `source[i]` to `target[i]`.
///
/// A singular system (duplicate or collinear sources) is retried once
/// with [`FALLBACK_LAMBDA`] and the model flagged degenerate.
pub fn tps_fit(source: &[Vec2], target: &[Vec2], lambda: f64) -> Result<TpsModel> {
    if source.len() != target.len() {
        return Err(Error::Warp(format!(
            "{} sources but {} targets",
            source.len(),
            target.len()
        )));
    }
    if source.len() < 3 {
        return Err(Error::Warp(format!("need at least 3 control points, got {}", source.len())));
    }
    if !(lambda >= 0.0) {
        return Err(Error::Warp(format!("lambda must be >= 0, got {lambda}")));
    }
    if source.iter().chain(target).any(|p| !(p.x.is_finite() && p.y.is_finite())) {
        return Err(Error::Warp("non-finite control point".into()));
    }
    let n = source.len() as f64;
    let center = source.iter().sum::<Vec2>() / n;
    let rms = (source.iter().map(|p| (p - center).norm_squared()).sum::<f64>() / n).sqrt();
    let scale = if rms > 0.0 { rms } else { 1.0 };
    let unit: Vec<Vec2> = source.iter().map(|p| (p - center) / scale).collect();

    let (solution, lambda, degenerate) = match solve(&unit, target, lambda) {
        Some(s) => (s, lambda, false),
        None => {
            let fallback = lambda.max(FALLBACK_LAMBDA);
            match solve(&unit, target, fallback) {
                Some(s) => (s, fallback, true),
                None => {
                    return Err(Error::Warp(
                        "thin plate spline system is singular (collinear control points?)".into(),
                    ))
                }
            }
        }
    };
    let (weights, affine) = solution;
    Ok(TpsModel {
        controls: source.to_vec(),
        unit_controls: unit,
        weights,
        affine,
        center,
        scale,
        lambda,
        degenerate,
    })
}

impl TpsModel {
    pub fn eval(&self, p: Vec2) -> Vec2 {
        let q = (p - self.center) / self.scale;
        let mut out = self.affine[0] + self.affine[1] * q.x + self.affine[2] * q.y;
        for (c, w) in self.unit_controls.iter().zip(&self.weights) {
            out += w * tps_kernel((q - c).norm_squared());
        }
        out
    }

    pub fn controls(&self) -> &[Vec2] {
        &self.controls
    }

    /// Radial weights, in normalized coordinates.
    pub fn radial_weights(&self) -> &[Vec2] {
        &self.weights
    }

    /// Largest absolute radial weight component.
    pub fn max_radial_weight(&self) -> f64 {
        self.weights.iter().map(|w| w.amax()).fold(0.0, f64::max)
    }

    /// `(Σw, Σw·x, Σw·y)` over the normalized controls, each a 2-vector;
    /// all vanish for a well-posed fit.
    pub fn side_condition_residuals(&self) -> [Vec2; 3] {
        let mut r = [Vec2::zeros(); 3];
        for (c, w) in self.unit_controls.iter().zip(&self.weights) {
            r[0] += w;
            r[1] += w * c.x;
            r[2] += w * c.y;
        }
        r
    }

    /// Linear part and offset of the affine term in pixel coordinates:
    /// `p ↦ m·p + b`.
    pub fn affine_part(&self) -> (nalgebra::Matrix2<f64>, Vec2) {
        let m = nalgebra::Matrix2::from_columns(&[self.affine[1], self.affine[2]]) / self.scale;
        let b = self.affine[0] - m * self.center;
        (m, b)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// True when the exact system was singular and the regularized
    /// fallback was used.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }
}
