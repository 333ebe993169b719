use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::Vec2;

/// Least-squares polynomial `value = g(param)`.
///
/// Internally the parameter is shifted and scaled to `[-1, 1]` before the
/// Vandermonde solve; [`PolyCurve::coefficients`] converts back to the
/// monomial basis in the raw parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCurve {
    scaled: Vec<f64>,
    center: f64,
    half_range: f64,
}

impl PolyCurve {
    /// Fit `values[i] ≈ g(params[i])` with `deg(g) ≤ degree`. With fewer
    /// than `degree + 1` distinct parameters the degree drops to fit.
    pub fn fit(params: &[f64], values: &[f64], degree: usize) -> Result<PolyCurve> {
        assert_eq!(params.len(), values.len());
        if params.is_empty() {
            return Err(Error::Extraction("no contour samples".into()));
        }
        let lo = params.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = params.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(hi > lo) {
            return Err(Error::Extraction(
                "degenerate contour: all samples share one coordinate".into(),
            ));
        }
        let mut distinct: Vec<f64> = params.to_vec();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        let degree = degree.min(distinct.len() - 1);

        let center = 0.5 * (lo + hi);
        let half_range = 0.5 * (hi - lo);
        let n = params.len();
        let a = DMatrix::from_fn(n, degree + 1, |i, k| {
            ((params[i] - center) / half_range).powi(k as i32)
        });
        let b = DVector::from_column_slice(values);
        let sol = a
            .svd(true, true)
            .solve(&b, 1e-14)
            .map_err(|e| Error::Extraction(format!("polynomial fit failed: {e}")))?;
        Ok(PolyCurve {
            scaled: sol.iter().copied().collect(),
            center,
            half_range,
        })
    }

    pub fn degree(&self) -> usize {
        self.scaled.len() - 1
    }

    pub fn eval(&self, t: f64) -> f64 {
        let s = (t - self.center) / self.half_range;
        self.scaled.iter().rev().fold(0.0, |acc, c| acc * s + c)
    }

    /// Monomial coefficients `c[k]` of `t^k` in the raw parameter.
    pub fn coefficients(&self) -> Vec<f64> {
        // g(t) = Σ a_k ((t - c)/h)^k, expanded binomially.
        let d = self.degree();
        let mut out = vec![0.0; d + 1];
        for (k, a) in self.scaled.iter().enumerate() {
            let scale = a / self.half_range.powi(k as i32);
            let mut binom = 1.0;
            for j in 0..=k {
                out[j] += scale * binom * (-self.center).powi((k - j) as i32);
                binom = binom * (k - j) as f64 / (j + 1) as f64;
            }
        }
        out
    }

    /// Largest absolute residual over the given samples.
    pub fn max_residual(&self, params: &[f64], values: &[f64]) -> f64 {
        params
            .iter()
            .zip(values)
            .map(|(t, v)| (self.eval(*t) - v).abs())
            .fold(0.0, f64::max)
    }
}

/// Fit `x = g(y)` through contour samples given as `(x, y)` points.
pub fn smooth_contour(samples: &[Vec2], degree: usize) -> Result<PolyCurve> {
    let ys: Vec<f64> = samples.iter().map(|p| p.y).collect();
    let xs: Vec<f64> = samples.iter().map(|p| p.x).collect();
    PolyCurve::fit(&ys, &xs, degree)
}
