use crate::error::Result;
use crate::raster::Mask;

use super::contour::{split_contour, Side};
use super::smoothing::{smooth_contour, PolyCurve};

/// Target number of samples taken along each side contour.
const CONTOUR_SAMPLES: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineParams {
    pub poly_degree: usize,
    pub tip_fraction: f64,
    pub tip_min_width_ratio: f64,
}

impl Default for RefineParams {
    fn default() -> Self {
        RefineParams {
            poly_degree: 3,
            tip_fraction: 0.15,
            tip_min_width_ratio: 0.2,
        }
    }
}

/// Fill row `y` with the pixels whose centers round into
/// `[mid - (width - 1) / 2, mid + (width - 1) / 2]`. Rounding both ends
/// keeps the row's extreme pixels unbiased samples of the curves. A
/// positive width always yields at least one pixel.
fn fill_row(out: &mut Mask, y: i64, mid: f64, width: f64) {
    if width <= 0.0 || !out.in_bounds(0, y) {
        return;
    }
    let half = ((width - 1.0) / 2.0).max(0.0);
    let lo = (mid - half + 0.5).floor() as i64;
    let hi = (mid + half + 0.5).floor() as i64;
    for x in lo.max(0)..=hi.min(out.width() as i64 - 1) {
        out.set(x as u32, y as u32, true);
    }
}

/// Re-rasterize rows `top..=bottom` between two side curves `x = g(y)`.
pub fn rasterize_between(
    width: u32,
    height: u32,
    top: i64,
    bottom: i64,
    left: &PolyCurve,
    right: &PolyCurve,
) -> Mask {
    let mut out = Mask::new(width, height, false);
    for y in top..=bottom {
        let (l, r) = side_extent(left, right, y);
        fill_row(&mut out, y, 0.5 * (l + r), r - l + 1.0);
    }
    out
}

fn side_extent(left: &PolyCurve, right: &PolyCurve, y: i64) -> (f64, f64) {
    let (l, r) = (left.eval(y as f64), right.eval(y as f64));
    if l <= r {
        (l, r)
    } else {
        let m = 0.5 * (l + r);
        (m, m)
    }
}

/// Taper the bottom `tip_fraction` of a wisp toward its midline.
///
/// The tip spans `n = round(tip_fraction · height)` rows. Row `j = 1..=n`
/// below the tip's top boundary is capped at `w_ref · f(j)` where
/// `f(j) = 1 - (1 - ratio) · j / n` and `w_ref` is the curve width on the
/// row just above the tip, so the bottom row ends at `ratio · w_ref`. Rows
/// already narrower than their cap keep their width, which makes
/// sharpening an already sharpened tip a no-op. Rows above the tip are
/// re-rasterized from the curves unchanged.
pub fn sharpen_tip(
    mask: &Mask,
    left: &PolyCurve,
    right: &PolyCurve,
    tip_fraction: f64,
    tip_min_width_ratio: f64,
) -> Mask {
    let Some(bb) = mask.bbox() else {
        return mask.clone();
    };
    let (top, bottom) = (bb.min_y as i64, bb.max_y as i64);
    let height = (bottom - top + 1) as f64;
    let n = ((tip_fraction * height).round() as i64).clamp(1, bottom - top + 1);
    let tip_top = bottom - n;
    let (rl, rr) = side_extent(left, right, tip_top.max(top));
    let w_ref = rr - rl + 1.0;

    let mut out = Mask::new(mask.width(), mask.height(), false);
    for y in top..=bottom {
        let (l, r) = side_extent(left, right, y);
        let mid = 0.5 * (l + r);
        let mut width = r - l + 1.0;
        let j = y - tip_top;
        if j >= 1 && tip_min_width_ratio < 1.0 {
            let f = 1.0 - (1.0 - tip_min_width_ratio) * j as f64 / n as f64;
            width = width.min(w_ref * f);
        }
        fill_row(&mut out, y, mid, width);
    }
    out
}

fn subsample<T: Copy>(v: &[T]) -> Vec<T> {
    if v.len() <= CONTOUR_SAMPLES {
        return v.to_vec();
    }
    // Evenly spaced indices that always include both ends.
    let last = v.len() - 1;
    let mut idx: Vec<usize> = (0..CONTOUR_SAMPLES)
        .map(|k| (k * last + (CONTOUR_SAMPLES - 1) / 2) / (CONTOUR_SAMPLES - 1))
        .collect();
    idx.dedup();
    idx.into_iter().map(|i| v[i]).collect()
}

/// Full shape refinement: largest component, left/right contour split,
/// polynomial smoothing of both sides and tip sharpening.
///
/// Wisps whose bounding box is more than twice as wide as tall are refined
/// in transposed space, so the fitted parameter runs along the wisp.
pub fn refine_wisp(mask: &Mask, params: &RefineParams) -> Result<Mask> {
    let Some(core) = mask.largest_component() else {
        return Ok(mask.clone());
    };
    let bb = core.bbox().expect("non-empty");
    if bb.width() > 2 * bb.height() {
        return Ok(refine_vertical(&core.transposed(), params)?.transposed());
    }
    refine_vertical(&core, params)
}

fn refine_vertical(mask: &Mask, params: &RefineParams) -> Result<Mask> {
    let pair = split_contour(mask)?;
    if pair.top.1 == pair.bottom.1 {
        // Single-row wisp: nothing to smooth along.
        return Ok(mask.clone());
    }
    // The tip gets reshaped anyway; fitting only the body keeps a second
    // refinement from bending the curves toward the previous taper.
    let top = pair.top.1;
    let rows = pair.bottom.1 - top + 1;
    let tip_rows = ((params.tip_fraction * rows as f64).round() as i64).clamp(0, rows - 2);
    let body_end = pair.bottom.1 - tip_rows;
    let body = |side| {
        let mut s = pair.row_samples(side);
        s.retain(|p| p.y <= body_end as f64);
        subsample(&s)
    };
    let left = smooth_contour(&body(Side::Left), params.poly_degree)?;
    let right = smooth_contour(&body(Side::Right), params.poly_degree)?;
    Ok(sharpen_tip(
        mask,
        &left,
        &right,
        params.tip_fraction,
        params.tip_min_width_ratio,
    ))
}
