use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::raster::{bresenham, Mask, ScalarMap};

/// A user stroke running roughly from a wisp's root to its tip.
#[derive(Debug, Clone, PartialEq)]
pub struct Stroke {
    pub points: Vec<Vec2>,
}

impl Stroke {
    pub fn new(points: Vec<Vec2>) -> Self {
        Stroke { points }
    }

    fn check(&self, width: u32, height: u32) -> Result<()> {
        if self.points.len() < 2 {
            return Err(Error::Extraction(format!(
                "stroke needs at least 2 points, got {}",
                self.points.len()
            )));
        }
        for p in &self.points {
            if !(p.x >= 0.0 && p.y >= 0.0 && p.x <= (width - 1) as f64 && p.y <= (height - 1) as f64) {
                return Err(Error::Extraction(format!(
                    "stroke point ({}, {}) outside the {width}x{height} image",
                    p.x, p.y
                )));
            }
        }
        Ok(())
    }

    /// Pixels hit by the polyline, in drawing order, without repeats.
    pub fn pixels(&self) -> Vec<(i64, i64)> {
        let rounded: Vec<(i64, i64)> = self
            .points
            .iter()
            .map(|p| (p.x.round() as i64, p.y.round() as i64))
            .collect();
        let mut out: Vec<(i64, i64)> = Vec::new();
        for seg in rounded.windows(2) {
            for px in bresenham(seg[0], seg[1]) {
                if out.last() != Some(&px) {
                    out.push(px);
                }
            }
        }
        out
    }
}

// Up, down, right. Leaving out the left neighbor keeps the fill from
// spilling across the stroke's left edge.
const FILL_DIRS: [(i64, i64); 3] = [(0, -1), (0, 1), (1, 0)];

/// Fill one stroke on its own.
pub fn sketch_fill(stroke: &Stroke, matte: &ScalarMap) -> Result<Mask> {
    sketch_fill_all(std::slice::from_ref(stroke), matte)
        .map(|mut v| v.pop().expect("one stroke"))
        .map_err(|e| match e {
            Error::WispMask { reason, .. } => Error::Extraction(reason),
            other => other,
        })
}

/// Fill every stroke in input order.
///
/// First every stroke reserves its own rasterized pixels (earlier strokes
/// win on overlap), then each stroke flood-fills from its reserved pixels
/// moving only up, down or right, over matte support not yet claimed.
/// A stroke with no pixel on the matte is reported by index.
pub fn sketch_fill_all(strokes: &[Stroke], matte: &ScalarMap) -> Result<Vec<Mask>> {
    let (w, h) = matte.dims();
    const FREE: usize = usize::MAX;
    let mut owner = vec![FREE; w as usize * h as usize];
    let idx = |x: i64, y: i64| y as usize * w as usize + x as usize;
    let on_matte = |x: i64, y: i64| matte.at(x, y).is_some_and(|v| v > 0.0);

    let mut seeds: Vec<Vec<(i64, i64)>> = Vec::with_capacity(strokes.len());
    for (i, stroke) in strokes.iter().enumerate() {
        stroke.check(w, h).map_err(|e| Error::WispMask {
            index: i,
            reason: format!("stroke {i}: {e}"),
        })?;
        let px: Vec<(i64, i64)> = stroke
            .pixels()
            .into_iter()
            .filter(|&(x, y)| on_matte(x, y))
            .collect();
        if px.is_empty() {
            return Err(Error::WispMask {
                index: i,
                reason: format!("stroke {i} lies entirely outside the matte support"),
            });
        }
        let mut mine = Vec::new();
        for (x, y) in px {
            let k = idx(x, y);
            if owner[k] == FREE {
                owner[k] = i;
                mine.push((x, y));
            }
        }
        seeds.push(mine);
    }

    let mut out = Vec::with_capacity(strokes.len());
    let mut queue = VecDeque::new();
    for (i, seed) in seeds.iter().enumerate() {
        let mut region = Mask::new(w, h, false);
        for &(x, y) in seed {
            region.set(x as u32, y as u32, true);
            queue.push_back((x, y));
        }
        while let Some((x, y)) = queue.pop_front() {
            for (dx, dy) in FILL_DIRS {
                let (nx, ny) = (x + dx, y + dy);
                if !on_matte(nx, ny) {
                    continue;
                }
                let k = idx(nx, ny);
                if owner[k] == FREE {
                    owner[k] = i;
                    region.set(nx as u32, ny as u32, true);
                    queue.push_back((nx, ny));
                }
            }
        }
        out.push(region);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::vec2;

    fn vertical(x: f64, h: u32) -> Stroke {
        Stroke::new(vec![vec2(x, 0.0), vec2(x, (h - 1) as f64)])
    }

    fn render(m: &Mask) -> Vec<String> {
        (0..m.height())
            .map(|y| (0..m.width()).map(|x| if *m.get(x, y) { '#' } else { '.' }).collect())
            .collect()
    }

    #[test]
    fn single_stroke_fills_right_only() {
        let matte = ScalarMap::new(5, 5, 1.0);
        let region = sketch_fill(&vertical(2.0, 5), &matte).unwrap();
        assert_eq!(region.count(), 15);
        assert_eq!(render(&region), vec!["..###"; 5]);
    }

    #[test]
    fn rightmost_stroke_fills_its_column() {
        let matte = ScalarMap::new(5, 5, 1.0);
        let region = sketch_fill(&vertical(4.0, 5), &matte).unwrap();
        assert_eq!(render(&region), vec!["....#"; 5]);
    }

    #[test]
    fn two_strokes_split_at_the_second_claim() {
        let matte = ScalarMap::new(5, 5, 1.0);
        let r = sketch_fill_all(&[vertical(1.0, 5), vertical(3.0, 5)], &matte).unwrap();
        assert_eq!(render(&r[0]), vec![".##.."; 5]);
        assert_eq!(render(&r[1]), vec!["...##"; 5]);
    }

    #[test]
    fn fill_respects_matte_support() {
        // Matte hole at column 3 rows 0..=2 is routed around from below.
        let matte = ScalarMap::from_fn(5, 5, |x, y| if x == 3 && y <= 2 { 0.0 } else { 1.0 });
        let r = sketch_fill(&Stroke::new(vec![vec2(1.0, 0.0), vec2(1.0, 1.0)]), &matte).unwrap();
        assert_eq!(
            render(&r),
            vec![".##.#", ".##.#", ".##.#", ".####", ".####"]
        );
    }

    #[test]
    fn stroke_off_matte_is_an_error() {
        let matte = ScalarMap::from_fn(8, 8, |x, _| if x < 4 { 1.0 } else { 0.0 });
        let s = Stroke::new(vec![vec2(6.0, 0.0), vec2(6.0, 7.0)]);
        assert!(matches!(sketch_fill(&s, &matte), Err(Error::Extraction(_))));
        match sketch_fill_all(&[vertical(1.0, 8), s], &matte) {
            Err(Error::WispMask { index: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn never_leaves_matte_or_grows_left(
                cells in proptest::collection::vec(any::<bool>(), 144),
                x0 in 0u32..12, y0 in 0u32..12, x1 in 0u32..12, y1 in 0u32..12,
            ) {
                let matte = ScalarMap::from_fn(12, 12, |x, y| {
                    if cells[(y * 12 + x) as usize] || (x == x0 && y == y0) { 1.0 } else { 0.0 }
                });
                let stroke = Stroke::new(vec![vec2(x0 as f64, y0 as f64), vec2(x1 as f64, y1 as f64)]);
                let region = sketch_fill(&stroke, &matte).unwrap();
                let min_x = stroke.pixels().iter()
                    .filter(|&&(x, y)| *matte.get(x as u32, y as u32) > 0.0)
                    .map(|p| p.0).min().unwrap();
                for (x, y) in region.pixels() {
                    prop_assert!(*matte.get(x, y) > 0.0);
                    prop_assert!(x as i64 >= min_x);
                }
                for (x, y) in stroke.pixels() {
                    if *matte.get(x as u32, y as u32) > 0.0 {
                        prop_assert!(*region.get(x as u32, y as u32));
                    }
                }
            }
        }
    }
}
