use crate::error::{Error, Result};
use crate::geometry::{vec2, Vec2};
use crate::raster::Mask;

pub type Pixel = (i64, i64);

// Clockwise on screen (y down), starting east.
const DIRS: [Pixel; 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];

fn dir_index(d: Pixel) -> usize {
    DIRS.iter().position(|&x| x == d).expect("unit offset")
}

/// Outer boundary of the 8-connected component containing the first mask
/// pixel in raster order, traced clockwise on screen with Moore-neighbor
/// tracing. Starts at that pixel. One-pixel-wide parts are walked on both
/// sides, so pixels can repeat.
pub fn trace_boundary(mask: &Mask) -> Vec<Pixel> {
    let Some(start) = mask.pixels().next().map(|(x, y)| (x as i64, y as i64)) else {
        return Vec::new();
    };
    let on = |p: Pixel| mask.on(p.0, p.1);
    // Find the first neighbor clockwise after `from`; returns (dir, pixel).
    let next = |p: Pixel, from: usize| -> Option<(usize, Pixel)> {
        (1..=8).map(|k| (from + k) % 8).find_map(|d| {
            let q = (p.0 + DIRS[d].0, p.1 + DIRS[d].1);
            on(q).then_some((d, q))
        })
    };
    // West of the start pixel is background by construction.
    let Some((d0, second)) = next(start, 4) else {
        return vec![start];
    };
    let mut out = vec![start];
    let (mut prev, mut cur, mut d) = (start, second, d0);
    loop {
        // Backtrack cell: the background neighbor of `prev` examined just
        // before `cur`, expressed relative to `cur`.
        let bt = DIRS[(d + 7) % 8];
        let back = (prev.0 + bt.0 - cur.0, prev.1 + bt.1 - cur.1);
        let from = dir_index(back);
        let (nd, nxt) = next(cur, from).expect("cur has at least prev as neighbor");
        if cur == start && nxt == second {
            break;
        }
        out.push(cur);
        prev = cur;
        cur = nxt;
        d = nd;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Boundary of a wisp split at its topmost and bottommost points. Both
/// chains run from `top` to `bottom`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourPair {
    pub left: Vec<Pixel>,
    pub right: Vec<Pixel>,
    pub top: Pixel,
    pub bottom: Pixel,
}

impl ContourPair {
    pub fn chain(&self, side: Side) -> &[Pixel] {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    /// One sample per row from `top.y` to `bottom.y`: the outermost chain
    /// pixel of that row (smallest x on the left, largest on the right).
    /// Rows the chain skips are filled by linear interpolation.
    pub fn row_samples(&self, side: Side) -> Vec<Vec2> {
        let (y0, y1) = (self.top.1, self.bottom.1);
        let mut best: Vec<Option<i64>> = vec![None; (y1 - y0 + 1) as usize];
        for &(x, y) in self.chain(side) {
            if y < y0 || y > y1 {
                continue;
            }
            let slot = &mut best[(y - y0) as usize];
            *slot = Some(match (side, *slot) {
                (_, None) => x,
                (Side::Left, Some(b)) => b.min(x),
                (Side::Right, Some(b)) => b.max(x),
            });
        }
        let known: Vec<(usize, f64)> = best
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|x| (i, x as f64)))
            .collect();
        (0..best.len())
            .map(|i| {
                let x = match best[i] {
                    Some(x) => x as f64,
                    None => {
                        let hi = known.partition_point(|&(k, _)| k < i);
                        let (a, b) = (known[hi - 1], known[hi]);
                        a.1 + (b.1 - a.1) * (i - a.0) as f64 / (b.0 - a.0) as f64
                    }
                };
                vec2(x, (y0 + i as i64) as f64)
            })
            .collect()
    }
}

fn middle_of_first_run(mask: &Mask, y: u32) -> i64 {
    let w = mask.width();
    let first = (0..w).find(|&x| *mask.get(x, y)).expect("row has a pixel");
    let mut last = first;
    while last + 1 < w && *mask.get(last + 1, y) {
        last += 1;
    }
    ((first + last) / 2) as i64
}

/// Split the outer boundary of a single-component mask into left and right
/// chains at its topmost and bottommost points. Where the top (bottom) row
/// holds several pixels the split point is the middle of the first run.
pub fn split_contour(mask: &Mask) -> Result<ContourPair> {
    let comps = mask.components(true);
    match comps.len() {
        0 => return Err(Error::Extraction("empty mask has no contour".into())),
        1 => {}
        n => {
            return Err(Error::Extraction(format!(
                "mask has {n} components; take the largest first"
            )))
        }
    }
    let bb = mask.bbox().expect("non-empty");
    let top = (middle_of_first_run(mask, bb.min_y), bb.min_y as i64);
    let bottom = (middle_of_first_run(mask, bb.max_y), bb.max_y as i64);

    let seq = trace_boundary(mask);
    let n = seq.len();
    let i_top = seq.iter().position(|&p| p == top).expect("top on boundary");
    let i_bot = seq.iter().position(|&p| p == bottom).expect("bottom on boundary");
    if i_top == i_bot {
        return Ok(ContourPair {
            left: vec![top],
            right: vec![top],
            top,
            bottom,
        });
    }
    // The trace runs clockwise on screen: top -> bottom is the right side.
    let walk = |from: usize, to: usize| -> Vec<Pixel> {
        let mut out = Vec::new();
        let mut i = from;
        loop {
            out.push(seq[i]);
            if i == to {
                break;
            }
            i = (i + 1) % n;
        }
        out
    };
    let right = walk(i_top, i_bot);
    let mut left = walk(i_bot, i_top);
    left.reverse();
    Ok(ContourPair {
        left,
        right,
        top,
        bottom,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn mask_from(rows: &[&str]) -> Mask {
        let h = rows.len() as u32;
        let w = rows[0].len() as u32;
        Mask::from_fn(w, h, |x, y| rows[y as usize].as_bytes()[x as usize] == b'#')
    }

    fn boundary_pixels(mask: &Mask) -> HashSet<Pixel> {
        mask.pixels()
            .map(|(x, y)| (x as i64, y as i64))
            .filter(|&(x, y)| {
                [(1, 0), (-1, 0), (0, 1), (0, -1)]
                    .iter()
                    .any(|(dx, dy)| !mask.on(x + dx, y + dy))
            })
            .collect()
    }

    #[test]
    fn rectangle_splits_into_its_side_edges() {
        let mask = Mask::from_fn(12, 14, |x, y| (3..7).contains(&x) && (2..12).contains(&y));
        let pair = split_contour(&mask).unwrap();
        assert_eq!(pair.top.1, 2);
        assert_eq!(pair.bottom.1, 11);
        let left = pair.row_samples(Side::Left);
        let right = pair.row_samples(Side::Right);
        assert_eq!(left.len(), 10);
        assert_eq!(right.len(), 10);
        assert!(left.iter().all(|p| p.x == 3.0));
        assert!(right.iter().all(|p| p.x == 6.0));
        assert_eq!(pair.left.first(), Some(&pair.top));
        assert_eq!(pair.left.last(), Some(&pair.bottom));
        assert_eq!(pair.right.first(), Some(&pair.top));
        assert_eq!(pair.right.last(), Some(&pair.bottom));
    }

    #[test]
    fn single_column_gives_identical_chains() {
        let mask = Mask::from_fn(5, 9, |x, y| x == 2 && (1..8).contains(&y));
        let pair = split_contour(&mask).unwrap();
        assert_eq!(pair.left, pair.right);
        assert_eq!(pair.left.len(), 7);
    }

    #[test]
    fn c_shape_splits_at_global_extremes() {
        let mask = mask_from(&[
            ".........",
            ".#######.",
            ".#######.",
            ".###.....",
            ".###.....",
            ".###.....",
            ".#######.",
            ".#######.",
            ".........",
        ]);
        let pair = split_contour(&mask).unwrap();
        assert_eq!(pair.top, (4, 1));
        assert_eq!(pair.bottom, (4, 7));
        let all: HashSet<Pixel> = pair.left.iter().chain(&pair.right).copied().collect();
        assert_eq!(all, boundary_pixels(&mask));
        let l: HashSet<Pixel> = pair.left.iter().copied().collect();
        let r: HashSet<Pixel> = pair.right.iter().copied().collect();
        let both: HashSet<Pixel> = l.intersection(&r).copied().collect();
        assert_eq!(both, HashSet::from([pair.top, pair.bottom]));
        // The open side of the C lies on the right chain.
        assert!(pair.right.contains(&(3, 4)));
        assert!(pair.left.contains(&(1, 4)));
    }

    #[test]
    fn multiple_components_are_rejected() {
        let mask = mask_from(&["#..#", "#..#"]);
        assert!(matches!(split_contour(&mask), Err(Error::Extraction(_))));
    }

    #[test]
    fn trace_visits_every_boundary_pixel() {
        let mask = mask_from(&[
            "..##..",
            ".####.",
            "######",
            ".####.",
            "..##..",
        ]);
        let seq = trace_boundary(&mask);
        let got: HashSet<Pixel> = seq.iter().copied().collect();
        assert_eq!(got, boundary_pixels(&mask));
        assert_eq!(seq[0], (2, 0));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn chains_cover_boundary(cells in proptest::collection::vec(any::<bool>(), 100)) {
                let raw = Mask::from_fn(10, 10, |x, y| cells[(y * 10 + x) as usize]);
                prop_assume!(!raw.is_empty());
                let mask = raw.largest_component().unwrap();
                let pair = split_contour(&mask).unwrap();
                let all: HashSet<Pixel> = pair.left.iter().chain(&pair.right).copied().collect();
                // Every traced pixel is a mask pixel; every 8-boundary pixel
                // of the outer contour is visited.
                for p in &all {
                    prop_assert!(mask.on(p.0, p.1));
                }
                prop_assert_eq!(pair.left.first(), Some(&pair.top));
                prop_assert_eq!(pair.right.last(), Some(&pair.bottom));
            }
        }
    }
}
