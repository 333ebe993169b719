//! Incremental Bowyer-Watson triangulation on exact predicates.
//!
//! Points are inserted in index order, so the output is a deterministic
//! function of the input sequence, including on cocircular lattices where
//! several Delaunay triangulations exist. A cavity only takes triangles
//! whose circumcircle strictly contains the new point; cocircular
//! neighbors are left alone.

use std::collections::HashMap;

use robust::{incircle, orient2d, Coord};

use crate::geometry::Vec2;

fn coord(p: &Vec2) -> Coord<f64> {
    Coord { x: p.x, y: p.y }
}

/// Orientation of `abc` in the y-up convention the predicates use;
/// positive means counter-clockwise there.
#[inline]
pub fn orient(a: &Vec2, b: &Vec2, c: &Vec2) -> f64 {
    orient2d(coord(a), coord(b), coord(c))
}

/// Positive when `d` lies strictly inside the circumcircle of the
/// positively oriented triangle `abc`.
#[inline]
pub fn in_circle(a: &Vec2, b: &Vec2, c: &Vec2, d: &Vec2) -> f64 {
    incircle(coord(a), coord(b), coord(c), coord(d))
}

/// Triangulate `points`. Triangles are index triples with positive
/// [`orient`]. Duplicate points must be removed by the caller.
pub fn triangulate(points: &[Vec2]) -> Vec<[usize; 3]> {
    let n = points.len();
    if n < 3 {
        return Vec::new();
    }
    let (mut lo, mut hi) = (points[0], points[0]);
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let center = (lo + hi) * 0.5;
    let span = (hi - lo).max().max(1.0);
    // Far enough that no super vertex lies inside the circumcircle of a
    // triangle of real points along a straight hull run.
    let r = span * 1.0e5;
    let mut pts: Vec<Vec2> = points.to_vec();
    pts.push(center + Vec2::new(-3.0 * r, -3.0 * r));
    pts.push(center + Vec2::new(3.0 * r, -3.0 * r));
    pts.push(center + Vec2::new(0.0, 3.0 * r));
    let (s0, s1, s2) = (n, n + 1, n + 2);

    let mut tris: Vec<[usize; 3]> = vec![positive(&pts, [s0, s1, s2])];
    for i in 0..n {
        let p = pts[i];
        let mut bad = Vec::new();
        let mut keep = Vec::with_capacity(tris.len() + 2);
        for t in tris.drain(..) {
            if in_circle(&pts[t[0]], &pts[t[1]], &pts[t[2]], &p) > 0.0 {
                bad.push(t);
            } else {
                keep.push(t);
            }
        }
        // Cavity boundary: directed edges of bad triangles whose twin is
        // not also in the cavity.
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &bad {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        for t in &bad {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                if count[&(a.min(b), a.max(b))] == 1 {
                    keep.push([a, b, i]);
                }
            }
        }
        tris = keep;
    }
    let mut out: Vec<[usize; 3]> = tris.into_iter().filter(|t| t.iter().all(|&v| v < n)).collect();
    // Canonical order: rotate so the smallest index leads, then sort.
    for t in &mut out {
        let m = (0..3).min_by_key(|&k| t[k]).unwrap();
        t.rotate_left(m);
    }
    out.sort_unstable();
    out
}

fn positive(pts: &[Vec2], t: [usize; 3]) -> [usize; 3] {
    if orient(&pts[t[0]], &pts[t[1]], &pts[t[2]]) < 0.0 {
        [t[0], t[2], t[1]]
    } else {
        t
    }
}

/// Largest positive [`in_circle`] value of any vertex against any
/// triangle, relative to the triangle's scale. Non-positive means the
/// triangulation is Delaunay.
pub fn max_circumcircle_violation(points: &[Vec2], tris: &[[usize; 3]]) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for t in tris {
        let (a, b, c) = (&points[t[0]], &points[t[1]], &points[t[2]]);
        let scale = {
            let l = (b - a).norm_squared().max((c - a).norm_squared()).max((c - b).norm_squared());
            (l * l).max(f64::MIN_POSITIVE)
        };
        for (i, p) in points.iter().enumerate() {
            if t.contains(&i) {
                continue;
            }
            worst = worst.max(in_circle(a, b, c, p) / scale);
        }
    }
    worst
}
