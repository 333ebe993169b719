use nalgebra::Vector2;

pub type Vec2 = Vector2<f64>;

#[inline]
pub fn vec2(x: f64, y: f64) -> Vec2 {
    Vec2::new(x, y)
}

#[inline]
pub fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Twice the signed area of `abc`; positive when counter-clockwise in a
/// y-up frame (clockwise on screen).
#[inline]
pub fn signed_area2(a: &Vec2, b: &Vec2, c: &Vec2) -> f64 {
    cross(&(b - a), &(c - a))
}

pub fn segment_distance(p: &Vec2, a: &Vec2, b: &Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

pub fn polyline_distance(p: &Vec2, polyline: &[Vec2]) -> f64 {
    match polyline {
        [] => f64::INFINITY,
        [only] => (p - only).norm(),
        _ => polyline
            .windows(2)
            .map(|s| segment_distance(p, &s[0], &s[1]))
            .fold(f64::INFINITY, f64::min),
    }
}

/// Barycentric weights of `p` with respect to triangle `abc`, or `None`
/// for a degenerate triangle.
pub fn barycentric(p: &Vec2, a: &Vec2, b: &Vec2, c: &Vec2) -> Option<[f64; 3]> {
    let area = signed_area2(a, b, c);
    if area == 0.0 {
        return None;
    }
    let wa = signed_area2(p, b, c) / area;
    let wb = signed_area2(a, p, c) / area;
    let wc = signed_area2(a, b, p) / area;
    Some([wa, wb, wc])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn barycentric_at_vertex_is_exact() {
        let (a, b, c) = (vec2(0.3, 0.1), vec2(4.7, 0.9), vec2(1.1, 3.3));
        assert_eq!(barycentric(&a, &a, &b, &c), Some([1.0, 0.0, 0.0]));
        let w = barycentric(&((a + b + c) / 3.0), &a, &b, &c).unwrap();
        for wi in w {
            assert!((wi - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn polyline_distance_uses_nearest_segment() {
        let line = [vec2(0.0, 0.0), vec2(10.0, 0.0), vec2(10.0, 10.0)];
        assert_eq!(polyline_distance(&vec2(5.0, 3.0), &line), 3.0);
        assert_eq!(polyline_distance(&vec2(12.0, 5.0), &line), 2.0);
        assert_eq!(polyline_distance(&vec2(-3.0, -4.0), &line), 5.0);
    }
}
