//! Plain row-major rasters and the mask utilities shared by every stage.
//!
//! Pixel `(x, y)` has its center at the continuous point `(x, y)`; the
//! origin is the top-left corner of the image and `y` grows downward.

use std::collections::VecDeque;

use crate::geometry::Vec2;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    width: u32,
    height: u32,
    data: Vec<T>,
}

/// Binary raster.
pub type Mask = Grid<bool>;

/// Continuous raster, used for the hair matte and the depth map.
pub type ScalarMap = Grid<f32>;

impl<T: Clone> Grid<T> {
    pub fn new(width: u32, height: u32, fill: T) -> Self {
        Grid {
            width,
            height,
            data: vec![fill; width as usize * height as usize],
        }
    }
}

impl<T> Grid<T> {
    pub fn from_vec(width: u32, height: u32, data: Vec<T>) -> Self {
        assert_eq!(data.len(), width as usize * height as usize);
        Grid {
            width,
            height,
            data,
        }
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> T) -> Self {
        let mut data = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Grid {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    #[inline]
    fn index(&self, x: u32, y: u32) -> usize {
        y as usize * self.width as usize + x as usize
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> &T {
        &self.data[self.index(x, y)]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: T) {
        let i = self.index(x, y);
        self.data[i] = value;
    }

    #[inline]
    pub fn in_bounds(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && x < self.width as i64 && y < self.height as i64
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Grid<U> {
        Grid {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T: Copy> Grid<T> {
    /// Value at a signed coordinate, or `None` outside the raster.
    #[inline]
    pub fn at(&self, x: i64, y: i64) -> Option<T> {
        if self.in_bounds(x, y) {
            Some(self.data[self.index(x as u32, y as u32)])
        } else {
            None
        }
    }

    pub fn transposed(&self) -> Grid<T> {
        Grid::from_fn(self.height, self.width, |x, y| *self.get(y, x))
    }
}

/// Inclusive pixel bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PixelBox {
    pub min_x: u32,
    pub min_y: u32,
    pub max_x: u32,
    pub max_y: u32,
}

impl PixelBox {
    pub fn width(&self) -> u32 {
        self.max_x - self.min_x + 1
    }

    pub fn height(&self) -> u32 {
        self.max_y - self.min_y + 1
    }
}

const N4: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
const N8: [(i64, i64); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];

impl Mask {
    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.data.iter().any(|&b| b)
    }

    #[inline]
    pub fn on(&self, x: i64, y: i64) -> bool {
        self.at(x, y).unwrap_or(false)
    }

    pub fn bbox(&self) -> Option<PixelBox> {
        let mut bb: Option<PixelBox> = None;
        for y in 0..self.height {
            for x in 0..self.width {
                if *self.get(x, y) {
                    let b = bb.get_or_insert(PixelBox {
                        min_x: x,
                        min_y: y,
                        max_x: x,
                        max_y: y,
                    });
                    b.min_x = b.min_x.min(x);
                    b.max_x = b.max_x.max(x);
                    b.min_y = b.min_y.min(y);
                    b.max_y = b.max_y.max(y);
                }
            }
        }
        bb
    }

    pub fn pixels(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let w = self.width;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| ((i as u32) % w, (i as u32) / w))
    }

    pub fn and(&self, other: &Mask) -> Mask {
        assert_eq!(self.dims(), other.dims());
        Grid {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a && b)
                .collect(),
        }
    }

    pub fn intersects(&self, other: &Mask) -> bool {
        self.data.iter().zip(&other.data).any(|(&a, &b)| a && b)
    }

    /// Connected components, ordered by their first pixel in raster order.
    pub fn components(&self, eight_connected: bool) -> Vec<Mask> {
        let nbrs: &[(i64, i64)] = if eight_connected { &N8 } else { &N4 };
        let mut label = vec![usize::MAX; self.data.len()];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.data.len() {
            if !self.data[start] || label[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut comp = Mask::new(self.width, self.height, false);
            label[start] = id;
            queue.push_back(start);
            while let Some(i) = queue.pop_front() {
                comp.data[i] = true;
                let (x, y) = ((i % self.width as usize) as i64, (i / self.width as usize) as i64);
                for &(dx, dy) in nbrs {
                    let (nx, ny) = (x + dx, y + dy);
                    if self.on(nx, ny) {
                        let j = self.index(nx as u32, ny as u32);
                        if label[j] == usize::MAX {
                            label[j] = id;
                            queue.push_back(j);
                        }
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    /// Largest 8-connected component; the earliest one wins ties.
    pub fn largest_component(&self) -> Option<Mask> {
        let mut best: Option<(usize, Mask)> = None;
        for c in self.components(true) {
            let n = c.count();
            if best.as_ref().is_none_or(|(m, _)| n > *m) {
                best = Some((n, c));
            }
        }
        best.map(|(_, c)| c)
    }

    /// Euclidean disk dilation.
    pub fn dilate(&self, radius: f64) -> Mask {
        let r = radius.floor() as i64;
        let offsets: Vec<(i64, i64)> = (-r..=r)
            .flat_map(|dy| (-r..=r).map(move |dx| (dx, dy)))
            .filter(|&(dx, dy)| ((dx * dx + dy * dy) as f64) <= radius * radius + 1e-9)
            .collect();
        let mut out = Mask::new(self.width, self.height, false);
        for (x, y) in self.pixels() {
            for &(dx, dy) in &offsets {
                let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                if out.in_bounds(nx, ny) {
                    out.set(nx as u32, ny as u32, true);
                }
            }
        }
        out
    }
}

/// Rasterize an open polyline with Bresenham segments between rounded
/// vertices. Pixels outside the raster are clipped.
pub fn rasterize_polyline(points: &[Vec2], width: u32, height: u32) -> Mask {
    let mut mask = Mask::new(width, height, false);
    let mut plot = |x: i64, y: i64| {
        if mask.in_bounds(x, y) {
            mask.set(x as u32, y as u32, true);
        }
    };
    let rounded: Vec<(i64, i64)> = points
        .iter()
        .map(|p| (p.x.round() as i64, p.y.round() as i64))
        .collect();
    if rounded.len() == 1 {
        plot(rounded[0].0, rounded[0].1);
    }
    for seg in rounded.windows(2) {
        for (x, y) in bresenham(seg[0], seg[1]) {
            plot(x, y);
        }
    }
    mask
}

pub(crate) fn bresenham(a: (i64, i64), b: (i64, i64)) -> Vec<(i64, i64)> {
    let (mut x0, mut y0) = a;
    let (x1, y1) = b;
    let dx = (x1 - x0).abs();
    let dy = -(y1 - y0).abs();
    let sx = if x0 < x1 { 1 } else { -1 };
    let sy = if y0 < y1 { 1 } else { -1 };
    let mut err = dx + dy;
    let mut out = Vec::with_capacity((dx - dy + 1) as usize);
    loop {
        out.push((x0, y0));
        if x0 == x1 && y0 == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x0 += sx;
        }
        if e2 <= dx {
            err += dx;
            y0 += sy;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask_from(rows: &[&str]) -> Mask {
        let h = rows.len() as u32;
        let w = rows[0].len() as u32;
        Mask::from_fn(w, h, |x, y| rows[y as usize].as_bytes()[x as usize] == b'#')
    }

    #[test]
    fn components_respect_connectivity() {
        let m = mask_from(&["#....", ".#...", ".....", "...##"]);
        assert_eq!(m.components(true).len(), 2);
        assert_eq!(m.components(false).len(), 3);
        assert_eq!(m.largest_component().unwrap().count(), 2);
    }

    #[test]
    fn dilation_radius_two_is_a_disk() {
        let mut m = Mask::new(9, 9, false);
        m.set(4, 4, true);
        let d = m.dilate(2.0);
        // 13 lattice points within distance 2 of the origin.
        assert_eq!(d.count(), 13);
        assert!(d.on(6, 4));
        assert!(!d.on(6, 5));
    }

    #[test]
    fn bresenham_hits_both_endpoints() {
        let pts = bresenham((0, 0), (5, 2));
        assert_eq!(pts.first(), Some(&(0, 0)));
        assert_eq!(pts.last(), Some(&(5, 2)));
        assert_eq!(pts.len(), 6);
    }

    #[test]
    fn transpose_swaps_axes() {
        let m = mask_from(&["##.", "..."]);
        let t = m.transposed();
        assert_eq!(t.dims(), (2, 3));
        assert!(t.on(0, 0) && t.on(0, 1) && !t.on(0, 2));
    }
}
