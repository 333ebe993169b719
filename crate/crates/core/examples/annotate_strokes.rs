//! Grow wisp regions from strokes drawn on a hair matte.
//!
//! Run: `cargo run --example annotate_strokes`

use cinewisp::extraction::{sketch_fill_all, Stroke};
use cinewisp::geometry::vec2;
use cinewisp::raster::ScalarMap;

fn main() -> cinewisp::Result<()> {
    // A rounded hair region with a gap in the middle.
    let matte = ScalarMap::from_fn(32, 16, |x, y| {
        let (xf, yf) = (x as f64 - 15.5, y as f64 - 2.0);
        if xf * xf / 250.0 + yf * yf / 180.0 <= 1.0 && !(14..=16).contains(&x) {
            1.0
        } else {
            0.0
        }
    });
    let strokes = vec![
        Stroke::new(vec![vec2(4.0, 0.0), vec2(5.0, 8.0)]),
        Stroke::new(vec![vec2(18.0, 0.0), vec2(19.0, 12.0)]),
        Stroke::new(vec![vec2(24.0, 0.0), vec2(26.0, 9.0)]),
    ];
    let masks = sketch_fill_all(&strokes, &matte)?;
    for y in 0..matte.height() {
        let row: String = (0..matte.width())
            .map(|x| match masks.iter().position(|m| *m.get(x, y)) {
                Some(k) => char::from(b'a' + k as u8),
                None if *matte.get(x, y) > 0.0 => '?',
                None => '.',
            })
            .collect();
        println!("{row}");
    }
    for (k, m) in masks.iter().enumerate() {
        println!("wisp {k}: {} pixels", m.count());
    }
    Ok(())
}
