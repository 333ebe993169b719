//! Smooth the sides of a ragged wisp mask and sharpen its tip.
//!
//! Run: `cargo run --example refine_wisp`

use cinewisp::extraction::{refine_wisp, RefineParams};
use cinewisp::raster::Mask;

fn widths(m: &Mask) -> Vec<usize> {
    (0..m.height())
        .map(|y| (0..m.width()).filter(|&x| *m.get(x, y)).count())
        .filter(|&n| n > 0)
        .collect()
}

fn main() -> cinewisp::Result<()> {
    let raw = Mask::from_fn(60, 90, |x, y| {
        let yf = y as f64;
        let center = 30.0 + 6.0 * (yf / 25.0).sin();
        let jag = [0.0, 1.5, -1.0, 0.5][y as usize % 4];
        let half = 9.0 - yf / 20.0 + jag;
        (5..85).contains(&y) && (x as f64 - center).abs() <= half
    });
    let params = RefineParams::default();
    let refined = refine_wisp(&raw, &params)?;
    println!("{params:?}");
    println!("pixels: raw {}, refined {}", raw.count(), refined.count());
    let (a, b) = (widths(&raw), widths(&refined));
    println!("row  raw  refined");
    for (i, (r, s)) in a.iter().zip(&b).enumerate().step_by(4) {
        println!("{i:3}  {r:3}  {s:3}");
    }
    println!("last row: raw {}, refined {}", a.last().unwrap_or(&0), b.last().unwrap_or(&0));
    Ok(())
}
