//! Heatmap rasters as portable graymaps/pixmaps.
//!
//! Zero-dependency figure output: `P5` graymaps map the value range
//! [0, 1] linearly to 0..255; `P6` pixmaps apply the fixed five-stop
//! gradient below (dark violet through orange to yellow). Image rows run
//! north to south so +y in pitch coordinates is up in the image.

use std::io::Write;

use crate::error::Result;
use crate::grid::Surface;

/// Gradient stops: (value, rgb). Linear interpolation between stops.
pub const COLOR_STOPS: [(f32, [u8; 3]); 5] = [
    (0.00, [13, 8, 135]),
    (0.25, [126, 3, 168]),
    (0.50, [203, 71, 119]),
    (0.75, [248, 149, 64]),
    (1.00, [240, 249, 33]),
];

fn gray_byte(v: f32) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Map a value in [0, 1] through the fixed gradient.
pub fn colormap(v: f32) -> [u8; 3] {
    let v = v.clamp(0.0, 1.0);
    for pair in COLOR_STOPS.windows(2) {
        let (v0, c0) = pair[0];
        let (v1, c1) = pair[1];
        if v <= v1 {
            let t = if v1 > v0 { (v - v0) / (v1 - v0) } else { 0.0 };
            let mut out = [0u8; 3];
            for k in 0..3 {
                out[k] = (c0[k] as f32 + t * (c1[k] as f32 - c0[k] as f32)).round() as u8;
            }
            return out;
        }
    }
    COLOR_STOPS[COLOR_STOPS.len() - 1].1
}

fn write_header<W: Write>(
    w: &mut W,
    format: &str,
    surface: &Surface,
    comment: Option<&str>,
) -> Result<()> {
    writeln!(w, "{format}")?;
    if let Some(c) = comment {
        writeln!(w, "# {c}")?;
    }
    writeln!(
        w,
        "{} {}",
        surface.grid().width_cells,
        surface.grid().height_cells
    )?;
    writeln!(w, "255")?;
    Ok(())
}

/// Write a binary graymap (`P5`).
pub fn write_pgm<W: Write>(surface: &Surface, mut w: W, comment: Option<&str>) -> Result<()> {
    write_header(&mut w, "P5", surface, comment)?;
    for row in (0..surface.grid().height_cells).rev() {
        for col in 0..surface.grid().width_cells {
            w.write_all(&[gray_byte(surface.get(col, row))])?;
        }
    }
    Ok(())
}

/// Write a binary pixmap (`P6`) through the fixed gradient.
pub fn write_ppm<W: Write>(surface: &Surface, mut w: W, comment: Option<&str>) -> Result<()> {
    write_header(&mut w, "P6", surface, comment)?;
    for row in (0..surface.grid().height_cells).rev() {
        for col in 0..surface.grid().width_cells {
            w.write_all(&colormap(surface.get(col, row)))?;
        }
    }
    Ok(())
}
