//! Binary surface container and the ball-location-indexed value store.
//!
//! Surface container layout (all integers little-endian):
//!
//! ```text
//! bytes 0..12   magic "GAZEGRID-SF\0"
//! bytes 12..16  format version, u32 (currently 1)
//! bytes 16..20  width in cells, u32
//! bytes 20..24  height in cells, u32
//! bytes 24..    width*height IEEE-754 binary32 values, row-major,
//!               row 0 = south touchline, col 0 = defended goal line
//! ```
//!
//! Cells are always 1 m; the grid origin convention lives in
//! [`crate::grid::PitchGrid`].
//!
//! Value store layout: a header with the grid dimensions and entry count,
//! an index of `(col, row, offset)` entries keyed by the ball cell, then
//! one full surface container per entry at its offset (from file start).

use std::collections::HashMap;
use std::io::{Read, Seek, SeekFrom, Write};

use crate::error::{Error, Result};
use crate::grid::{PitchGrid, Surface, SurfaceKind};

pub const SURFACE_MAGIC: [u8; 12] = *b"GAZEGRID-SF\0";
pub const STORE_MAGIC: [u8; 12] = *b"GAZEGRID-VS\0";
pub const FORMAT_VERSION: u32 = 1;

pub fn write_surface<W: Write>(surface: &Surface, mut w: W) -> Result<()> {
    w.write_all(&SURFACE_MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&(surface.grid().width_cells as u32).to_le_bytes())?;
    w.write_all(&(surface.grid().height_cells as u32).to_le_bytes())?;
    for &v in surface.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

/// Read one surface container. The kind is not part of the format, so
/// callers re-tag with [`Surface::with_kind`] when they know better.
pub fn read_surface<R: Read>(mut r: R) -> Result<Surface> {
    let mut magic = [0u8; 12];
    r.read_exact(&mut magic)?;
    if magic != SURFACE_MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = read_u32(&mut r)?;
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let width = read_u32(&mut r)? as usize;
    let height = read_u32(&mut r)? as usize;
    if width == 0 || height == 0 || width * height > 16_000_000 {
        return Err(Error::Format(format!("implausible dimensions {width}x{height}")));
    }
    let mut values = vec![0f32; width * height];
    let mut buf = [0u8; 4];
    for v in values.iter_mut() {
        r.read_exact(&mut buf)?;
        *v = f32::from_le_bytes(buf);
        if !v.is_finite() {
            return Err(Error::Format(format!("non-finite value {v}")));
        }
    }
    let grid = PitchGrid {
        width_cells: width,
        height_cells: height,
        cell_size_m: 1.0,
    };
    Ok(Surface::from_values(grid, SurfaceKind::Generic, values))
}

fn surface_record_len(grid: &PitchGrid) -> u64 {
    (12 + 4 + 4 + 4 + grid.cell_count() * 4) as u64
}

/// Precomputed value surfaces keyed by the ball's grid cell.
#[derive(Clone, Debug)]
pub struct ValueSurfaceStore {
    grid: PitchGrid,
    surfaces: HashMap<(u32, u32), Surface>,
}

impl ValueSurfaceStore {
    pub fn new(grid: PitchGrid) -> Self {
        ValueSurfaceStore {
            grid,
            surfaces: HashMap::new(),
        }
    }

    pub fn insert(&mut self, ball_cell: (u32, u32), surface: Surface) -> Result<()> {
        if surface.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        self.surfaces.insert(ball_cell, surface);
        Ok(())
    }

    pub fn get(&self, ball_cell: (u32, u32)) -> Option<&Surface> {
        self.surfaces.get(&ball_cell)
    }

    pub fn len(&self) -> usize {
        self.surfaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.surfaces.is_empty()
    }

    pub fn grid(&self) -> &PitchGrid {
        &self.grid
    }

    /// Write the store; index entries sorted by (col, row) so identical
    /// stores serialize identically.
    pub fn write<W: Write + Seek>(&self, mut w: W) -> Result<()> {
        let mut keys: Vec<(u32, u32)> = self.surfaces.keys().copied().collect();
        keys.sort_unstable();
        w.write_all(&STORE_MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&(self.grid.width_cells as u32).to_le_bytes())?;
        w.write_all(&(self.grid.height_cells as u32).to_le_bytes())?;
        w.write_all(&(keys.len() as u32).to_le_bytes())?;
        let header_len = 12u64 + 4 + 4 + 4 + 4;
        let index_len = keys.len() as u64 * 16;
        let record_len = surface_record_len(&self.grid);
        for (i, &(col, row)) in keys.iter().enumerate() {
            w.write_all(&col.to_le_bytes())?;
            w.write_all(&row.to_le_bytes())?;
            let offset = header_len + index_len + i as u64 * record_len;
            w.write_all(&offset.to_le_bytes())?;
        }
        for key in &keys {
            write_surface(&self.surfaces[key], &mut w)?;
        }
        Ok(())
    }

    pub fn read<R: Read + Seek>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 12];
        r.read_exact(&mut magic)?;
        if magic != STORE_MAGIC {
            return Err(Error::Format("bad value store magic".into()));
        }
        let version = read_u32(&mut r)?;
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let width = read_u32(&mut r)? as usize;
        let height = read_u32(&mut r)? as usize;
        let count = read_u32(&mut r)? as usize;
        let grid = PitchGrid {
            width_cells: width,
            height_cells: height,
            cell_size_m: 1.0,
        };
        let mut index = Vec::with_capacity(count);
        for _ in 0..count {
            let col = read_u32(&mut r)?;
            let row = read_u32(&mut r)?;
            let mut buf = [0u8; 8];
            r.read_exact(&mut buf)?;
            index.push((col, row, u64::from_le_bytes(buf)));
        }
        let mut surfaces = HashMap::with_capacity(count);
        for (col, row, offset) in index {
            r.seek(SeekFrom::Start(offset))?;
            let surface = read_surface(&mut r)?;
            if surface.grid().width_cells != width || surface.grid().height_cells != height {
                return Err(Error::Format("record dimensions disagree with store".into()));
            }
            surfaces.insert((col, row), surface.with_kind(SurfaceKind::Value));
        }
        Ok(ValueSurfaceStore { grid, surfaces })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn arbitrary_surface(seed: u32) -> Surface {
        let grid = PitchGrid::standard();
        let mut state = seed;
        Surface::from_fn(grid, SurfaceKind::Generic, |_| {
            // xorshift; value in [0, 1)
            state ^= state << 13;
            state ^= state >> 17;
            state ^= state << 5;
            (state as f64) / (u32::MAX as f64 + 1.0)
        })
    }

    #[test]
    fn surface_roundtrip_is_bit_exact() {
        let surface = arbitrary_surface(42);
        let mut buf = Vec::new();
        write_surface(&surface, &mut buf).unwrap();
        let back = read_surface(Cursor::new(&buf)).unwrap();
        assert_eq!(surface.values(), back.values());
        assert_eq!(surface.grid(), back.grid());
    }

    #[test]
    fn header_layout_is_stable() {
        let surface = arbitrary_surface(7);
        let mut buf = Vec::new();
        write_surface(&surface, &mut buf).unwrap();
        assert_eq!(&buf[0..12], b"GAZEGRID-SF\0");
        assert_eq!(u32::from_le_bytes(buf[12..16].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(buf[16..20].try_into().unwrap()), 105);
        assert_eq!(u32::from_le_bytes(buf[20..24].try_into().unwrap()), 68);
        assert_eq!(buf.len(), 24 + 105 * 68 * 4);
    }

    #[test]
    fn truncated_or_corrupt_files_error() {
        let surface = arbitrary_surface(3);
        let mut buf = Vec::new();
        write_surface(&surface, &mut buf).unwrap();
        assert!(read_surface(Cursor::new(&buf[..100])).is_err());
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(read_surface(Cursor::new(&bad)).is_err());
    }

    #[test]
    fn value_store_roundtrip() {
        let grid = PitchGrid::standard();
        let mut store = ValueSurfaceStore::new(grid);
        store.insert((10, 20), arbitrary_surface(1)).unwrap();
        store.insert((52, 33), arbitrary_surface(2)).unwrap();
        store.insert((0, 0), arbitrary_surface(3)).unwrap();
        let mut buf = Cursor::new(Vec::new());
        store.write(&mut buf).unwrap();
        buf.set_position(0);
        let back = ValueSurfaceStore::read(buf).unwrap();
        assert_eq!(back.len(), 3);
        for key in [(10u32, 20u32), (52, 33), (0, 0)] {
            assert_eq!(
                store.get(key).unwrap().values(),
                back.get(key).unwrap().values()
            );
        }
        assert!(back.get((1, 1)).is_none());
    }

    #[test]
    fn value_store_serialization_is_deterministic() {
        let grid = PitchGrid::standard();
        let mut a = ValueSurfaceStore::new(grid);
        let mut b = ValueSurfaceStore::new(grid);
        // Insert in different orders.
        a.insert((5, 5), arbitrary_surface(9)).unwrap();
        a.insert((1, 2), arbitrary_surface(8)).unwrap();
        b.insert((1, 2), arbitrary_surface(8)).unwrap();
        b.insert((5, 5), arbitrary_surface(9)).unwrap();
        let mut ba = Cursor::new(Vec::new());
        let mut bb = Cursor::new(Vec::new());
        a.write(&mut ba).unwrap();
        b.write(&mut bb).unwrap();
        assert_eq!(ba.into_inner(), bb.into_inner());
    }
}
