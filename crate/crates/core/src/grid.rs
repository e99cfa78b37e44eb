//! The pitch grid and the surfaces defined over it.
//!
//! Every surface in a run shares one [`PitchGrid`]: a 105x68 lattice of
//! 1 m cells centered on the pitch. Cell values always mean the underlying
//! function evaluated at the cell center; no area integration happens
//! anywhere in the crate.

use crate::geom::Vec2;

/// Fixed cell lattice over the pitch.
///
/// Cell `(col, row)` has its center at
/// `x = -width/2 + (col + 0.5) * cell_size`, `y = -height/2 + (row + 0.5) * cell_size`.
/// `col` runs along the pitch length (toward the attacking goal), `row`
/// along its width.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PitchGrid {
    pub width_cells: usize,
    pub height_cells: usize,
    pub cell_size_m: f64,
}

impl PitchGrid {
    /// The standard 105x68 pitch at 1 m resolution.
    pub fn standard() -> Self {
        PitchGrid {
            width_cells: 105,
            height_cells: 68,
            cell_size_m: 1.0,
        }
    }

    pub fn cell_count(&self) -> usize {
        self.width_cells * self.height_cells
    }

    /// Half the pitch length in meters (52.5 on the standard grid).
    pub fn half_length(&self) -> f64 {
        self.width_cells as f64 * self.cell_size_m / 2.0
    }

    /// Half the pitch width in meters (34.0 on the standard grid).
    pub fn half_width(&self) -> f64 {
        self.height_cells as f64 * self.cell_size_m / 2.0
    }

    #[inline]
    pub fn cell_center(&self, col: usize, row: usize) -> Vec2 {
        Vec2::new(
            -self.half_length() + (col as f64 + 0.5) * self.cell_size_m,
            -self.half_width() + (row as f64 + 0.5) * self.cell_size_m,
        )
    }

    /// Row-major index of cell `(col, row)`.
    #[inline]
    pub fn index(&self, col: usize, row: usize) -> usize {
        debug_assert!(col < self.width_cells && row < self.height_cells);
        row * self.width_cells + col
    }

    /// The cell containing `point`, or `None` if it lies off the grid.
    pub fn cell_containing(&self, point: Vec2) -> Option<(usize, usize)> {
        let fx = (point.x + self.half_length()) / self.cell_size_m;
        let fy = (point.y + self.half_width()) / self.cell_size_m;
        if fx < 0.0 || fy < 0.0 {
            return None;
        }
        let col = fx.floor() as usize;
        let row = fy.floor() as usize;
        if col < self.width_cells && row < self.height_cells {
            Some((col, row))
        } else {
            None
        }
    }

    /// Whether `point` lies within the pitch rectangle plus `margin_m`.
    pub fn contains_with_margin(&self, point: Vec2, margin_m: f64) -> bool {
        point.x.abs() <= self.half_length() + margin_m
            && point.y.abs() <= self.half_width() + margin_m
    }
}

impl Default for PitchGrid {
    fn default() -> Self {
        PitchGrid::standard()
    }
}

/// What a surface's values mean. Probability kinds are bounded to [0, 1].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurfaceKind {
    Vision,
    Occlusion,
    Control,
    Value,
    Generic,
}

impl SurfaceKind {
    pub fn is_probability(self) -> bool {
        !matches!(self, SurfaceKind::Generic)
    }
}

/// A row-major grid of 32-bit values over the pitch.
///
/// Kernels evaluate their model in f64 at each cell center and store the
/// rounded f32; the binary file format carries exactly these values.
#[derive(Clone, Debug, PartialEq)]
pub struct Surface {
    grid: PitchGrid,
    kind: SurfaceKind,
    values: Vec<f32>,
}

impl Surface {
    pub fn zeros(grid: PitchGrid, kind: SurfaceKind) -> Self {
        Surface {
            grid,
            kind,
            values: vec![0.0; grid.cell_count()],
        }
    }

    pub fn filled(grid: PitchGrid, kind: SurfaceKind, value: f32) -> Self {
        Surface {
            grid,
            kind,
            values: vec![value; grid.cell_count()],
        }
    }

    /// Sample `f` at every cell center, row-major.
    pub fn from_fn(grid: PitchGrid, kind: SurfaceKind, mut f: impl FnMut(Vec2) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.cell_count());
        for row in 0..grid.height_cells {
            for col in 0..grid.width_cells {
                values.push(f(grid.cell_center(col, row)) as f32);
            }
        }
        Surface { grid, kind, values }
    }

    pub fn from_values(grid: PitchGrid, kind: SurfaceKind, values: Vec<f32>) -> Self {
        assert_eq!(values.len(), grid.cell_count());
        Surface { grid, kind, values }
    }

    pub fn grid(&self) -> &PitchGrid {
        &self.grid
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    pub fn with_kind(mut self, kind: SurfaceKind) -> Self {
        self.kind = kind;
        self
    }

    #[inline]
    pub fn get(&self, col: usize, row: usize) -> f32 {
        self.values[self.grid.index(col, row)]
    }

    #[inline]
    pub fn set(&mut self, col: usize, row: usize, value: f32) {
        let i = self.grid.index(col, row);
        self.values[i] = value;
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f32] {
        &mut self.values
    }

    /// Sum of all cells, accumulated in f64 in row-major order.
    pub fn sum(&self) -> f64 {
        self.values.iter().map(|&v| v as f64).sum()
    }

    pub fn max_value(&self) -> f32 {
        self.values.iter().copied().fold(f32::NEG_INFINITY, f32::max)
    }

    pub fn min_value(&self) -> f32 {
        self.values.iter().copied().fold(f32::INFINITY, f32::min)
    }

    /// Check the surface invariants: finite everywhere, and within [0, 1]
    /// for probability kinds.
    pub fn validate(&self) -> crate::Result<()> {
        for (i, &v) in self.values.iter().enumerate() {
            if !v.is_finite() {
                return Err(crate::Error::Format(format!(
                    "non-finite value {v} at index {i}"
                )));
            }
            if self.kind.is_probability() && !(0.0..=1.0).contains(&v) {
                return Err(crate::Error::Format(format!(
                    "probability surface value {v} out of [0,1] at index {i}"
                )));
            }
        }
        Ok(())
    }

    /// Element-wise product, in f64 per cell, rounded back to f32.
    pub fn multiply(&self, other: &Surface, kind: SurfaceKind) -> crate::Result<Surface> {
        if self.grid != other.grid {
            return Err(crate::Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| (a as f64 * b as f64) as f32)
            .collect();
        Ok(Surface {
            grid: self.grid,
            kind,
            values,
        })
    }
}
