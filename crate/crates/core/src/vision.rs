//! Probabilistic field of view.
//!
//! A player's vision is a binary 120-degree wedge around the head
//! direction, attenuated radially and angularly by Gaussians whose decay
//! rates grow with speed: the faster a player moves, the narrower and
//! shorter their effective vision. The three factors multiply per cell.

use std::f64::consts::{FRAC_PI_3, PI};

use crate::angles::{dir_atan2, wrap_diff_bounded};
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::grid::{PitchGrid, Surface, SurfaceKind};
use crate::state::PlayerState;

/// Tunables of the field-of-view model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VisionParams {
    /// Total binocular span in radians.
    pub fov_total_rad: f64,
    /// Standard deviation of vision depth, meters.
    pub sigma_r_m: f64,
    /// Standard deviation of angular vision, radians.
    pub sigma_a_rad: f64,
    /// Optional hard distance cap; infinite keeps the wedge unbounded
    /// within the pitch.
    pub max_view_distance_m: f64,
}

impl Default for VisionParams {
    fn default() -> Self {
        VisionParams {
            fov_total_rad: 2.0 * FRAC_PI_3,
            sigma_r_m: 30.0,
            sigma_a_rad: FRAC_PI_3,
            max_view_distance_m: f64::INFINITY,
        }
    }
}

impl VisionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.fov_total_rad > 0.0 && self.fov_total_rad <= std::f64::consts::TAU) {
            return Err(Error::Config(format!(
                "fov_total_rad must be in (0, 2pi], got {}",
                self.fov_total_rad
            )));
        }
        if self.sigma_r_m <= 0.0 || self.sigma_a_rad <= 0.0 {
            return Err(Error::Config("vision sigmas must be positive".into()));
        }
        if self.max_view_distance_m <= 0.0 {
            return Err(Error::Config("max_view_distance_m must be positive".into()));
        }
        Ok(())
    }
}

/// Speed-dependent decay scalings for the two vision Gaussians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpeedScaling {
    pub c_a: f64,
    pub c_r: f64,
}

/// Map a speed to the angular and radial decay scalings.
///
/// Both grow linearly with speed and saturate: `c_a` at 0.5 (from 0.2 at
/// rest), `c_r` at 2.6 (from 0.1 at rest).
pub fn speed_scaling(speed: f64) -> Result<SpeedScaling> {
    if speed < 0.0 {
        return Err(Error::NegativeSpeed(speed));
    }
    Ok(SpeedScaling {
        c_a: (0.3 * speed + 0.2).min(0.5),
        c_r: (0.25 * speed + 0.1).min(2.6),
    })
}

/// Radial attenuation at distance `d` meters from the player.
#[inline]
pub fn radial_decay(d: f64, scaling: &SpeedScaling, params: &VisionParams) -> f64 {
    let r = d / params.sigma_r_m;
    (-(scaling.c_r * (r * r))).exp()
}

/// Angular attenuation at absolute offset `theta_a` radians from the
/// focal direction.
#[inline]
pub fn angular_decay(theta_a: f64, scaling: &SpeedScaling, params: &VisionParams) -> f64 {
    let r = theta_a / params.sigma_a_rad;
    (-(scaling.c_a * (r * r))).exp()
}

/// Precomputed per-player sampling state shared by the surface kernels
/// and the continuous evaluators, so both produce identical values.
pub(crate) struct FovKernel {
    pub position: Vec2,
    pub head_angle: f64,
    pub scaling: SpeedScaling,
    heading: Vec2,
    fov_half: f64,
    max_dist_sq: f64,
    /// cos(fov_half + margin): cells failing this test are outside the
    /// wedge with certainty, skipping the exact angle computation.
    prefilter_cos: f64,
}

/// Angular slack of the wedge prefilter. Cells within this margin of the
/// boundary fall through to the exact test.
const PREFILTER_MARGIN_RAD: f64 = 1e-6;

pub(crate) struct FovSample {
    pub value: f64,
    pub in_wedge: bool,
    /// Direction from the player to the point, radians. Only meaningful
    /// when `in_wedge`.
    pub angle: f64,
    pub dx: f64,
    pub dy: f64,
}

impl FovKernel {
    pub fn new(player: &PlayerState, params: &VisionParams) -> Result<Self> {
        let scaling = speed_scaling(player.speed)?;
        let fov_half = params.fov_total_rad / 2.0;
        Ok(FovKernel {
            position: player.position,
            head_angle: player.head_angle,
            scaling,
            heading: Vec2::new(player.head_angle.cos(), player.head_angle.sin()),
            fov_half,
            max_dist_sq: if params.max_view_distance_m.is_finite() {
                params.max_view_distance_m * params.max_view_distance_m
            } else {
                f64::INFINITY
            },
            prefilter_cos: (fov_half + PREFILTER_MARGIN_RAD).min(std::f64::consts::PI).cos(),
        })
    }

    /// True when the point is certainly outside the wedge, by the cheap
    /// dot-product test with margin. Never rejects a point the exact
    /// test would accept.
    #[inline]
    fn certainly_outside(&self, dot: f64, dist_sq: f64) -> bool {
        let c = self.prefilter_cos;
        if c >= 0.0 {
            dot < 0.0 || dot * dot < dist_sq * (c * c)
        } else {
            dot < 0.0 && dot * dot > dist_sq * (c * c)
        }
    }

    /// Evaluate the field of view at a continuous point, together with
    /// the geometry the occlusion kernel reuses.
    #[inline]
    pub fn sample(&self, point: Vec2, params: &VisionParams) -> FovSample {
        let dx = point.x - self.position.x;
        let dy = point.y - self.position.y;
        let dist_sq = dx * dx + dy * dy;
        if dx == 0.0 && dy == 0.0 {
            // The player's own location is always perceived.
            return FovSample {
                value: 1.0,
                in_wedge: true,
                angle: self.head_angle,
                dx,
                dy,
            };
        }
        let out = FovSample {
            value: 0.0,
            in_wedge: false,
            angle: 0.0,
            dx,
            dy,
        };
        if dist_sq > self.max_dist_sq {
            return out;
        }
        let dot = dx * self.heading.x + dy * self.heading.y;
        if self.certainly_outside(dot, dist_sq) {
            return out;
        }
        let angle = dir_atan2(dy, dx);
        let theta_a = wrap_diff_bounded(angle, self.head_angle).abs();
        if theta_a > self.fov_half {
            return out;
        }
        let dist = dist_sq.sqrt();
        let value = radial_decay(dist, &self.scaling, params)
            * angular_decay(theta_a, &self.scaling, params);
        FovSample {
            value,
            in_wedge: true,
            angle,
            dx,
            dy,
        }
    }

    /// Binary wedge membership at a continuous point.
    #[inline]
    pub fn in_wedge(&self, point: Vec2) -> bool {
        let dx = point.x - self.position.x;
        let dy = point.y - self.position.y;
        if dx == 0.0 && dy == 0.0 {
            return true;
        }
        let dist_sq = dx * dx + dy * dy;
        if dist_sq > self.max_dist_sq {
            return false;
        }
        if self.certainly_outside(dx * self.heading.x + dy * self.heading.y, dist_sq) {
            return false;
        }
        let theta_a = wrap_diff_bounded(dir_atan2(dy, dx), self.head_angle).abs();
        theta_a <= self.fov_half
    }

    /// Conservative x-interval (in meters) of the wedge on the
    /// horizontal line `y = row_y`: every point of the wedge on that
    /// line lies inside the returned interval, which may extend past it.
    /// `None` means the interval could not be bounded (wide wedges);
    /// callers then scan the full row.
    pub(crate) fn row_window(&self, row_y: f64) -> Option<(f64, f64)> {
        let margin = self.fov_half + PREFILTER_MARGIN_RAD;
        if margin >= std::f64::consts::FRAC_PI_2 {
            return None;
        }
        let dy = row_y - self.position.y;
        let px = self.position.x;
        // Horizontal directions inside the widened wedge leave the row
        // unbounded on that side.
        let right_open = wrap_diff_bounded(0.0, self.head_angle).abs() <= margin;
        let left_open = wrap_diff_bounded(PI, self.head_angle).abs() <= margin;
        if dy == 0.0 {
            let lo = if left_open { f64::NEG_INFINITY } else { px - 1.0 };
            let hi = if right_open { f64::INFINITY } else { px + 1.0 };
            return Some((lo, hi));
        }
        // Boundary ray crossings with the row.
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for boundary in [self.head_angle - margin, self.head_angle + margin] {
            let (s, c) = boundary.sin_cos();
            if s == 0.0 {
                continue;
            }
            let t = dy / s;
            if t > 0.0 {
                let x = px + t * c;
                lo = lo.min(x);
                hi = hi.max(x);
            }
        }
        if left_open {
            lo = f64::NEG_INFINITY;
        }
        if right_open {
            hi = f64::INFINITY;
        }
        if lo > hi {
            // The widened cone does not cross this row.
            return Some((1.0, 0.0));
        }
        Some((lo, hi))
    }
}

/// Inclusive column range of `row` that may intersect the wedge,
/// padded by one cell; `(1, 0)` when the row is empty.
pub(crate) fn wedge_columns(kernel: &FovKernel, grid: &PitchGrid, row: usize) -> (usize, usize) {
    let full = (0, grid.width_cells - 1);
    let y = grid.cell_center(0, row).y;
    match kernel.row_window(y) {
        None => full,
        Some((lo, hi)) if lo > hi => (1, 0),
        Some((lo, hi)) => {
            let scale = 1.0 / grid.cell_size_m;
            let to_col = |x: f64| (x + grid.half_length()) * scale;
            let col_lo = if lo.is_finite() {
                (to_col(lo).floor() as i64 - 1).max(0) as usize
            } else {
                0
            };
            let col_hi = if hi.is_finite() {
                ((to_col(hi).ceil() as i64) + 1).min(grid.width_cells as i64 - 1) as usize
            } else {
                grid.width_cells - 1
            };
            if col_lo > col_hi {
                (1, 0)
            } else {
                (col_lo, col_hi)
            }
        }
    }
}

/// Binary field-of-view value at a continuous point: 1 inside the wedge
/// (boundary inclusive) and within the distance cap, else 0. The exact
/// player location counts as visible.
pub fn binary_fov_at(player: &PlayerState, point: Vec2, params: &VisionParams) -> Result<f64> {
    let kernel = FovKernel::new(player, params)?;
    Ok(if kernel.in_wedge(point) { 1.0 } else { 0.0 })
}

/// Binary field-of-view surface. The cell containing the player is 1
/// regardless of the head direction.
pub fn binary_fov(player: &PlayerState, grid: &PitchGrid, params: &VisionParams) -> Result<Surface> {
    let kernel = FovKernel::new(player, params)?;
    let mut surface = Surface::from_fn(*grid, SurfaceKind::Vision, |center| {
        if kernel.in_wedge(center) {
            1.0
        } else {
            0.0
        }
    });
    if let Some((col, row)) = grid.cell_containing(player.position) {
        surface.set(col, row, 1.0);
    }
    Ok(surface)
}

/// Field-of-view value at a continuous point: the product of the radial
/// decay, the angular decay, and the binary wedge.
pub fn field_of_view_at(player: &PlayerState, point: Vec2, params: &VisionParams) -> Result<f64> {
    let kernel = FovKernel::new(player, params)?;
    Ok(kernel.sample(point, params).value)
}

/// Field-of-view surface sampled at cell centers. The cell containing
/// the player is 1.
pub fn field_of_view(
    player: &PlayerState,
    grid: &PitchGrid,
    params: &VisionParams,
) -> Result<Surface> {
    let kernel = FovKernel::new(player, params)?;
    let mut values = vec![0.0f32; grid.cell_count()];
    for row in 0..grid.height_cells {
        let (lo, hi) = wedge_columns(&kernel, grid, row);
        for col in lo..=hi.min(grid.width_cells - 1) {
            let v = kernel.sample(grid.cell_center(col, row), params).value;
            values[grid.index(col, row)] = v as f32;
        }
    }
    let mut surface = Surface::from_values(*grid, SurfaceKind::Vision, values);
    if let Some((col, row)) = grid.cell_containing(player.position) {
        surface.set(col, row, 1.0);
    }
    Ok(surface)
}
