//! Pitch value: where on the pitch is worth occupying.
//!
//! A raw value surface conditioned on the ball location — either loaded
//! from a precomputed store or approximated by the defending team's
//! rescaled influence (the quantity such models are trained to predict) —
//! is normalized by a distance-to-goal surface. The controlled pitch
//! value of a player is their imminent-control surface integrated against
//! the normalized value.

use std::path::PathBuf;

use crate::control::{pitch_control, ControlParams, InfluenceKernel};
use crate::error::{Error, Result};
use crate::geom::{distance, Vec2};
use crate::grid::{PitchGrid, Surface, SurfaceKind};
use crate::io::surface_file::ValueSurfaceStore;
use crate::state::{Frame, PlayerId, Team};

/// Where raw value surfaces come from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValueSource {
    /// Load from a ball-cell-indexed store file.
    External,
    /// Defending-team influence sum rescaled to [0, 1].
    SurrogateDefensiveInfluence,
}

/// Tunables of the value model.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueParams {
    /// Center of the attacked goal.
    pub goal_center: Vec2,
    /// Exponential decay length of the goal-distance normalization.
    pub eta_decay_m: f64,
    pub value_source: ValueSource,
    /// Store file backing `ValueSource::External`.
    pub value_surface_path: Option<PathBuf>,
}

impl Default for ValueParams {
    fn default() -> Self {
        ValueParams {
            goal_center: Vec2::new(52.5, 0.0),
            eta_decay_m: 45.0,
            value_source: ValueSource::SurrogateDefensiveInfluence,
            value_surface_path: None,
        }
    }
}

impl ValueParams {
    pub fn validate(&self, grid: &PitchGrid) -> Result<()> {
        if self.eta_decay_m <= 0.0 {
            return Err(Error::Config("eta_decay_m must be positive".into()));
        }
        if !grid.contains_with_margin(self.goal_center, 1e-9) {
            return Err(Error::Config(format!(
                "goal_center ({}, {}) must lie on the pitch",
                self.goal_center.x, self.goal_center.y
            )));
        }
        if self.value_source == ValueSource::External && self.value_surface_path.is_none() {
            return Err(Error::Config(
                "value_source=external requires value_surface_path".into(),
            ));
        }
        Ok(())
    }
}

/// The raw, normalization, and combined value surfaces of one frame.
#[derive(Clone, Debug)]
pub struct ValueSurfaceSet {
    pub raw: Surface,
    pub eta: Surface,
    /// Element-wise product of `raw` and `eta`.
    pub normalized: Surface,
}

/// Distance-to-goal normalization surface: exponential decay away from
/// the goal center, rescaled so the grid maximum is exactly 1.
pub fn eta_surface(grid: &PitchGrid, params: &ValueParams) -> Surface {
    let mut raw = Vec::with_capacity(grid.cell_count());
    let mut max = f64::NEG_INFINITY;
    for row in 0..grid.height_cells {
        for col in 0..grid.width_cells {
            let d = distance(grid.cell_center(col, row), params.goal_center);
            let v = (-d / params.eta_decay_m).exp();
            if v > max {
                max = v;
            }
            raw.push(v);
        }
    }
    let values = raw.into_iter().map(|v| (v / max) as f32).collect();
    Surface::from_values(*grid, SurfaceKind::Value, values)
}

/// Rescale a nonnegative f64 field to [0, 1] with maximum exactly 1;
/// all-zero input stays zero.
fn rescaled_to_unit(grid: &PitchGrid, values: Vec<f64>) -> Surface {
    let max = values.iter().copied().fold(0.0f64, f64::max);
    let out = if max > 0.0 {
        values.into_iter().map(|v| (v / max) as f32).collect()
    } else {
        values.into_iter().map(|v| v as f32).collect()
    };
    Surface::from_values(*grid, SurfaceKind::Value, out)
}

/// Raw value surface for the frame's ball location.
///
/// External mode looks the surface up by the ball's grid cell; the
/// surrogate rescales the defending team's influence sum.
pub fn raw_value_surface(
    frame: &Frame,
    grid: &PitchGrid,
    control_params: &ControlParams,
    params: &ValueParams,
    store: Option<&ValueSurfaceStore>,
) -> Result<Surface> {
    match params.value_source {
        ValueSource::External => {
            let store = store.ok_or_else(|| {
                Error::Config("external value source requires a loaded store".into())
            })?;
            let (col, row) = grid.cell_containing(frame.ball).ok_or_else(|| {
                Error::NoValueSurfaceForBall {
                    col: usize::MAX,
                    row: usize::MAX,
                }
            })?;
            store
                .get((col as u32, row as u32))
                .cloned()
                .ok_or(Error::NoValueSurfaceForBall { col, row })
        }
        ValueSource::SurrogateDefensiveInfluence => {
            // The surrogate mirrors the base influence model: the
            // imminent shrink factor applies to control, not to the
            // defensive setups a value model is conditioned on.
            let base = ControlParams {
                c_in: 1.0,
                ..*control_params
            };
            let mut defenders: Vec<_> = frame.team_players(Team::Defending).collect();
            defenders.sort_by(|a, b| a.player_id.cmp(&b.player_id));
            let kernels: Vec<InfluenceKernel> = defenders
                .iter()
                .map(|p| InfluenceKernel::new(p, frame.ball, &base))
                .collect();
            let mut values = Vec::with_capacity(grid.cell_count());
            for row in 0..grid.height_cells {
                for col in 0..grid.width_cells {
                    let center = grid.cell_center(col, row);
                    let mut sum = 0.0;
                    for k in &kernels {
                        sum += k.influence_at(center);
                    }
                    values.push(sum);
                }
            }
            Ok(rescaled_to_unit(grid, values))
        }
    }
}

/// Raw value combined with the goal-distance normalization.
pub fn normalized_value(
    frame: &Frame,
    grid: &PitchGrid,
    control_params: &ControlParams,
    params: &ValueParams,
    store: Option<&ValueSurfaceStore>,
) -> Result<ValueSurfaceSet> {
    let raw = raw_value_surface(frame, grid, control_params, params, store)?;
    let eta = eta_surface(grid, params);
    let normalized = raw.multiply(&eta, SurfaceKind::Value)?;
    Ok(ValueSurfaceSet { raw, eta, normalized })
}

/// Instantaneous controlled pitch value of one player: their imminent
/// per-player control surface summed against the normalized value.
pub fn instantaneous_player_value(
    frame: &Frame,
    player_id: &PlayerId,
    grid: &PitchGrid,
    control_params: &ControlParams,
    params: &ValueParams,
    store: Option<&ValueSurfaceStore>,
) -> Result<f64> {
    if frame.player(player_id).is_none() {
        return Err(Error::PlayerNotFound(player_id.to_string()));
    }
    let control = pitch_control(frame, grid, control_params, Some(player_id))?;
    let value = normalized_value(frame, grid, control_params, params, store)?;
    let mut sum = 0.0f64;
    for (&c, &v) in control
        .player_i
        .values()
        .iter()
        .zip(value.normalized.values())
    {
        sum += c as f64 * v as f64;
    }
    Ok(sum)
}
