//! Player influence and (imminent) pitch control.
//!
//! Each player projects a bivariate-normal influence centered half a
//! second ahead of their position, elongated along the motion direction
//! and sized by distance to the ball. Team control at a cell is the
//! logistic of the attacking-minus-defending influence sums. Shrinking
//! every influence radius by the factor `c_in` yields "imminent" control:
//! the space reachable on a very short horizon.

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::grid::{PitchGrid, Surface, SurfaceKind};
use crate::state::{Frame, PlayerId, PlayerState, Team};

/// Tunables of the influence and control model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControlParams {
    /// Imminent-control shrink factor applied to every influence radius.
    pub c_in: f64,
    /// Influence center leads the player by this many seconds of motion.
    pub influence_horizon_s: f64,
    /// Influence radius next to the ball.
    pub radius_min_m: f64,
    /// Influence radius far from the ball.
    pub radius_max_m: f64,
    /// Speed at which the influence is maximally elongated.
    pub speed_norm_m_s: f64,
}

impl Default for ControlParams {
    fn default() -> Self {
        ControlParams {
            c_in: 0.5,
            influence_horizon_s: 0.5,
            radius_min_m: 4.0,
            radius_max_m: 10.0,
            speed_norm_m_s: 13.0,
        }
    }
}

impl ControlParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c_in > 0.0 && self.c_in <= 1.0) {
            return Err(Error::Config(format!("c_in must be in (0, 1], got {}", self.c_in)));
        }
        if !(self.radius_min_m > 0.0 && self.radius_min_m < self.radius_max_m) {
            return Err(Error::Config(
                "influence radii must satisfy 0 < radius_min_m < radius_max_m".into(),
            ));
        }
        if self.speed_norm_m_s <= crate::state::SPEED_CLAMP_M_S {
            return Err(Error::Config(
                "speed_norm_m_s must exceed the speed clamp".into(),
            ));
        }
        if self.influence_horizon_s < 0.0 {
            return Err(Error::Config("influence_horizon_s must be >= 0".into()));
        }
        Ok(())
    }
}

/// Ball distance at which the influence radius reaches its maximum.
const FULL_RADIUS_BALL_DISTANCE_M: f64 = 18.0;

/// Influence radius as a function of distance to the ball: grows
/// cubically from `radius_min_m` at the ball to `radius_max_m` at
/// [`FULL_RADIUS_BALL_DISTANCE_M`] and saturates there.
pub fn influence_radius(dist_to_ball: f64, params: &ControlParams) -> f64 {
    let t = (dist_to_ball / FULL_RADIUS_BALL_DISTANCE_M).min(1.0);
    params.radius_min_m + (params.radius_max_m - params.radius_min_m) * (t * t * t)
}

/// Squared-distance multiple of `s_x^2` beyond which the influence
/// underflows to exactly 0.0, so evaluation can return early.
const INFLUENCE_ZERO_DIST_SQ_FACTOR: f64 = 1700.0;

/// Per-player influence evaluation state.
#[derive(Clone, Debug)]
pub struct InfluenceKernel {
    mean: Vec2,
    cos_phi: f64,
    sin_phi: f64,
    s_along: f64,
    s_across: f64,
    zero_beyond_dist_sq: f64,
}

impl InfluenceKernel {
    /// Inclusive cell-index bounds of the disk outside which the
    /// influence is exactly zero; `None` when the kernel covers the grid.
    fn live_box(&self, grid: &crate::grid::PitchGrid) -> Option<(usize, usize, usize, usize)> {
        let radius = self.zero_beyond_dist_sq.sqrt();
        let to_col = |x: f64| ((x + grid.half_length()) / grid.cell_size_m).floor();
        let to_row = |y: f64| ((y + grid.half_width()) / grid.cell_size_m).floor();
        let col_lo = (to_col(self.mean.x - radius) as i64 - 1).max(0) as usize;
        let col_hi = (to_col(self.mean.x + radius) as i64 + 1).min(grid.width_cells as i64 - 1);
        let row_lo = (to_row(self.mean.y - radius) as i64 - 1).max(0) as usize;
        let row_hi = (to_row(self.mean.y + radius) as i64 + 1).min(grid.height_cells as i64 - 1);
        if col_hi < 0 || row_hi < 0 {
            return None;
        }
        Some((col_lo, col_hi as usize, row_lo, row_hi as usize))
    }

    /// Add this kernel's influence into `buf` over its live box; cells
    /// outside would contribute exactly zero.
    fn accumulate(&self, grid: &crate::grid::PitchGrid, buf: &mut [f64]) {
        let Some((col_lo, col_hi, row_lo, row_hi)) = self.live_box(grid) else {
            return;
        };
        for row in row_lo..=row_hi {
            let base = row * grid.width_cells;
            for col in col_lo..=col_hi {
                buf[base + col] += self.influence_at(grid.cell_center(col, row));
            }
        }
    }

    pub fn new(player: &PlayerState, ball: Vec2, params: &ControlParams) -> Self {
        let radius = params.c_in * influence_radius((player.position - ball).norm(), params);
        let ratio = {
            let r = player.speed / params.speed_norm_m_s;
            r * r
        };
        let s_along = radius * (1.0 + ratio) / 2.0;
        let s_across = radius * (1.0 - ratio) / 2.0;
        let (cos_phi, sin_phi) = if player.speed > 1e-9 {
            let inv = 1.0 / player.speed;
            (player.velocity.x * inv, player.velocity.y * inv)
        } else {
            (1.0, 0.0)
        };
        InfluenceKernel {
            mean: player.position + player.velocity * params.influence_horizon_s,
            cos_phi,
            sin_phi,
            s_along,
            s_across,
            zero_beyond_dist_sq: INFLUENCE_ZERO_DIST_SQ_FACTOR * s_along * s_along,
        }
    }

    /// Influence at a point, normalized to peak 1 at the mean.
    #[inline]
    pub fn influence_at(&self, point: Vec2) -> f64 {
        let dx = point.x - self.mean.x;
        let dy = point.y - self.mean.y;
        let dist_sq = dx * dx + dy * dy;
        if dist_sq >= self.zero_beyond_dist_sq {
            // exp would underflow to exactly zero here.
            return 0.0;
        }
        let along = (dx * self.cos_phi + dy * self.sin_phi) / self.s_along;
        let across = (-dx * self.sin_phi + dy * self.cos_phi) / self.s_across;
        (-0.5 * (along * along + across * across)).exp()
    }
}

#[inline]
fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Precomputed influence kernels for one frame, with players ordered by
/// id inside each team so sums reduce deterministically.
pub struct ControlField {
    attackers: Vec<InfluenceKernel>,
    defenders: Vec<InfluenceKernel>,
    perspective: Option<usize>,
}

impl ControlField {
    pub fn new(frame: &Frame, params: &ControlParams, perspective: Option<&PlayerId>) -> Result<Self> {
        let mut attackers: Vec<&PlayerState> = frame.team_players(Team::Attacking).collect();
        let mut defenders: Vec<&PlayerState> = frame.team_players(Team::Defending).collect();
        if attackers.is_empty() {
            return Err(Error::TeamEmpty("attacking"));
        }
        if defenders.is_empty() {
            return Err(Error::TeamEmpty("defending"));
        }
        attackers.sort_by(|a, b| a.player_id.cmp(&b.player_id));
        defenders.sort_by(|a, b| a.player_id.cmp(&b.player_id));
        let perspective = match perspective {
            None => None,
            Some(id) => Some(
                attackers
                    .iter()
                    .position(|p| &p.player_id == id)
                    .ok_or_else(|| Error::PlayerNotFound(id.to_string()))?,
            ),
        };
        Ok(ControlField {
            attackers: attackers
                .iter()
                .map(|p| InfluenceKernel::new(p, frame.ball, params))
                .collect(),
            defenders: defenders
                .iter()
                .map(|p| InfluenceKernel::new(p, frame.ball, params))
                .collect(),
            perspective,
        })
    }

    #[inline]
    fn sums_at(&self, point: Vec2) -> (f64, f64) {
        let mut att = 0.0;
        for k in &self.attackers {
            att += k.influence_at(point);
        }
        let mut def = 0.0;
        for k in &self.defenders {
            def += k.influence_at(point);
        }
        (att, def)
    }

    /// Probability the attacking team controls `point`.
    #[inline]
    pub fn attacking_at(&self, point: Vec2) -> f64 {
        let (att, def) = self.sums_at(point);
        logistic(att - def)
    }

    /// Probability the defending team controls `point`.
    #[inline]
    pub fn defending_at(&self, point: Vec2) -> f64 {
        1.0 - self.attacking_at(point)
    }

    /// Share of the attacking influence belonging to the perspective
    /// player (zero without a perspective or where the team sum is zero).
    #[inline]
    pub fn perspective_share_at(&self, point: Vec2) -> f64 {
        let Some(idx) = self.perspective else {
            return 0.0;
        };
        let mut att = 0.0;
        for k in &self.attackers {
            att += k.influence_at(point);
        }
        if att == 0.0 {
            return 0.0;
        }
        self.attackers[idx].influence_at(point) / att
    }

    /// Control attributed to the perspective player.
    #[inline]
    pub fn player_at(&self, point: Vec2) -> f64 {
        self.attacking_at(point) * self.perspective_share_at(point)
    }
}

/// The per-entity control surfaces of one frame.
///
/// `attacking` is stored as the exact f32 sum `player_i + attacking_excl_i`
/// and `defending` as `1 - attacking`, so the attribution and
/// complementarity identities hold bit-exactly in surface precision.
#[derive(Clone, Debug)]
pub struct TeamControlSurfaces {
    pub attacking: Surface,
    pub attacking_excl_i: Surface,
    pub defending: Surface,
    pub player_i: Surface,
}

/// Influence surface of a single player.
pub fn player_influence(
    player: &PlayerState,
    ball: Vec2,
    grid: &PitchGrid,
    params: &ControlParams,
) -> Surface {
    let kernel = InfluenceKernel::new(player, ball, params);
    Surface::from_fn(*grid, SurfaceKind::Control, |center| kernel.influence_at(center))
}

/// Influence of a single player at a continuous point.
pub fn player_influence_at(
    player: &PlayerState,
    ball: Vec2,
    params: &ControlParams,
    point: Vec2,
) -> f64 {
    InfluenceKernel::new(player, ball, params).influence_at(point)
}

/// Team and per-player control surfaces for one frame.
pub fn pitch_control(
    frame: &Frame,
    grid: &PitchGrid,
    params: &ControlParams,
    perspective: Option<&PlayerId>,
) -> Result<TeamControlSurfaces> {
    let field = ControlField::new(frame, params, perspective)?;
    let n = grid.cell_count();
    // Team influence sums accumulated kernel-by-kernel in id order over
    // each kernel's live box; per-cell addition order matches the
    // continuous evaluators and skipped cells would add exact zeros.
    let mut att_sum = vec![0.0f64; n];
    let mut def_sum = vec![0.0f64; n];
    let mut perspective_infl = vec![0.0f64; n];
    for (i, k) in field.attackers.iter().enumerate() {
        k.accumulate(grid, &mut att_sum);
        if Some(i) == field.perspective {
            k.accumulate(grid, &mut perspective_infl);
        }
    }
    for k in &field.defenders {
        k.accumulate(grid, &mut def_sum);
    }
    let mut attacking = Vec::with_capacity(n);
    let mut excl = Vec::with_capacity(n);
    let mut defending = Vec::with_capacity(n);
    let mut player = Vec::with_capacity(n);
    for i in 0..n {
        let att = att_sum[i];
        let a = logistic(att - def_sum[i]);
        let share = if field.perspective.is_none() || att == 0.0 {
            0.0
        } else {
            perspective_infl[i] / att
        };
        let p32 = (a * share) as f32;
        let excl32 = (a - a * share) as f32;
        let att32 = p32 + excl32;
        player.push(p32);
        excl.push(excl32);
        attacking.push(att32);
        defending.push(1.0f32 - att32);
    }
    Ok(TeamControlSurfaces {
        attacking: Surface::from_values(*grid, SurfaceKind::Control, attacking),
        attacking_excl_i: Surface::from_values(*grid, SurfaceKind::Control, excl),
        defending: Surface::from_values(*grid, SurfaceKind::Control, defending),
        player_i: Surface::from_values(*grid, SurfaceKind::Control, player),
    })
}

/// Element-wise product of a control surface and a vision map: the
/// control a player actually observes.
pub fn observed_control(control: &Surface, vision: &Surface) -> Result<Surface> {
    control.multiply(vision, SurfaceKind::Control)
}
