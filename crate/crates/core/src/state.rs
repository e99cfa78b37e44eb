//! Player and frame state: the atomic inputs of every surface kernel.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::angles::normalize_angle;
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::grid::PitchGrid;

/// Positions further than this outside the pitch rectangle are rejected
/// at ingest; broadcast tracking jitter stays within a few meters.
pub const POSITION_MARGIN_M: f64 = 5.0;

/// Speeds above this are treated as tracking spikes and clamped.
pub const SPEED_CLAMP_M_S: f64 = 12.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Team {
    Attacking,
    Defending,
}

impl Team {
    pub fn opponent(self) -> Team {
        match self {
            Team::Attacking => Team::Defending,
            Team::Defending => Team::Attacking,
        }
    }
}

/// Opaque player identifier, ordered lexically for deterministic
/// reductions over players.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PlayerId(pub String);

impl PlayerId {
    pub fn new(id: impl Into<String>) -> Self {
        PlayerId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for PlayerId {
    fn from(s: &str) -> Self {
        PlayerId(s.to_string())
    }
}

impl From<String> for PlayerId {
    fn from(s: String) -> Self {
        PlayerId(s)
    }
}

/// Data-quality notes attached to a player sample by the pipeline.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PlayerFlags {
    pub missing_head_angle: bool,
    pub missing_shoulder_angle: bool,
    pub missing_hip_angle: bool,
    pub antipodal_angle_fallback: bool,
    /// Velocity defaulted to zero because neither adjacent frame carried
    /// this player.
    pub velocity_fallback: bool,
    pub speed_clamped: bool,
}

/// One player's kinematic and postural state at one instant.
///
/// `speed` always equals the velocity norm and all angles are normalized
/// to `(-pi, pi]`; use the constructors to keep those invariants.
#[derive(Clone, Debug, PartialEq)]
pub struct PlayerState {
    pub player_id: PlayerId,
    pub team: Team,
    pub position: Vec2,
    pub velocity: Vec2,
    pub speed: f64,
    pub head_angle: f64,
    pub shoulder_angle: f64,
    /// Carried through from the tracking input; no kernel consumes it.
    pub hip_angle: f64,
    pub position_label: Option<String>,
    pub flags: PlayerFlags,
}

impl PlayerState {
    pub fn new(
        player_id: impl Into<PlayerId>,
        team: Team,
        position: Vec2,
        velocity: Vec2,
        head_angle: f64,
        shoulder_angle: f64,
        hip_angle: f64,
    ) -> Self {
        PlayerState {
            player_id: player_id.into(),
            team,
            position,
            velocity,
            speed: velocity.norm(),
            head_angle: normalize_angle(head_angle),
            shoulder_angle: normalize_angle(shoulder_angle),
            hip_angle: normalize_angle(hip_angle),
            position_label: None,
            flags: PlayerFlags::default(),
        }
    }

    /// A motionless player; convenient in tests and fixtures.
    pub fn stationary(
        player_id: impl Into<PlayerId>,
        team: Team,
        position: Vec2,
        head_angle: f64,
    ) -> Self {
        Self::new(player_id, team, position, Vec2::ZERO, head_angle, head_angle, head_angle)
    }

    /// Replace the velocity, keeping `speed` coherent.
    pub fn with_velocity(mut self, velocity: Vec2) -> Self {
        self.velocity = velocity;
        self.speed = velocity.norm();
        self
    }

    pub fn with_head_angle(mut self, head_angle: f64) -> Self {
        self.head_angle = normalize_angle(head_angle);
        self
    }

    pub fn with_shoulder_angle(mut self, shoulder_angle: f64) -> Self {
        self.shoulder_angle = normalize_angle(shoulder_angle);
        self
    }

    pub fn with_position_label(mut self, label: Option<String>) -> Self {
        self.position_label = label;
        self
    }

    /// Check the state invariants against `grid`.
    pub fn validate(&self, grid: &PitchGrid) -> Result<()> {
        if !(self.position.is_finite() && self.velocity.is_finite()) {
            return Err(Error::Parse {
                line: 0,
                message: format!("player {}: non-finite position or velocity", self.player_id),
            });
        }
        if (self.speed - self.velocity.norm()).abs() > 1e-9 {
            return Err(Error::Parse {
                line: 0,
                message: format!("player {}: speed does not match velocity norm", self.player_id),
            });
        }
        if !grid.contains_with_margin(self.position, POSITION_MARGIN_M) {
            return Err(Error::Parse {
                line: 0,
                message: format!(
                    "player {} at ({:.1}, {:.1}) outside pitch bounds plus {POSITION_MARGIN_M} m",
                    self.player_id, self.position.x, self.position.y
                ),
            });
        }
        Ok(())
    }
}

/// Ball position plus all player states at one timestamp.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub frame_id: u64,
    pub timestamp_s: f64,
    pub ball: Vec2,
    pub players: Vec<PlayerState>,
}

impl Frame {
    pub fn new(frame_id: u64, timestamp_s: f64, ball: Vec2, players: Vec<PlayerState>) -> Self {
        Frame {
            frame_id,
            timestamp_s,
            ball,
            players,
        }
    }

    pub fn player(&self, id: &PlayerId) -> Option<&PlayerState> {
        self.players.iter().find(|p| &p.player_id == id)
    }

    pub fn team_players(&self, team: Team) -> impl Iterator<Item = &PlayerState> {
        self.players.iter().filter(move |p| p.team == team)
    }

    /// Players other than `id`, for occlusion computations.
    pub fn others(&self, id: &PlayerId) -> Vec<&PlayerState> {
        self.players.iter().filter(|p| &p.player_id != id).collect()
    }

    /// Check per-frame invariants: unique player ids, finite ball, players
    /// within bounds.
    pub fn validate(&self, grid: &PitchGrid) -> Result<()> {
        if !self.ball.is_finite() {
            return Err(Error::Parse {
                line: 0,
                message: format!("frame {}: non-finite ball position", self.frame_id),
            });
        }
        for (i, a) in self.players.iter().enumerate() {
            a.validate(grid)?;
            for b in &self.players[i + 1..] {
                if a.player_id == b.player_id {
                    return Err(Error::Parse {
                        line: 0,
                        message: format!(
                            "frame {}: duplicate player id {}",
                            self.frame_id, a.player_id
                        ),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Check cross-frame invariants: frame ids strictly increasing and
/// timestamps non-decreasing.
pub fn validate_sequence(frames: &[Frame]) -> Result<()> {
    for w in frames.windows(2) {
        if w[1].frame_id <= w[0].frame_id {
            return Err(Error::Parse {
                line: 0,
                message: format!(
                    "frame ids not strictly increasing: {} then {}",
                    w[0].frame_id, w[1].frame_id
                ),
            });
        }
        if w[1].timestamp_s < w[0].timestamp_s {
            return Err(Error::Parse {
                line: 0,
                message: format!(
                    "timestamps decrease at frame {}: {} then {}",
                    w[1].frame_id, w[0].timestamp_s, w[1].timestamp_s
                ),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructor_normalizes_angles_and_speed() {
        let p = PlayerState::new(
            "a1",
            Team::Attacking,
            Vec2::new(10.0, 5.0),
            Vec2::new(3.0, 4.0),
            7.0,
            -7.0,
            0.0,
        );
        assert!((p.speed - 5.0).abs() < 1e-12);
        assert!(p.head_angle > -std::f64::consts::PI && p.head_angle <= std::f64::consts::PI);
        assert!(p.shoulder_angle > -std::f64::consts::PI);
    }

    #[test]
    fn frame_rejects_duplicate_ids() {
        let grid = PitchGrid::standard();
        let p = PlayerState::stationary("a1", Team::Attacking, Vec2::ZERO, 0.0);
        let frame = Frame::new(0, 0.0, Vec2::ZERO, vec![p.clone(), p]);
        assert!(frame.validate(&grid).is_err());
    }

    #[test]
    fn position_margin_is_five_meters() {
        let grid = PitchGrid::standard();
        let inside = PlayerState::stationary("a1", Team::Attacking, Vec2::new(57.0, 0.0), 0.0);
        assert!(inside.validate(&grid).is_ok());
        let outside = PlayerState::stationary("a2", Team::Attacking, Vec2::new(58.0, 0.0), 0.0);
        assert!(outside.validate(&grid).is_err());
    }

    #[test]
    fn sequence_validation_catches_regressions() {
        let f = |id, t| Frame::new(id, t, Vec2::ZERO, vec![]);
        assert!(validate_sequence(&[f(0, 0.0), f(1, 0.04)]).is_ok());
        assert!(validate_sequence(&[f(1, 0.0), f(1, 0.04)]).is_err());
        assert!(validate_sequence(&[f(0, 0.04), f(1, 0.0)]).is_err());
    }
}
