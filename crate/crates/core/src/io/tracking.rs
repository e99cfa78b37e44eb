//! Tracking ingestion: one self-describing JSON frame per line.
//!
//! The line format carries positions in meters (origin at pitch center)
//! and body angles in degrees; angles may be absent and are interpolated
//! downstream. Velocities are never part of the input — they are derived
//! from positions.
//!
//! ```json
//! {"frame_id":0,"timestamp_s":0.0,"ball":{"x":0.0,"y":0.0},
//!  "players":[{"player_id":"a1","team":"attacking","x":-10.0,"y":4.0,
//!              "head_deg":15.0,"shoulder_deg":20.0,"hip_deg":18.0}]}
//! ```

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::grid::PitchGrid;
use crate::state::{PlayerId, Team, POSITION_MARGIN_M};

/// The six standardized position labels accepted as optional input.
pub const POSITION_LABELS: [&str; 6] = [
    "wide_midfielder",
    "wide_back",
    "center_forward",
    "central_midfielder",
    "center_back",
    "wide_forward",
];

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FrameRecord {
    frame_id: u64,
    timestamp_s: f64,
    ball: BallRecord,
    players: Vec<PlayerRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BallRecord {
    x: f64,
    y: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlayerRecord {
    player_id: String,
    team: Team,
    x: f64,
    y: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    head_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shoulder_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hip_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    position: Option<String>,
}

/// One player's raw tracking sample; angles in radians when present.
#[derive(Clone, Debug, PartialEq)]
pub struct TrackingPlayer {
    pub player_id: PlayerId,
    pub team: Team,
    pub position: Vec2,
    pub head_angle: Option<f64>,
    pub shoulder_angle: Option<f64>,
    pub hip_angle: Option<f64>,
    pub position_label: Option<String>,
}

/// One raw tracking frame, prior to angle interpolation and kinematics.
#[derive(Clone, Debug, PartialEq)]
pub struct TrackingFrame {
    pub frame_id: u64,
    pub timestamp_s: f64,
    pub ball: Vec2,
    pub players: Vec<TrackingPlayer>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parse a tracking stream, validating per-frame and cross-frame
/// invariants. Returns the frames and any non-fatal warnings.
pub fn read_tracking<R: BufRead>(reader: R, grid: &PitchGrid) -> Result<Vec<TrackingFrame>> {
    let mut frames: Vec<TrackingFrame> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: FrameRecord = serde_json::from_str(&line)
            .map_err(|e| parse_err(line_no, format!("bad frame record: {e}")))?;
        if !record.timestamp_s.is_finite() {
            return Err(parse_err(line_no, "non-finite timestamp"));
        }
        let ball = Vec2::new(record.ball.x, record.ball.y);
        if !ball.is_finite() {
            return Err(parse_err(line_no, "non-finite ball position"));
        }
        let mut players = Vec::with_capacity(record.players.len());
        for p in record.players {
            let position = Vec2::new(p.x, p.y);
            if !position.is_finite() {
                return Err(parse_err(line_no, format!("player {}: non-finite position", p.player_id)));
            }
            if !grid.contains_with_margin(position, POSITION_MARGIN_M) {
                return Err(parse_err(
                    line_no,
                    format!(
                        "player {} at ({:.1}, {:.1}) outside pitch bounds plus {POSITION_MARGIN_M} m",
                        p.player_id, p.x, p.y
                    ),
                ));
            }
            if let Some(label) = &p.position {
                if !POSITION_LABELS.contains(&label.as_str()) {
                    return Err(parse_err(
                        line_no,
                        format!("player {}: unknown position label {label:?}", p.player_id),
                    ));
                }
            }
            if players
                .iter()
                .any(|q: &TrackingPlayer| q.player_id.as_str() == p.player_id)
            {
                return Err(parse_err(line_no, format!("duplicate player id {}", p.player_id)));
            }
            players.push(TrackingPlayer {
                player_id: PlayerId::new(p.player_id),
                team: p.team,
                position,
                head_angle: p.head_deg.map(f64::to_radians),
                shoulder_angle: p.shoulder_deg.map(f64::to_radians),
                hip_angle: p.hip_deg.map(f64::to_radians),
                position_label: p.position,
            });
        }
        if let Some(last) = frames.last() {
            if record.frame_id <= last.frame_id {
                return Err(parse_err(
                    line_no,
                    format!(
                        "frame ids must strictly increase: {} then {}",
                        last.frame_id, record.frame_id
                    ),
                ));
            }
            if record.timestamp_s < last.timestamp_s {
                return Err(parse_err(
                    line_no,
                    format!(
                        "timestamps must not decrease: {} then {}",
                        last.timestamp_s, record.timestamp_s
                    ),
                ));
            }
        }
        frames.push(TrackingFrame {
            frame_id: record.frame_id,
            timestamp_s: record.timestamp_s,
            ball,
            players,
        });
    }
    if frames.is_empty() {
        return Err(Error::NoFrames);
    }
    Ok(frames)
}

/// Infer the frame rate from median inter-frame spacing and compare with
/// the configured rate; returns a warning string on >1% mismatch.
pub fn check_frame_rate(frames: &[TrackingFrame], expected_fps: f64) -> Option<String> {
    if frames.len() < 2 {
        return None;
    }
    let mut gaps: Vec<f64> = frames
        .windows(2)
        .map(|w| w[1].timestamp_s - w[0].timestamp_s)
        .filter(|&g| g > 0.0)
        .collect();
    if gaps.is_empty() {
        return Some("all frame timestamps identical; cannot infer frame rate".into());
    }
    gaps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = gaps[gaps.len() / 2];
    let inferred = 1.0 / median;
    if (inferred - expected_fps).abs() / expected_fps > 0.01 {
        Some(format!(
            "inferred frame rate {inferred:.2} fps differs from configured {expected_fps:.2} fps by more than 1%"
        ))
    } else {
        None
    }
}

/// Serialize frames back to the line format (angles in degrees).
pub fn write_tracking<W: Write>(frames: &[TrackingFrame], mut w: W) -> Result<()> {
    for f in frames {
        let record = FrameRecord {
            frame_id: f.frame_id,
            timestamp_s: f.timestamp_s,
            ball: BallRecord {
                x: f.ball.x,
                y: f.ball.y,
            },
            players: f
                .players
                .iter()
                .map(|p| PlayerRecord {
                    player_id: p.player_id.to_string(),
                    team: p.team,
                    x: p.position.x,
                    y: p.position.y,
                    head_deg: p.head_angle.map(f64::to_degrees),
                    shoulder_deg: p.shoulder_angle.map(f64::to_degrees),
                    hip_deg: p.hip_angle.map(f64::to_degrees),
                    position: p.position_label.clone(),
                })
                .collect(),
        };
        serde_json::to_writer(&mut w, &record)?;
        writeln!(w)?;
    }
    Ok(())
}
