//! Event/tracking fusion and phase extraction.
//!
//! Events are snapped to tracking frames by nearest timestamp. A
//! successful pass with a known receiver opens an *awaiting* phase that
//! runs until the reception — the first local minimum of the
//! receiver-ball distance — and the paired *on-ball* phase runs from the
//! reception to the receiver's next ball release. Open-play filtering
//! drops pairs too close to a set piece. Rapid head turns (VEAs) are
//! detected from wrapped angular velocity and merged over consecutive
//! frames.

use serde::{Deserialize, Serialize};

use crate::angles::wrap_diff;
use crate::error::{Error, Result};
use crate::geom::{distance, Vec2};
use crate::state::{Frame, PlayerId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Pass,
    Reception,
    CarryOrDribble,
    Shot,
    SetPiece,
    Other,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    Failure,
    Unknown,
}

/// One on-ball event from the event feed.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchEvent {
    pub event_id: String,
    pub kind: EventKind,
    pub timestamp_s: f64,
    pub team_id: String,
    pub player_id: Option<PlayerId>,
    pub receiver_id: Option<PlayerId>,
    pub location: Vec2,
    pub outcome: Outcome,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhaseKind {
    Awaiting,
    OnBall,
}

/// A frame span attributed to one player.
///
/// Awaiting phases cover `[t_start, t_end)` — the end frame is the
/// reception. On-ball phases cover `[t_start, t_end]` inclusive.
#[derive(Clone, Debug, PartialEq)]
pub struct Phase {
    pub kind: PhaseKind,
    pub player_id: PlayerId,
    pub t_start: u64,
    pub t_end: u64,
}

/// An awaiting phase and the on-ball phase it feeds; the reception frame
/// is shared (`awaiting.t_end == on_ball.t_start`).
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePair {
    /// Event id of the initiating pass.
    pub pair_id: String,
    pub pass_event_index: usize,
    pub awaiting: Phase,
    pub on_ball: Phase,
}

/// A rapid head movement: one merged run of frames whose head angular
/// velocity exceeds the detection threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct VeaEvent {
    pub player_id: PlayerId,
    /// First frame of the run.
    pub frame_id: u64,
    /// Last frame of the run.
    pub last_frame_id: u64,
    /// Peak angular velocity over the run, degrees per second.
    pub angular_velocity: f64,
}

/// Result of snapping events onto frames.
#[derive(Clone, Debug)]
pub struct SyncedEvents {
    /// `(event index, frame id)` for every in-range event.
    pub mapped: Vec<(usize, u64)>,
    /// Indices of events outside the tracking time range.
    pub dropped: Vec<usize>,
}

impl SyncedEvents {
    pub fn frame_for(&self, event_index: usize) -> Option<u64> {
        self.mapped
            .iter()
            .find(|(idx, _)| *idx == event_index)
            .map(|&(_, f)| f)
    }
}

/// Snap each event to the frame with the closest timestamp; ties break
/// toward the earlier frame. Events outside the frame range are dropped
/// and reported.
pub fn sync_events(events: &[MatchEvent], frames: &[Frame]) -> Result<SyncedEvents> {
    if events.is_empty() || frames.is_empty() {
        return Err(Error::NoTemporalOverlap);
    }
    let t_first = frames.first().unwrap().timestamp_s;
    let t_last = frames.last().unwrap().timestamp_s;
    let e_first = events
        .iter()
        .map(|e| e.timestamp_s)
        .fold(f64::INFINITY, f64::min);
    let e_last = events
        .iter()
        .map(|e| e.timestamp_s)
        .fold(f64::NEG_INFINITY, f64::max);
    if e_last < t_first || e_first > t_last {
        return Err(Error::NoTemporalOverlap);
    }

    let mut mapped = Vec::with_capacity(events.len());
    let mut dropped = Vec::new();
    for (idx, event) in events.iter().enumerate() {
        let t = event.timestamp_s;
        if t < t_first || t > t_last {
            dropped.push(idx);
            continue;
        }
        // First frame with timestamp >= t.
        let after = frames.partition_point(|f| f.timestamp_s < t);
        let candidate = if after == 0 {
            0
        } else if after >= frames.len() {
            frames.len() - 1
        } else {
            let before = after - 1;
            let d_before = t - frames[before].timestamp_s;
            let d_after = frames[after].timestamp_s - t;
            if d_before <= d_after {
                before
            } else {
                after
            }
        };
        mapped.push((idx, frames[candidate].frame_id));
    }
    Ok(SyncedEvents { mapped, dropped })
}

fn frame_index(frames: &[Frame], frame_id: u64) -> Result<usize> {
    frames
        .binary_search_by_key(&frame_id, |f| f.frame_id)
        .map_err(|_| Error::FrameNotFound(frame_id))
}

/// Find the reception frame: scanning forward from the pass frame, the
/// first frame where the receiver-ball distance is a local minimum
/// (`d(f-1) > d(f) <= d(f+1)`), within `window_s` of the pass.
pub fn detect_reception(
    pass_frame: u64,
    receiver: &PlayerId,
    frames: &[Frame],
    window_s: f64,
) -> Result<u64> {
    let start = frame_index(frames, pass_frame)?;
    let t_limit = frames[start].timestamp_s + window_s;
    let dist_at = |i: usize| -> Option<f64> {
        frames[i]
            .player(receiver)
            .map(|p| distance(p.position, frames[i].ball))
    };
    let not_found = Error::ReceptionNotFound {
        pass_frame,
        window_s,
    };
    for f in (start + 1)..frames.len() {
        if frames[f].timestamp_s > t_limit {
            break;
        }
        if f + 1 >= frames.len() {
            break;
        }
        let (Some(prev), Some(here), Some(next)) = (dist_at(f - 1), dist_at(f), dist_at(f + 1))
        else {
            continue;
        };
        if prev > here && here <= next {
            return Ok(frames[f].frame_id);
        }
    }
    Err(not_found)
}

/// Phase-extraction tunables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseParams {
    /// How long after the pass a reception may occur.
    pub reception_window_s: f64,
    /// How long after the reception to look for the ball release.
    pub on_ball_timeout_s: f64,
}

impl Default for PhaseParams {
    fn default() -> Self {
        PhaseParams {
            reception_window_s: 10.0,
            on_ball_timeout_s: 15.0,
        }
    }
}

/// Why a candidate pass produced no phase pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DropReason {
    ReceptionNotFound,
    EventOutsideFrames,
}

#[derive(Clone, Debug, Default)]
pub struct PhaseExtraction {
    pub pairs: Vec<PhasePair>,
    pub dropped: Vec<(usize, DropReason)>,
}

/// Pair every successful pass with its awaiting and on-ball phases.
///
/// The on-ball phase ends at the receiver's next ball-releasing event
/// (pass or shot); absent one within the timeout, at the last frame in
/// the window where the receiver is the player nearest the ball.
pub fn extract_phases(
    events: &[MatchEvent],
    frames: &[Frame],
    synced: &SyncedEvents,
    params: &PhaseParams,
) -> PhaseExtraction {
    let mut out = PhaseExtraction::default();
    for &(idx, pass_frame) in &synced.mapped {
        let event = &events[idx];
        if event.kind != EventKind::Pass || event.outcome != Outcome::Success {
            continue;
        }
        let Some(receiver) = &event.receiver_id else {
            continue;
        };
        let reception = match detect_reception(pass_frame, receiver, frames, params.reception_window_s)
        {
            Ok(f) => f,
            Err(_) => {
                out.dropped.push((idx, DropReason::ReceptionNotFound));
                continue;
            }
        };
        let reception_idx = frame_index(frames, reception).expect("reception frame exists");
        let reception_ts = frames[reception_idx].timestamp_s;
        let t_limit = reception_ts + params.on_ball_timeout_s;

        // Next ball release by the receiver.
        let mut release: Option<u64> = None;
        for &(j, f) in &synced.mapped {
            let e = &events[j];
            if j == idx || e.player_id.as_ref() != Some(receiver) {
                continue;
            }
            if !matches!(e.kind, EventKind::Pass | EventKind::Shot) {
                continue;
            }
            if f >= reception && e.timestamp_s <= t_limit {
                release = Some(match release {
                    Some(r) => r.min(f),
                    None => f,
                });
            }
        }
        let end = release.unwrap_or_else(|| {
            // Fallback: last frame within the window where the receiver
            // is nearest to the ball.
            let mut best = reception;
            for f in frames[reception_idx..]
                .iter()
                .take_while(|f| f.timestamp_s <= t_limit)
            {
                let Some(rec) = f.player(receiver) else { continue };
                let d_rec = distance(rec.position, f.ball);
                let nearest = f
                    .players
                    .iter()
                    .all(|p| &p.player_id == receiver || distance(p.position, f.ball) >= d_rec);
                if nearest {
                    best = f.frame_id;
                }
            }
            best
        });

        out.pairs.push(PhasePair {
            pair_id: event.event_id.clone(),
            pass_event_index: idx,
            awaiting: Phase {
                kind: PhaseKind::Awaiting,
                player_id: receiver.clone(),
                t_start: pass_frame,
                t_end: reception,
            },
            on_ball: Phase {
                kind: PhaseKind::OnBall,
                player_id: receiver.clone(),
                t_start: reception,
                t_end: end,
            },
        });
    }
    out
}

/// Open-play filter tunables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilterParams {
    /// Minimum seconds since the latest preceding set piece (inclusive).
    pub set_piece_exclusion_s: f64,
    /// Drop pairs with an opponent event between pass and reception.
    pub require_uncontested: bool,
}

impl Default for FilterParams {
    fn default() -> Self {
        FilterParams {
            set_piece_exclusion_s: 7.0,
            require_uncontested: true,
        }
    }
}

/// Keep pairs that start at least the exclusion interval after the most
/// recent set piece, belong to a possession with at least one successful
/// pass, and (optionally) are uncontested between pass and reception.
pub fn filter_open_play(
    pairs: Vec<PhasePair>,
    events: &[MatchEvent],
    frames: &[Frame],
    params: &FilterParams,
) -> Vec<PhasePair> {
    pairs
        .into_iter()
        .filter(|pair| {
            let pass = &events[pair.pass_event_index];
            let Ok(start_idx) = frame_index(frames, pair.awaiting.t_start) else {
                return false;
            };
            let start_ts = frames[start_idx].timestamp_s;
            let last_set_piece = events
                .iter()
                .filter(|e| e.kind == EventKind::SetPiece && e.timestamp_s <= start_ts)
                .map(|e| e.timestamp_s)
                .fold(f64::NEG_INFINITY, f64::max);
            if last_set_piece.is_finite() && start_ts - last_set_piece < params.set_piece_exclusion_s
            {
                return false;
            }
            let has_successful_pass = events.iter().any(|e| {
                e.kind == EventKind::Pass
                    && e.outcome == Outcome::Success
                    && e.timestamp_s <= start_ts
                    && (!last_set_piece.is_finite() || e.timestamp_s > last_set_piece)
            });
            if !has_successful_pass {
                return false;
            }
            if params.require_uncontested {
                let Ok(rec_idx) = frame_index(frames, pair.awaiting.t_end) else {
                    return false;
                };
                let rec_ts = frames[rec_idx].timestamp_s;
                let contested = events.iter().any(|e| {
                    e.team_id != pass.team_id
                        && e.timestamp_s > start_ts
                        && e.timestamp_s < rec_ts
                });
                if contested {
                    return false;
                }
            }
            true
        })
        .collect()
}

/// Detect rapid head movements from per-pair angular rates.
///
/// `rates` holds `(frame_id, deg_per_s)` for consecutive frame pairs in
/// order; adjacent entries are adjacent frames. Runs of entries above the
/// threshold merge into one event carrying the run's peak rate.
pub fn detect_vea_from_rates(
    player_id: &PlayerId,
    rates: &[(u64, f64)],
    threshold_deg_s: f64,
) -> Vec<VeaEvent> {
    let mut events = Vec::new();
    let mut run: Option<VeaEvent> = None;
    for &(frame_id, rate) in rates {
        if rate > threshold_deg_s {
            match &mut run {
                Some(ev) => {
                    ev.last_frame_id = frame_id;
                    if rate > ev.angular_velocity {
                        ev.angular_velocity = rate;
                    }
                }
                None => {
                    run = Some(VeaEvent {
                        player_id: player_id.clone(),
                        frame_id,
                        last_frame_id: frame_id,
                        angular_velocity: rate,
                    });
                }
            }
        } else if let Some(ev) = run.take() {
            events.push(ev);
        }
    }
    if let Some(ev) = run.take() {
        events.push(ev);
    }
    events
}

/// Detect rapid head movements for one player over a frame range
/// (inclusive; `None` means the whole sequence).
pub fn detect_vea(
    frames: &[Frame],
    player_id: &PlayerId,
    window: Option<(u64, u64)>,
    threshold_deg_s: f64,
) -> Vec<VeaEvent> {
    let in_window = |id: u64| match window {
        Some((lo, hi)) => id >= lo && id <= hi,
        None => true,
    };
    let mut rates = Vec::new();
    for w in frames.windows(2) {
        let (prev, here) = (&w[0], &w[1]);
        if !in_window(here.frame_id) {
            continue;
        }
        let (Some(p0), Some(p1)) = (prev.player(player_id), here.player(player_id)) else {
            continue;
        };
        let dt = here.timestamp_s - prev.timestamp_s;
        if dt <= 0.0 {
            continue;
        }
        let rate = wrap_diff(p1.head_angle, p0.head_angle).abs().to_degrees() / dt;
        rates.push((here.frame_id, rate));
    }
    detect_vea_from_rates(player_id, &rates, threshold_deg_s)
}
