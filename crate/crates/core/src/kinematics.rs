//! Velocity and speed derivation from raw positions.
//!
//! Broadcast tracking exports carry positions only; velocities come from
//! central finite differences smoothed with a centered moving average,
//! with one-sided differences at sequence ends. Speeds are clamped to
//! [`crate::state::SPEED_CLAMP_M_S`] because frame-to-frame jitter
//! produces nonphysical spikes well above elite sprint speed.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::state::{Frame, PlayerId};

/// Derive per-player velocity and speed across a frame sequence.
///
/// `smoothing_window` must be odd and >= 1; it is the number of frames in
/// the centered moving average applied to the raw finite differences
/// (truncated near sequence ends). A player absent from both adjacent
/// frames gets zero velocity and a `velocity_fallback` flag.
pub fn derive_kinematics(
    frames: &[Frame],
    smoothing_window: usize,
    speed_clamp: f64,
) -> Result<Vec<Frame>> {
    if frames.len() < 2 {
        return Err(Error::TooFewFrames {
            need: 2,
            got: frames.len(),
        });
    }
    if smoothing_window == 0 || smoothing_window % 2 == 0 {
        return Err(Error::BadSmoothingWindow(smoothing_window));
    }

    // Index positions per player: player -> frame index -> position.
    let mut tracks: BTreeMap<PlayerId, BTreeMap<usize, Vec2>> = BTreeMap::new();
    for (fi, frame) in frames.iter().enumerate() {
        for p in &frame.players {
            tracks
                .entry(p.player_id.clone())
                .or_default()
                .insert(fi, p.position);
        }
    }

    // Raw finite-difference velocity per (player, frame index).
    let mut raw: BTreeMap<PlayerId, BTreeMap<usize, (Vec2, bool)>> = BTreeMap::new();
    for (id, track) in &tracks {
        let entry = raw.entry(id.clone()).or_default();
        for (&fi, _) in track {
            let prev = fi.checked_sub(1).and_then(|i| track.get(&i).map(|p| (i, *p)));
            let next = track.get(&(fi + 1)).map(|p| (fi + 1, *p));
            let v = match (prev, next) {
                (Some((pi, pp)), Some((ni, np))) => {
                    let dt = frames[ni].timestamp_s - frames[pi].timestamp_s;
                    Some((np - pp) * (1.0 / dt))
                }
                (Some((pi, pp)), None) => {
                    let dt = frames[fi].timestamp_s - frames[pi].timestamp_s;
                    Some((track[&fi] - pp) * (1.0 / dt))
                }
                (None, Some((ni, np))) => {
                    let dt = frames[ni].timestamp_s - frames[fi].timestamp_s;
                    Some((np - track[&fi]) * (1.0 / dt))
                }
                (None, None) => None,
            };
            match v {
                Some(v) if v.is_finite() => {
                    entry.insert(fi, (v, false));
                }
                _ => {
                    entry.insert(fi, (Vec2::ZERO, true));
                }
            }
        }
    }

    // Smooth, clamp, and write back.
    let half = smoothing_window / 2;
    let mut out = frames.to_vec();
    for (fi, frame) in out.iter_mut().enumerate() {
        for p in &mut frame.players {
            let series = &raw[&p.player_id];
            let (_, fallback) = series[&fi];
            let mut sum = Vec2::ZERO;
            let mut n = 0usize;
            for k in fi.saturating_sub(half)..=fi + half {
                if let Some(&(v, _)) = series.get(&k) {
                    sum = sum + v;
                    n += 1;
                }
            }
            let mut v = if n > 0 { sum * (1.0 / n as f64) } else { Vec2::ZERO };
            let mut clamped = false;
            let speed = v.norm();
            if speed > speed_clamp {
                v = v * (speed_clamp / speed);
                clamped = true;
            }
            p.velocity = v;
            p.speed = v.norm();
            p.flags.velocity_fallback = fallback;
            p.flags.speed_clamped = clamped;
        }
    }
    Ok(out)
}
