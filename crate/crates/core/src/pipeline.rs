//! Pipeline glue: raw tracking to kernel-ready frames, and the per-frame
//! surface stack with optional frame-level parallelism.

use rayon::prelude::*;

use crate::angles::interpolate_angles;
use crate::config::Config;
use crate::control::{pitch_control, TeamControlSurfaces};
use crate::error::{Error, Result};
use crate::grid::{PitchGrid, Surface};
use crate::io::tracking::{check_frame_rate, TrackingFrame};
use crate::kinematics::derive_kinematics;
use crate::occlusion::vision_map;
use crate::state::{Frame, PlayerId, PlayerState, Team};

/// Turn raw tracking frames into kernel-ready frames: interpolate missing
/// body angles per player, then derive velocities and speeds. Returns the
/// frames plus non-fatal warnings.
pub fn prepare_frames(
    tracking: &[TrackingFrame],
    config: &Config,
) -> Result<(Vec<Frame>, Vec<String>)> {
    if tracking.is_empty() {
        return Err(Error::NoFrames);
    }
    let mut warnings = Vec::new();
    if let Some(w) = check_frame_rate(tracking, config.frame_rate) {
        warnings.push(w);
    }

    // Appearance list per player: (frame index, player index in frame).
    let mut appearances: std::collections::BTreeMap<PlayerId, Vec<(usize, usize)>> =
        std::collections::BTreeMap::new();
    for (fi, frame) in tracking.iter().enumerate() {
        for (pi, p) in frame.players.iter().enumerate() {
            appearances
                .entry(p.player_id.clone())
                .or_default()
                .push((fi, pi));
        }
    }

    // Interpolated angles per player, aligned with the appearance list.
    struct PlayerAngles {
        head: Vec<f64>,
        shoulder: Vec<f64>,
        hip: Vec<f64>,
        head_missing: Vec<bool>,
        shoulder_missing: Vec<bool>,
        hip_missing: Vec<bool>,
        antipodal: Vec<bool>,
    }
    let mut angles: std::collections::BTreeMap<PlayerId, PlayerAngles> =
        std::collections::BTreeMap::new();
    for (id, appear) in &appearances {
        let series = |pick: &dyn Fn(&crate::io::tracking::TrackingPlayer) -> Option<f64>| {
            appear
                .iter()
                .map(|&(fi, pi)| (tracking[fi].timestamp_s, pick(&tracking[fi].players[pi])))
                .collect::<Vec<_>>()
        };
        let head_series = series(&|p| p.head_angle);
        let shoulder_series = series(&|p| p.shoulder_angle);
        let hip_series = series(&|p| p.hip_angle);

        let head = interpolate_angles(&head_series).map_err(|_| {
            Error::Pipeline(format!("player {id}: no head angle data in any frame"))
        })?;
        let shoulder = interpolate_angles(&shoulder_series).map_err(|_| {
            Error::Pipeline(format!("player {id}: no shoulder angle data in any frame"))
        })?;
        // The hip angle is carried but unused; an absent series falls
        // back to zero rather than failing the run.
        let (hip_values, hip_antipodal) = match interpolate_angles(&hip_series) {
            Ok(out) => (
                out.samples.iter().map(|&(_, a)| a).collect::<Vec<_>>(),
                out.antipodal_fallbacks,
            ),
            Err(_) => (vec![0.0; appear.len()], Vec::new()),
        };

        let mut antipodal = vec![false; appear.len()];
        for &i in head
            .antipodal_fallbacks
            .iter()
            .chain(&shoulder.antipodal_fallbacks)
            .chain(&hip_antipodal)
        {
            antipodal[i] = true;
        }
        angles.insert(
            id.clone(),
            PlayerAngles {
                head: head.samples.iter().map(|&(_, a)| a).collect(),
                shoulder: shoulder.samples.iter().map(|&(_, a)| a).collect(),
                hip: hip_values,
                head_missing: head_series.iter().map(|(_, a)| a.is_none()).collect(),
                shoulder_missing: shoulder_series.iter().map(|(_, a)| a.is_none()).collect(),
                hip_missing: hip_series.iter().map(|(_, a)| a.is_none()).collect(),
                antipodal,
            },
        );
    }

    // Index of each appearance within its player's list.
    let mut appearance_rank: std::collections::HashMap<(usize, usize), usize> =
        std::collections::HashMap::new();
    for appear in appearances.values() {
        for (rank, &key) in appear.iter().enumerate() {
            appearance_rank.insert(key, rank);
        }
    }

    let mut frames = Vec::with_capacity(tracking.len());
    for (fi, t) in tracking.iter().enumerate() {
        let mut players = Vec::with_capacity(t.players.len());
        for (pi, p) in t.players.iter().enumerate() {
            let rank = appearance_rank[&(fi, pi)];
            let a = &angles[&p.player_id];
            let mut state = PlayerState::new(
                p.player_id.clone(),
                p.team,
                p.position,
                crate::geom::Vec2::ZERO,
                a.head[rank],
                a.shoulder[rank],
                a.hip[rank],
            )
            .with_position_label(p.position_label.clone());
            state.flags.missing_head_angle = a.head_missing[rank];
            state.flags.missing_shoulder_angle = a.shoulder_missing[rank];
            state.flags.missing_hip_angle = a.hip_missing[rank];
            state.flags.antipodal_angle_fallback = a.antipodal[rank];
            players.push(state);
        }
        frames.push(Frame::new(t.frame_id, t.timestamp_s, t.ball, players));
    }

    let frames = if frames.len() >= 2 {
        derive_kinematics(&frames, config.smoothing_window, config.speed_clamp_m_s)?
    } else {
        frames
    };
    Ok((frames, warnings))
}

/// All surfaces of the full per-frame workload: one vision map per player
/// plus the control surfaces.
pub struct FrameStack {
    pub frame_id: u64,
    pub vision_maps: Vec<(PlayerId, Surface)>,
    pub control: TeamControlSurfaces,
    pub skipped_pairs: usize,
}

/// Compute the full 22-player vision/occlusion/control stack for one
/// frame. The control perspective is the first attacker by id.
pub fn frame_stack(frame: &Frame, grid: &PitchGrid, config: &Config) -> Result<FrameStack> {
    let mut players: Vec<&PlayerState> = frame.players.iter().collect();
    players.sort_by(|a, b| a.player_id.cmp(&b.player_id));
    let mut vision_maps = Vec::with_capacity(players.len());
    let mut skipped = 0usize;
    for p in &players {
        let others = frame.others(&p.player_id);
        let out = vision_map(
            p,
            &others,
            grid,
            &config.vision,
            &config.body,
            &config.occlusion,
        )?;
        skipped += out.skipped_pairs.len();
        vision_maps.push((p.player_id.clone(), out.surface));
    }
    let perspective = players
        .iter()
        .find(|p| p.team == Team::Attacking)
        .map(|p| p.player_id.clone());
    let control = pitch_control(frame, grid, &config.control, perspective.as_ref())?;
    Ok(FrameStack {
        frame_id: frame.frame_id,
        vision_maps,
        control,
        skipped_pairs: skipped,
    })
}

/// Run the stack over many frames. With `threads <= 1` the frames are
/// processed serially on the caller's thread; otherwise a dedicated pool
/// maps them in parallel. Output order always matches input order and
/// the surfaces are identical either way.
pub fn frame_stack_batch(
    frames: &[Frame],
    grid: &PitchGrid,
    config: &Config,
    threads: usize,
) -> Result<Vec<FrameStack>> {
    if threads <= 1 {
        return frames.iter().map(|f| frame_stack(f, grid, config)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Pipeline(format!("thread pool: {e}")))?;
    pool.install(|| {
        frames
            .par_iter()
            .map(|f| frame_stack(f, grid, config))
            .collect()
    })
}
