//! Per-sample feature assembly, labels, and dataset construction.
//!
//! One sample is one (player, frame) inside an awaiting phase. Vision
//! features summarize what share of the occupied space the receiver
//! actually observes, instantaneously and averaged from the phase start;
//! the label thresholds the end-over-now ratio of controlled pitch value.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::config::Config;
use crate::control::pitch_control;
use crate::error::{Error, Result};
use crate::geom::distance;
use crate::grid::{PitchGrid, Surface};
use crate::io::surface_file::ValueSurfaceStore;
use crate::occlusion::vision_map;
use crate::phases::{detect_vea, PhasePair, VeaEvent};
use crate::state::{Frame, PlayerId};
use crate::value::instantaneous_player_value;

/// Share of a control surface that falls under a vision map:
/// `sum(control * vision) / sum(control)`, or 0 when the control surface
/// is empty.
pub fn observed_ratio(control: &Surface, vision: &Surface) -> Result<f64> {
    if control.grid() != vision.grid() {
        return Err(Error::GridMismatch);
    }
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for (&c, &v) in control.values().iter().zip(vision.values()) {
        num += c as f64 * v as f64;
        den += c as f64;
    }
    if den == 0.0 {
        Ok(0.0)
    } else {
        Ok(num / den)
    }
}

/// The per-frame surfaces a vision feature aggregation consumes.
#[derive(Clone, Debug)]
pub struct FrameSurfaceBundle {
    /// Imminent control of the defending team.
    pub pc_def: Surface,
    /// Imminent control of the attacking team excluding the observer.
    pub pc_att_excl: Surface,
    /// The observer's vision map.
    pub vision: Surface,
}

/// Sums needed from one frame's surfaces.
#[derive(Clone, Copy, Debug, Default)]
struct FrameScalars {
    def_seen: f64,
    att_seen: f64,
    def_total: f64,
    att_total: f64,
    vision_total: f64,
    cells: f64,
}

fn frame_scalars(bundle: &FrameSurfaceBundle) -> Result<FrameScalars> {
    if bundle.pc_def.grid() != bundle.vision.grid()
        || bundle.pc_att_excl.grid() != bundle.vision.grid()
    {
        return Err(Error::GridMismatch);
    }
    let mut s = FrameScalars {
        cells: bundle.vision.grid().cell_count() as f64,
        ..FrameScalars::default()
    };
    for ((&d, &a), &v) in bundle
        .pc_def
        .values()
        .iter()
        .zip(bundle.pc_att_excl.values())
        .zip(bundle.vision.values())
    {
        let (d, a, v) = (d as f64, a as f64, v as f64);
        s.def_seen += d * v;
        s.att_seen += a * v;
        s.def_total += d;
        s.att_total += a;
        s.vision_total += v;
    }
    Ok(s)
}

/// The eight aggregated vision features of one sample.
///
/// Means run over the awaiting span up to and including the sample frame;
/// `e` and `h` are instantaneous at the sample frame. `zero_denominator`
/// notes that at least one ratio fell back to 0 on an empty denominator.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct VisionFeatures {
    /// Mean observed defensive control as a share of the whole pitch.
    pub a: f64,
    /// Mean ratio of observed defensive to observed attacking control.
    pub b: f64,
    /// Mean observed attacking control as a share of the whole pitch.
    pub c: f64,
    /// Mean share of attacking-controlled space observed.
    pub d: f64,
    /// Instantaneous share of attacking-controlled space observed.
    pub e: f64,
    /// Mean observed share of the whole pitch.
    pub f: f64,
    /// Mean share of defensive-controlled space observed.
    pub g: f64,
    /// Instantaneous share of defensive-controlled space observed.
    pub h: f64,
    pub zero_denominator: bool,
}

fn aggregate(scalars: &[FrameScalars]) -> Result<VisionFeatures> {
    if scalars.is_empty() {
        return Err(Error::EmptySpan);
    }
    let mut out = VisionFeatures::default();
    let n = scalars.len() as f64;
    let ratio = |num: f64, den: f64, flag: &mut bool| -> f64 {
        if den == 0.0 {
            *flag = true;
            0.0
        } else {
            num / den
        }
    };
    let mut flag = false;
    for s in scalars {
        out.a += s.def_seen / s.cells;
        out.b += ratio(s.def_seen, s.att_seen, &mut flag);
        out.c += s.att_seen / s.cells;
        out.d += ratio(s.att_seen, s.att_total, &mut flag);
        out.f += s.vision_total / s.cells;
        out.g += ratio(s.def_seen, s.def_total, &mut flag);
    }
    out.a /= n;
    out.b /= n;
    out.c /= n;
    out.d /= n;
    out.f /= n;
    out.g /= n;
    let last = scalars.last().unwrap();
    out.e = ratio(last.att_seen, last.att_total, &mut flag);
    out.h = ratio(last.def_seen, last.def_total, &mut flag);
    out.zero_denominator = flag;
    Ok(out)
}

/// Aggregate vision features over an awaiting span; the last bundle is
/// the sample frame.
pub fn vision_features(span: &[FrameSurfaceBundle]) -> Result<VisionFeatures> {
    let scalars: Vec<FrameScalars> = span.iter().map(frame_scalars).collect::<Result<_>>()?;
    aggregate(&scalars)
}

/// End-over-now ratio of controlled pitch value.
pub fn value_ratio(p_now: f64, p_end: f64) -> Result<f64> {
    debug_assert!(p_now >= 0.0 && p_end >= 0.0);
    if p_now == 0.0 && p_end == 0.0 {
        return Err(Error::ValueRatioUndefined);
    }
    Ok(p_end / (p_now + p_end))
}

/// Label a value ratio: 0 below `low`, 1 above `high`, excluded between
/// (inclusive band edges).
pub fn assign_label(p_rat: f64, low: f64, high: f64) -> Option<u8> {
    if p_rat < low {
        Some(0)
    } else if p_rat > high {
        Some(1)
    } else {
        None
    }
}

/// All features of one sample.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    pub dist_to_goal_center: f64,
    pub vea_count_1s: u32,
    pub vea_count_2s: u32,
    pub vea_count_since_await_start: u32,
    /// Perpendicular distance to the opponent's goal line.
    pub dist_to_goal_line: f64,
    pub dist_to_center_x: f64,
    pub dist_to_center_y: f64,
    pub v_x: f64,
    pub v_y: f64,
    pub position_label: Option<String>,
    pub vision: VisionFeatures,
}

/// One (player, frame) observation inside an awaiting phase.
#[derive(Clone, Debug)]
pub struct Sample {
    pub match_id: String,
    pub pair_id: String,
    pub frame_id: u64,
    pub player_id: PlayerId,
    pub features: FeatureVector,
    pub p_rat: f64,
    /// Present only outside the exclusion band.
    pub label: Option<u8>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DatasetCounts {
    pub pairs_in: usize,
    pub pairs_emitted: usize,
    pub pairs_dropped_zero_value: usize,
    pub samples: usize,
    pub labeled_increase: usize,
    pub labeled_decrease: usize,
    pub excluded: usize,
}

#[derive(Clone, Debug, Default)]
pub struct DatasetBuild {
    pub samples: Vec<Sample>,
    pub counts: DatasetCounts,
}

fn frame_index(frames: &[Frame], frame_id: u64) -> Result<usize> {
    frames
        .binary_search_by_key(&frame_id, |f| f.frame_id)
        .map_err(|_| Error::FrameNotFound(frame_id))
}

fn count_vea_in(events: &[VeaEvent], frames: &[Frame], t_from: f64, t_to: f64) -> u32 {
    events
        .iter()
        .filter(|e| {
            frame_index(frames, e.frame_id)
                .map(|i| {
                    let ts = frames[i].timestamp_s;
                    ts > t_from && ts <= t_to
                })
                .unwrap_or(false)
        })
        .count() as u32
}

/// Build one sample per awaiting-phase frame per pair.
///
/// The value ratio is computed once per pair, from the controlled pitch
/// value at the awaiting start against the on-ball end; every sample of
/// the pair shares it and its label. Pairs whose two pitch values are
/// both zero are dropped. Output is ordered by (pair, frame).
pub fn build_dataset(
    pairs: &[PhasePair],
    frames: &[Frame],
    match_id: &str,
    config: &Config,
    store: Option<&ValueSurfaceStore>,
) -> Result<DatasetBuild> {
    let grid = PitchGrid::standard();
    let mut build = DatasetBuild {
        counts: DatasetCounts {
            pairs_in: pairs.len(),
            ..DatasetCounts::default()
        },
        ..DatasetBuild::default()
    };
    let mut vea_cache: HashMap<PlayerId, Vec<VeaEvent>> = HashMap::new();

    let mut ordered: Vec<&PhasePair> = pairs.iter().collect();
    ordered.sort_by(|a, b| a.pair_id.cmp(&b.pair_id));

    for pair in ordered {
        let receiver = &pair.awaiting.player_id;
        let start_idx = frame_index(frames, pair.awaiting.t_start)?;
        let end_idx = frame_index(frames, pair.awaiting.t_end)?;
        let on_ball_end_idx = frame_index(frames, pair.on_ball.t_end)?;

        let p_now = instantaneous_player_value(
            &frames[start_idx],
            receiver,
            &grid,
            &config.control,
            &config.value,
            store,
        )?;
        let p_end = instantaneous_player_value(
            &frames[on_ball_end_idx],
            receiver,
            &grid,
            &config.control,
            &config.value,
            store,
        )?;
        let p_rat = match value_ratio(p_now, p_end) {
            Ok(r) => r,
            Err(Error::ValueRatioUndefined) => {
                build.counts.pairs_dropped_zero_value += 1;
                continue;
            }
            Err(other) => return Err(other),
        };
        let label = assign_label(p_rat, config.label_low, config.label_high);

        let vea_events = vea_cache.entry(receiver.clone()).or_insert_with(|| {
            detect_vea(frames, receiver, None, config.vea_threshold_deg_s)
        });
        let await_start_ts = frames[start_idx].timestamp_s;

        // Surfaces and their sums for every awaiting frame. Frames are
        // independent; the parallel map preserves order.
        let scalars: Vec<FrameScalars> = frames[start_idx..end_idx]
            .par_iter()
            .map(|frame| {
                let control = pitch_control(frame, &grid, &config.control, Some(receiver))?;
                let vision = vision_map(
                    frame
                        .player(receiver)
                        .ok_or_else(|| Error::PlayerNotFound(receiver.to_string()))?,
                    &frame.others(receiver),
                    &grid,
                    &config.vision,
                    &config.body,
                    &config.occlusion,
                )?;
                frame_scalars(&FrameSurfaceBundle {
                    pc_def: control.defending,
                    pc_att_excl: control.attacking_excl_i,
                    vision: vision.surface,
                })
            })
            .collect::<Result<_>>()?;

        for (k, frame) in frames[start_idx..end_idx].iter().enumerate() {
            let player = frame
                .player(receiver)
                .ok_or_else(|| Error::PlayerNotFound(receiver.to_string()))?;
            let ts = frame.timestamp_s;
            let vision = aggregate(&scalars[..=k])?;
            let features = FeatureVector {
                dist_to_goal_center: distance(player.position, config.value.goal_center),
                vea_count_1s: count_vea_in(vea_events, frames, ts - 1.0, ts),
                vea_count_2s: count_vea_in(vea_events, frames, ts - 2.0, ts),
                vea_count_since_await_start: count_vea_in(
                    vea_events,
                    frames,
                    await_start_ts - f64::EPSILON,
                    ts,
                ),
                dist_to_goal_line: (config.value.goal_center.x - player.position.x).abs(),
                dist_to_center_x: player.position.x.abs(),
                dist_to_center_y: player.position.y.abs(),
                v_x: player.velocity.x,
                v_y: player.velocity.y,
                position_label: player.position_label.clone(),
                vision,
            };
            build.samples.push(Sample {
                match_id: match_id.to_string(),
                pair_id: pair.pair_id.clone(),
                frame_id: frame.frame_id,
                player_id: receiver.clone(),
                features,
                p_rat,
                label,
            });
            build.counts.samples += 1;
            match label {
                Some(1) => build.counts.labeled_increase += 1,
                Some(_) => build.counts.labeled_decrease += 1,
                None => build.counts.excluded += 1,
            }
        }
        build.counts.pairs_emitted += 1;
    }
    Ok(build)
}
