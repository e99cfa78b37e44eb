//! Run configuration: every tunable parameter, a flat `key = value` file
//! format, and a stable hash stamped onto outputs.
//!
//! Angles appear in degrees in the file and in radians in memory.
//! Unknown and duplicate keys are rejected so typos cannot silently fall
//! back to defaults.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::control::ControlParams;
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::grid::PitchGrid;
use crate::occlusion::{BodyModel, OcclusionParams};
use crate::phases::{FilterParams, PhaseParams};
use crate::value::{ValueParams, ValueSource};
use crate::vision::VisionParams;

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub frame_rate: f64,
    pub smoothing_window: usize,
    pub speed_clamp_m_s: f64,
    pub vision: VisionParams,
    pub body: BodyModel,
    pub occlusion: OcclusionParams,
    pub control: ControlParams,
    pub value: ValueParams,
    pub vea_threshold_deg_s: f64,
    pub phase: PhaseParams,
    pub filter: FilterParams,
    pub label_low: f64,
    pub label_high: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            frame_rate: 25.0,
            smoothing_window: 5,
            speed_clamp_m_s: crate::state::SPEED_CLAMP_M_S,
            vision: VisionParams::default(),
            body: BodyModel::default(),
            occlusion: OcclusionParams::default(),
            control: ControlParams::default(),
            value: ValueParams::default(),
            vea_threshold_deg_s: 125.0,
            phase: PhaseParams::default(),
            filter: FilterParams::default(),
            label_low: 0.35,
            label_high: 0.65,
        }
    }
}

const KEYS: [&str; 29] = [
    "alpha",
    "c_in",
    "eta_decay_m",
    "fov_total_deg",
    "frame_rate",
    "goal_x",
    "goal_y",
    "influence_horizon_s",
    "label_high",
    "label_low",
    "max_view_distance_m",
    "min_pair_distance_m",
    "on_ball_timeout_s",
    "radius_max_m",
    "radius_min_m",
    "reception_window_s",
    "require_uncontested",
    "set_piece_exclusion_s",
    "shoulder_width_m",
    "sigma_a_deg",
    "sigma_q_deg",
    "sigma_r_m",
    "smoothing_window",
    "speed_clamp_m_s",
    "speed_norm_m_s",
    "torso_depth_m",
    "value_source",
    "value_surface_path",
    "vea_threshold_deg_s",
];

impl Config {
    /// Parse the flat `key = value` format. Lines starting with `#` and
    /// blank lines are ignored; keys may appear at most once.
    pub fn from_str(text: &str) -> Result<Self> {
        let mut config = Config::default();
        let mut seen: Vec<&str> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config(format!(
                "line {}: expected key = value, got {line:?}",
                idx + 1
            )))?;
            let key = key.trim();
            let value = value.trim();
            let canonical = KEYS
                .iter()
                .find(|&&k| k == key)
                .ok_or_else(|| Error::Config(format!("unknown key {key:?}")))?;
            if seen.contains(canonical) {
                return Err(Error::Config(format!("duplicate key {key:?}")));
            }
            seen.push(canonical);
            config.apply(key, value)?;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_str(&text)
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::Config(format!("bad value for {key}: {what:?}"));
        let f = |v: &str| -> Result<f64> {
            if v.eq_ignore_ascii_case("inf") {
                return Ok(f64::INFINITY);
            }
            v.parse::<f64>().map_err(|_| bad(v))
        };
        match key {
            "frame_rate" => self.frame_rate = f(value)?,
            "smoothing_window" => {
                self.smoothing_window = value.parse().map_err(|_| bad(value))?
            }
            "speed_clamp_m_s" => self.speed_clamp_m_s = f(value)?,
            "fov_total_deg" => self.vision.fov_total_rad = f(value)?.to_radians(),
            "sigma_r_m" => self.vision.sigma_r_m = f(value)?,
            "sigma_a_deg" => self.vision.sigma_a_rad = f(value)?.to_radians(),
            "max_view_distance_m" => self.vision.max_view_distance_m = f(value)?,
            "shoulder_width_m" => self.body.shoulder_width_m = f(value)?,
            "torso_depth_m" => self.body.torso_depth_m = f(value)?,
            "alpha" => self.occlusion.alpha = f(value)?,
            "sigma_q_deg" => self.occlusion.sigma_q_rad = f(value)?.to_radians(),
            "min_pair_distance_m" => self.occlusion.min_pair_distance_m = f(value)?,
            "c_in" => self.control.c_in = f(value)?,
            "influence_horizon_s" => self.control.influence_horizon_s = f(value)?,
            "radius_min_m" => self.control.radius_min_m = f(value)?,
            "radius_max_m" => self.control.radius_max_m = f(value)?,
            "speed_norm_m_s" => self.control.speed_norm_m_s = f(value)?,
            "goal_x" => self.value.goal_center.x = f(value)?,
            "goal_y" => self.value.goal_center.y = f(value)?,
            "eta_decay_m" => self.value.eta_decay_m = f(value)?,
            "value_source" => {
                self.value.value_source = match value {
                    "external" => ValueSource::External,
                    "surrogate_defensive_influence" => ValueSource::SurrogateDefensiveInfluence,
                    _ => return Err(bad(value)),
                }
            }
            "value_surface_path" => {
                self.value.value_surface_path = if value.is_empty() {
                    None
                } else {
                    Some(PathBuf::from(value))
                }
            }
            "vea_threshold_deg_s" => self.vea_threshold_deg_s = f(value)?,
            "reception_window_s" => self.phase.reception_window_s = f(value)?,
            "on_ball_timeout_s" => self.phase.on_ball_timeout_s = f(value)?,
            "set_piece_exclusion_s" => self.filter.set_piece_exclusion_s = f(value)?,
            "require_uncontested" => {
                self.filter.require_uncontested = match value {
                    "true" => true,
                    "false" => false,
                    _ => return Err(bad(value)),
                }
            }
            "label_low" => self.label_low = f(value)?,
            "label_high" => self.label_high = f(value)?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.frame_rate > 0.0) {
            return Err(Error::Config("frame_rate must be positive".into()));
        }
        if self.smoothing_window == 0 || self.smoothing_window % 2 == 0 {
            return Err(Error::Config("smoothing_window must be odd and >= 1".into()));
        }
        if !(self.speed_clamp_m_s > 0.0) {
            return Err(Error::Config("speed_clamp_m_s must be positive".into()));
        }
        self.vision.validate()?;
        self.body.validate()?;
        self.occlusion.validate(&self.body)?;
        self.control.validate()?;
        self.value.validate(&PitchGrid::standard())?;
        if !(self.vea_threshold_deg_s > 0.0) {
            return Err(Error::Config("vea_threshold_deg_s must be positive".into()));
        }
        if !(self.phase.reception_window_s > 0.0 && self.phase.on_ball_timeout_s > 0.0) {
            return Err(Error::Config("phase windows must be positive".into()));
        }
        if self.filter.set_piece_exclusion_s < 0.0 {
            return Err(Error::Config("set_piece_exclusion_s must be >= 0".into()));
        }
        if !(0.0 <= self.label_low && self.label_low < self.label_high && self.label_high <= 1.0) {
            return Err(Error::Config(
                "labels require 0 <= label_low < label_high <= 1".into(),
            ));
        }
        Ok(())
    }

    /// The fully resolved parameter set in canonical order; the basis of
    /// the config hash and the `--config` report.
    pub fn resolved_text(&self) -> String {
        let goal = self.value.goal_center;
        let mut pairs: Vec<(&str, String)> = vec![
            ("alpha", self.occlusion.alpha.to_string()),
            ("c_in", self.control.c_in.to_string()),
            ("eta_decay_m", self.value.eta_decay_m.to_string()),
            ("fov_total_deg", self.vision.fov_total_rad.to_degrees().to_string()),
            ("frame_rate", self.frame_rate.to_string()),
            ("goal_x", goal.x.to_string()),
            ("goal_y", goal.y.to_string()),
            ("influence_horizon_s", self.control.influence_horizon_s.to_string()),
            ("label_high", self.label_high.to_string()),
            ("label_low", self.label_low.to_string()),
            ("max_view_distance_m", self.vision.max_view_distance_m.to_string()),
            ("min_pair_distance_m", self.occlusion.min_pair_distance_m.to_string()),
            ("on_ball_timeout_s", self.phase.on_ball_timeout_s.to_string()),
            ("radius_max_m", self.control.radius_max_m.to_string()),
            ("radius_min_m", self.control.radius_min_m.to_string()),
            ("reception_window_s", self.phase.reception_window_s.to_string()),
            ("require_uncontested", self.filter.require_uncontested.to_string()),
            ("set_piece_exclusion_s", self.filter.set_piece_exclusion_s.to_string()),
            ("shoulder_width_m", self.body.shoulder_width_m.to_string()),
            ("sigma_a_deg", self.vision.sigma_a_rad.to_degrees().to_string()),
            ("sigma_q_deg", self.occlusion.sigma_q_rad.to_degrees().to_string()),
            ("sigma_r_m", self.vision.sigma_r_m.to_string()),
            ("smoothing_window", self.smoothing_window.to_string()),
            ("speed_clamp_m_s", self.speed_clamp_m_s.to_string()),
            ("speed_norm_m_s", self.control.speed_norm_m_s.to_string()),
            ("torso_depth_m", self.body.torso_depth_m.to_string()),
            (
                "value_source",
                match self.value.value_source {
                    ValueSource::External => "external".to_string(),
                    ValueSource::SurrogateDefensiveInfluence => {
                        "surrogate_defensive_influence".to_string()
                    }
                },
            ),
            (
                "value_surface_path",
                self.value
                    .value_surface_path
                    .as_ref()
                    .map(|p| p.display().to_string())
                    .unwrap_or_default(),
            ),
            ("vea_threshold_deg_s", self.vea_threshold_deg_s.to_string()),
        ];
        pairs.sort_by_key(|(k, _)| *k);
        let mut out = String::new();
        for (k, v) in pairs {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    /// FNV-1a hash of the resolved parameter text, as 16 hex digits.
    pub fn hash(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in self.resolved_text().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{h:016x}")
    }

    /// Goal center as a point, for feature computation.
    pub fn goal_center(&self) -> Vec2 {
        self.value.goal_center
    }
}
