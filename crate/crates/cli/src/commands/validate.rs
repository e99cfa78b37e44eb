use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use anyhow::{bail, Result};
use gazegrid_core::angles::normalize_angle;
use gazegrid_core::config::Config;
use gazegrid_core::control::pitch_control;
use gazegrid_core::features::assign_label;
use gazegrid_core::geom::Vec2;
use gazegrid_core::grid::PitchGrid;
use gazegrid_core::io::surface_file::{read_surface, write_surface};
use gazegrid_core::occlusion::{combined_visibility, pair_occlusion};
use gazegrid_core::pipeline::prepare_frames;
use gazegrid_core::state::validate_sequence;
use gazegrid_core::synthetic::synthetic_frames;
use gazegrid_core::value::eta_surface;
use gazegrid_core::vision::{
    angular_decay, binary_fov_at, field_of_view_at, radial_decay, speed_scaling,
};

type Check = (&'static str, fn(&Config) -> std::result::Result<(), String>);

fn deterministic_points(n: usize) -> Vec<Vec2> {
    // Low-discrepancy-ish lattice over the pitch, no RNG dependency.
    (0..n)
        .map(|i| {
            let t = i as f64 + 0.5;
            let x = (t * 0.754877666246693).fract() * 104.0 - 52.0;
            let y = (t * 0.569840290998053).fract() * 67.0 - 33.5;
            Vec2::new(x, y)
        })
        .collect()
}

fn check_angle_normalization(_: &Config) -> std::result::Result<(), String> {
    for i in 0..10_000 {
        let theta = (i as f64 * 0.02) - 100.0;
        let once = normalize_angle(theta);
        let twice = normalize_angle(once);
        if once.to_bits() != twice.to_bits() {
            return Err(format!("not idempotent at {theta}"));
        }
        if !(once > -std::f64::consts::PI && once <= std::f64::consts::PI) {
            return Err(format!("{theta} normalized out of range: {once}"));
        }
    }
    Ok(())
}

fn check_speed_scaling(_: &Config) -> std::result::Result<(), String> {
    let cases = [(0.0, 0.2, 0.1), (1.0, 0.5, 0.35), (10.0, 0.5, 2.6)];
    for (v, c_a, c_r) in cases {
        let s = speed_scaling(v).map_err(|e| e.to_string())?;
        if s.c_a != c_a || s.c_r != c_r {
            return Err(format!("speed {v}: got ({}, {}), want ({c_a}, {c_r})", s.c_a, s.c_r));
        }
    }
    Ok(())
}

fn check_fov_range_and_factorization(config: &Config) -> std::result::Result<(), String> {
    let frames = synthetic_frames(3, 11);
    let params = &config.vision;
    for frame in &frames {
        for player in &frame.players {
            let scaling = speed_scaling(player.speed).map_err(|e| e.to_string())?;
            for point in deterministic_points(60) {
                let v = field_of_view_at(player, point, params).map_err(|e| e.to_string())?;
                if !(0.0..=1.0).contains(&v) {
                    return Err(format!("value {v} out of range"));
                }
                let b = binary_fov_at(player, point, params).map_err(|e| e.to_string())?;
                if b == 0.0 && v != 0.0 {
                    return Err("nonzero outside the wedge".into());
                }
                let d = gazegrid_core::geom::distance(player.position, point);
                let theta = gazegrid_core::angles::wrap_diff(
                    gazegrid_core::angles::angle_to(player.position, point)
                        .map_err(|e| e.to_string())?,
                    player.head_angle,
                )
                .abs();
                let product = radial_decay(d, &scaling, params)
                    * angular_decay(theta, &scaling, params)
                    * b;
                if b == 1.0 && v != product {
                    return Err(format!("factorization mismatch: {v} vs {product}"));
                }
            }
        }
    }
    Ok(())
}

fn check_occlusion_invariants(config: &Config) -> std::result::Result<(), String> {
    let grid = PitchGrid::standard();
    let frames = synthetic_frames(2, 23);
    let frame = &frames[1];
    let observer = &frame.players[0];
    let others = frame.others(&observer.player_id);
    let empty = combined_visibility(observer, &[], &grid, &config.body, &config.occlusion);
    if empty.surface.values().iter().any(|&v| v != 1.0) {
        return Err("empty occluder set is not all ones".into());
    }
    let some = combined_visibility(observer, &others[..4], &grid, &config.body, &config.occlusion);
    let more = combined_visibility(observer, &others[..8], &grid, &config.body, &config.occlusion);
    for (a, b) in some.surface.values().iter().zip(more.surface.values()) {
        if b > a {
            return Err("adding occluders increased visibility".into());
        }
    }
    let pair = pair_occlusion(observer, others[0], &grid, &config.body, &config.occlusion)
        .map_err(|e| e.to_string())?;
    let alpha = config.occlusion.alpha as f32;
    if pair.values().iter().any(|&v| v > alpha) {
        return Err("pair occlusion exceeds alpha".into());
    }
    Ok(())
}

fn check_control_identities(config: &Config) -> std::result::Result<(), String> {
    let grid = PitchGrid::standard();
    let frames = synthetic_frames(2, 37);
    let frame = &frames[1];
    let perspective = frame
        .players
        .iter()
        .find(|p| p.team == gazegrid_core::state::Team::Attacking)
        .map(|p| p.player_id.clone())
        .expect("synthetic frames have attackers");
    let s = pitch_control(frame, &grid, &config.control, Some(&perspective))
        .map_err(|e| e.to_string())?;
    for i in 0..grid.cell_count() {
        let att = s.attacking.values()[i];
        let def = s.defending.values()[i];
        let p = s.player_i.values()[i];
        let excl = s.attacking_excl_i.values()[i];
        if p + excl != att {
            return Err(format!("attribution broken at cell {i}"));
        }
        if att + def != 1.0 {
            return Err(format!("complementarity broken at cell {i}: {att} + {def}"));
        }
    }
    Ok(())
}

fn check_eta_monotonicity(config: &Config) -> std::result::Result<(), String> {
    let grid = PitchGrid::standard();
    let eta = eta_surface(&grid, &config.value);
    let goal = config.value.goal_center;
    let row = 33;
    let mut last_dist = f64::NEG_INFINITY;
    let mut last_val = f32::INFINITY;
    for col in (0..grid.width_cells).rev() {
        let d = gazegrid_core::geom::distance(grid.cell_center(col, row), goal);
        let v = eta.get(col, row);
        if d > last_dist && v >= last_val {
            return Err(format!("eta not strictly decreasing at col {col}"));
        }
        last_dist = d;
        last_val = v;
    }
    Ok(())
}

fn check_label_partition(config: &Config) -> std::result::Result<(), String> {
    for i in 0..=1000 {
        let p = i as f64 / 1000.0;
        let label = assign_label(p, config.label_low, config.label_high);
        let expected = if p < config.label_low {
            Some(0)
        } else if p > config.label_high {
            Some(1)
        } else {
            None
        };
        if label != expected {
            return Err(format!("label mismatch at {p}"));
        }
    }
    Ok(())
}

fn check_surface_roundtrip(_: &Config) -> std::result::Result<(), String> {
    let grid = PitchGrid::standard();
    let frames = synthetic_frames(1, 5);
    let surface = gazegrid_core::control::player_influence(
        &frames[0].players[0],
        frames[0].ball,
        &grid,
        &gazegrid_core::control::ControlParams::default(),
    );
    let mut buf = Vec::new();
    write_surface(&surface, &mut buf).map_err(|e| e.to_string())?;
    let back = read_surface(std::io::Cursor::new(&buf)).map_err(|e| e.to_string())?;
    if back.values() != surface.values() {
        return Err("roundtrip not bit-exact".into());
    }
    Ok(())
}

const CHECKS: [Check; 8] = [
    ("angle_normalization_idempotent", check_angle_normalization),
    ("speed_scaling_reference_points", check_speed_scaling),
    ("fov_range_wedge_factorization", check_fov_range_and_factorization),
    ("occlusion_product_invariants", check_occlusion_invariants),
    ("control_complement_attribution", check_control_identities),
    ("eta_strictly_decreasing", check_eta_monotonicity),
    ("label_band_partition", check_label_partition),
    ("surface_file_roundtrip", check_surface_roundtrip),
];

pub fn run(
    config: &Config,
    tracking: Option<&Path>,
    events: Option<&Path>,
    out: Option<&Path>,
) -> Result<()> {
    let mut report = Vec::new();
    let mut failures = 0usize;
    for (name, check) in CHECKS {
        let result = check(config);
        let entry = match &result {
            Ok(()) => serde_json::json!({"check": name, "status": "pass"}),
            Err(detail) => {
                failures += 1;
                serde_json::json!({"check": name, "status": "fail", "detail": detail})
            }
        };
        report.push(entry);
    }

    if let Some(path) = tracking {
        let name = "tracking_stream_invariants";
        let result = (|| -> Result<()> {
            let grid = PitchGrid::standard();
            let raw = gazegrid_core::io::tracking::read_tracking(
                BufReader::new(File::open(path)?),
                &grid,
            )?;
            let (frames, _) = prepare_frames(&raw, config)?;
            validate_sequence(&frames)?;
            for f in &frames {
                f.validate(&grid)?;
            }
            Ok(())
        })();
        report.push(match result {
            Ok(()) => serde_json::json!({"check": name, "status": "pass"}),
            Err(e) => {
                failures += 1;
                serde_json::json!({"check": name, "status": "fail", "detail": e.to_string()})
            }
        });
    }
    if let Some(path) = events {
        let name = "event_stream_invariants";
        let result = gazegrid_core::io::events::read_events(File::open(path)?);
        report.push(match result {
            Ok(_) => serde_json::json!({"check": name, "status": "pass"}),
            Err(e) => {
                failures += 1;
                serde_json::json!({"check": name, "status": "fail", "detail": e.to_string()})
            }
        });
    }

    let mut rendered = String::new();
    for entry in &report {
        rendered.push_str(&entry.to_string());
        rendered.push('\n');
    }
    match out {
        Some(path) => {
            let mut f = File::create(path)?;
            f.write_all(rendered.as_bytes())?;
            println!("wrote report to {}", path.display());
        }
        None => print!("{rendered}"),
    }
    if failures > 0 {
        bail!("{failures} invariant checks failed");
    }
    println!("all {} checks passed", report.len());
    Ok(())
}
