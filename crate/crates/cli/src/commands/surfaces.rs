use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use gazegrid_core::config::Config;
use gazegrid_core::control::{observed_control, pitch_control};
use gazegrid_core::grid::{PitchGrid, Surface};
use gazegrid_core::io::heatmap::{write_pgm, write_ppm};
use gazegrid_core::io::surface_file::{write_surface, ValueSurfaceStore};
use gazegrid_core::occlusion::{combined_visibility, vision_map};
use gazegrid_core::state::{Frame, PlayerId};
use gazegrid_core::value::{normalized_value, ValueSource};

use super::OutputFormat;

/// Parse a frame selection: `300`, `300..305` (inclusive), `300,310`.
fn parse_frames(spec: &str) -> Result<Vec<u64>> {
    if let Some((a, b)) = spec.split_once("..") {
        let start: u64 = a.trim().parse().context("bad range start")?;
        let end: u64 = b.trim().parse().context("bad range end")?;
        if end < start {
            bail!("empty frame range {spec}");
        }
        return Ok((start..=end).collect());
    }
    spec.split(',')
        .map(|s| s.trim().parse::<u64>().with_context(|| format!("bad frame id {s:?}")))
        .collect()
}

fn emit(surface: &Surface, dir: &Path, stem: &str, format: OutputFormat, hash: &str) -> Result<()> {
    let write_bin = |path: PathBuf| -> Result<()> {
        let mut w = BufWriter::new(File::create(&path)?);
        write_surface(surface, &mut w)?;
        Ok(())
    };
    write_bin(dir.join(format!("{stem}.surf")))?;
    let comment = format!("gazegrid config={hash}");
    if matches!(format, OutputFormat::Pgm | OutputFormat::All) {
        let mut w = BufWriter::new(File::create(dir.join(format!("{stem}.pgm")))?);
        write_pgm(surface, &mut w, Some(&comment))?;
    }
    if matches!(format, OutputFormat::Ppm | OutputFormat::All) {
        let mut w = BufWriter::new(File::create(dir.join(format!("{stem}.ppm")))?);
        write_ppm(surface, &mut w, Some(&comment))?;
    }
    Ok(())
}

pub fn run(
    config: &Config,
    tracking: &Path,
    frames_spec: &str,
    player: Option<&str>,
    kinds: &str,
    out: &Path,
    format: OutputFormat,
    threads: usize,
) -> Result<()> {
    let grid = PitchGrid::standard();
    let frames = super::load_prepared_frames(config, tracking)?;
    let wanted = parse_frames(frames_spec)?;
    let kinds: Vec<&str> = kinds.split(',').map(str::trim).collect();
    for kind in &kinds {
        if !matches!(*kind, "vision" | "occlusion" | "control" | "value" | "combined") {
            bail!("unknown surface kind {kind:?}");
        }
    }
    let needs_player = kinds
        .iter()
        .any(|k| matches!(*k, "vision" | "occlusion" | "combined"));
    if needs_player && player.is_none() {
        bail!("--player is required for vision, occlusion and combined surfaces");
    }
    let player_id = player.map(PlayerId::new);

    let store = match config.value.value_source {
        ValueSource::External => {
            let path = config
                .value
                .value_surface_path
                .as_ref()
                .ok_or_else(|| anyhow!("value_source=external requires value_surface_path"))?;
            Some(ValueSurfaceStore::read(File::open(path)?)?)
        }
        ValueSource::SurrogateDefensiveInfluence => None,
    };

    fs::create_dir_all(out)?;
    let hash = config.hash();

    // Frame computations are independent; the writer below is the only
    // serialized stage, consuming results in frame order.
    let compute_frame = |frame_id: u64| -> Result<Vec<(String, Surface)>> {
        let mut emitted: Vec<(String, Surface)> = Vec::new();
        let frame: &Frame = frames
            .iter()
            .find(|f| f.frame_id == frame_id)
            .ok_or_else(|| anyhow!("frame {frame_id} not in tracking input"))?;
        let prefix = format!("f{frame_id:06}");

        let player_state = match &player_id {
            Some(id) => Some(
                frame
                    .player(id)
                    .ok_or_else(|| anyhow!("player {id} absent from frame {frame_id}"))?,
            ),
            None => None,
        };

        let vision_surface = if kinds.iter().any(|k| matches!(*k, "vision" | "combined")) {
            let p = player_state.expect("player required");
            Some(
                vision_map(
                    p,
                    &frame.others(&p.player_id),
                    &grid,
                    &config.vision,
                    &config.body,
                    &config.occlusion,
                )?
                .surface,
            )
        } else {
            None
        };
        let control = if kinds.iter().any(|k| matches!(*k, "control" | "combined")) {
            Some(pitch_control(frame, &grid, &config.control, player_id.as_ref())?)
        } else {
            None
        };

        for kind in &kinds {
            match *kind {
                "vision" => {
                    let p = player_state.expect("player required");
                    let stem = format!("{prefix}_{}_vision", p.player_id);
                    emitted.push((stem, vision_surface.clone().unwrap()));
                }
                "occlusion" => {
                    let p = player_state.expect("player required");
                    let occ = combined_visibility(
                        p,
                        &frame.others(&p.player_id),
                        &grid,
                        &config.body,
                        &config.occlusion,
                    );
                    emitted.push((format!("{prefix}_{}_occlusion", p.player_id), occ.surface));
                }
                "control" => {
                    let c = control.as_ref().unwrap();
                    emitted.push((format!("{prefix}_control_attacking"), c.attacking.clone()));
                    emitted.push((format!("{prefix}_control_defending"), c.defending.clone()));
                    if let Some(id) = &player_id {
                        emitted.push((format!("{prefix}_{id}_control_player"), c.player_i.clone()));
                        emitted.push((
                            format!("{prefix}_{id}_control_attacking_excl"),
                            c.attacking_excl_i.clone(),
                        ));
                    }
                }
                "value" => {
                    let set = normalized_value(frame, &grid, &config.control, &config.value, store.as_ref())?;
                    emitted.push((format!("{prefix}_value_raw"), set.raw));
                    emitted.push((format!("{prefix}_value_eta"), set.eta));
                    emitted.push((format!("{prefix}_value_normalized"), set.normalized));
                }
                "combined" => {
                    let p = player_state.expect("player required");
                    let c = control.as_ref().unwrap();
                    let v = vision_surface.as_ref().unwrap();
                    emitted.push((
                        format!("{prefix}_{}_seen_defending", p.player_id),
                        observed_control(&c.defending, v)?,
                    ));
                    emitted.push((
                        format!("{prefix}_{}_seen_attacking", p.player_id),
                        observed_control(&c.attacking_excl_i, v)?,
                    ));
                }
                _ => unreachable!(),
            }
        }
        Ok(emitted)
    };

    let computed: Vec<Vec<(String, Surface)>> = if threads <= 1 {
        wanted
            .iter()
            .map(|&frame_id| compute_frame(frame_id))
            .collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
        pool.install(|| {
            use rayon::prelude::*;
            wanted
                .par_iter()
                .map(|&frame_id| compute_frame(frame_id))
                .collect::<Result<_>>()
        })?
    };

    let mut written = 0usize;
    for (stem, surface) in computed.into_iter().flatten() {
        emit(&surface, out, &stem, format, &hash)?;
        written += 1;
    }
    println!("wrote {written} surfaces to {} (config {hash})", out.display());
    Ok(())
}
