pub use crate::OutputFormat;

pub mod bench;
pub mod features;
pub mod phases;
pub mod surfaces;
pub mod validate;

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use anyhow::{Context, Result};
use gazegrid_core::config::Config;
use gazegrid_core::grid::PitchGrid;
use gazegrid_core::io::tracking::read_tracking;
use gazegrid_core::pipeline::prepare_frames;
use gazegrid_core::state::Frame;

pub fn load_config(path: Option<&Path>) -> Result<Config> {
    match path {
        Some(p) => Config::from_file(p).with_context(|| format!("loading config {}", p.display())),
        None => Ok(Config::default()),
    }
}

/// `--threads`, then `GAZEGRID_THREADS`, then all available cores.
pub fn resolve_threads(cli: Option<usize>) -> usize {
    cli.or_else(|| {
        std::env::var("GAZEGRID_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    })
}

/// Load a tracking file and run angle interpolation plus kinematics.
pub fn load_prepared_frames(config: &Config, tracking: &Path) -> Result<Vec<Frame>> {
    let grid = PitchGrid::standard();
    let file = File::open(tracking)
        .with_context(|| format!("opening tracking file {}", tracking.display()))?;
    let raw = read_tracking(BufReader::new(file), &grid)
        .with_context(|| format!("parsing tracking file {}", tracking.display()))?;
    let (frames, warnings) = prepare_frames(&raw, config)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    Ok(frames)
}
