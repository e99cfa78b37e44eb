use std::fs::File;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use gazegrid_core::config::Config;
use gazegrid_core::io::events::read_events;
use gazegrid_core::phases::{extract_phases, filter_open_play, sync_events};

pub fn run(config: &Config, tracking: &Path, events_path: &Path, out: Option<&Path>) -> Result<()> {
    let frames = super::load_prepared_frames(config, tracking)?;
    let events = read_events(File::open(events_path).with_context(|| {
        format!("opening events file {}", events_path.display())
    })?)?;
    let synced = sync_events(&events, &frames)?;
    let extraction = extract_phases(&events, &frames, &synced, &config.phase);
    let dropped = extraction.dropped.len();
    let extracted = extraction.pairs.len();
    let pairs = filter_open_play(extraction.pairs, &events, &frames, &config.filter);

    println!(
        "{} candidate passes paired, {} dropped, {} retained after open-play filtering",
        extracted,
        dropped,
        pairs.len()
    );
    println!("pair_id,receiver,await_start,reception,on_ball_end,await_frames");
    let mut csv: Option<File> = out.map(File::create).transpose()?;
    if let Some(f) = csv.as_mut() {
        writeln!(f, "pair_id,receiver,await_start,reception,on_ball_end,await_frames")?;
    }
    for p in &pairs {
        let line = format!(
            "{},{},{},{},{},{}",
            p.pair_id,
            p.awaiting.player_id,
            p.awaiting.t_start,
            p.awaiting.t_end,
            p.on_ball.t_end,
            p.awaiting.t_end - p.awaiting.t_start
        );
        println!("{line}");
        if let Some(f) = csv.as_mut() {
            writeln!(f, "{line}")?;
        }
    }
    Ok(())
}
