use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use gazegrid_core::config::Config;
use gazegrid_core::features::build_dataset;
use gazegrid_core::io::dataset::{write_dataset_csv, DatasetManifest};
use gazegrid_core::io::events::read_events;
use gazegrid_core::io::surface_file::ValueSurfaceStore;
use gazegrid_core::phases::{extract_phases, filter_open_play, sync_events};
use gazegrid_core::value::ValueSource;

pub fn run(
    config: &Config,
    tracking: &Path,
    events_path: &Path,
    out: &Path,
    match_id: Option<&str>,
    threads: usize,
) -> Result<()> {
    let match_id = match match_id {
        Some(m) => m.to_string(),
        None => tracking
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "match".to_string()),
    };
    let frames = super::load_prepared_frames(config, tracking)?;
    let events = read_events(File::open(events_path).with_context(|| {
        format!("opening events file {}", events_path.display())
    })?)?;

    let synced = sync_events(&events, &frames)?;
    if !synced.dropped.is_empty() {
        eprintln!(
            "warning: {} events outside the tracking range were dropped",
            synced.dropped.len()
        );
    }
    let extraction = extract_phases(&events, &frames, &synced, &config.phase);
    if !extraction.dropped.is_empty() {
        eprintln!(
            "warning: {} passes produced no phase pair (no reception found)",
            extraction.dropped.len()
        );
    }
    let pairs = filter_open_play(extraction.pairs, &events, &frames, &config.filter);

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

    let build = if threads <= 1 {
        // A single-thread pool keeps the per-frame maps off the global
        // rayon pool so `--threads 1` really is serial.
        rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()?
            .install(|| build_dataset(&pairs, &frames, &match_id, config, store.as_ref()))?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()?
            .install(|| build_dataset(&pairs, &frames, &match_id, config, store.as_ref()))?
    };

    fs::create_dir_all(out)?;
    let csv_path = out.join("dataset.csv");
    write_dataset_csv(&build.samples, BufWriter::new(File::create(&csv_path)?))?;
    let manifest = DatasetManifest::build(
        &match_id,
        &config.hash(),
        &config.resolved_text(),
        build.counts,
        &build.samples,
    );
    let manifest_path = out.join("manifest.json");
    manifest.write(BufWriter::new(File::create(&manifest_path)?))?;

    let c = &build.counts;
    println!("match {match_id} (config {})", config.hash());
    println!(
        "pairs: {} extracted, {} emitted, {} dropped (zero value)",
        c.pairs_in, c.pairs_emitted, c.pairs_dropped_zero_value
    );
    println!(
        "samples: {} total, {} labeled increase, {} labeled decrease, {} excluded",
        c.samples, c.labeled_increase, c.labeled_decrease, c.excluded
    );
    println!("wrote {} and {}", csv_path.display(), manifest_path.display());
    Ok(())
}
