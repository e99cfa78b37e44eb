//! `gazegrid` — vision, occlusion, pitch-control and pitch-value surfaces
//! from pose-enhanced soccer tracking data.

mod commands;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "gazegrid",
    version,
    about = "Per-player vision maps, occlusions, pitch control and pitch value from tracking data"
)]
struct Cli {
    /// Configuration file (flat key = value lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads; falls back to GAZEGRID_THREADS, then all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    /// Binary surface container only.
    Bin,
    /// Binary plus a graymap raster.
    Pgm,
    /// Binary plus a color pixmap raster.
    Ppm,
    /// Binary plus both rasters.
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Compute per-frame surfaces and write them as binary containers
    /// and optional heatmap rasters.
    Surfaces {
        /// Tracking input, one JSON frame per line.
        #[arg(long)]
        tracking: PathBuf,
        /// Frame selection: a single id (300), an inclusive range
        /// (300..305), or a comma list (300,310,320).
        #[arg(long)]
        frames: String,
        /// Player id for player-centric kinds (vision, occlusion,
        /// combined, and the per-player control split).
        #[arg(long)]
        player: Option<String>,
        /// Comma list of: vision, occlusion, control, value, combined.
        #[arg(long, default_value = "vision")]
        kinds: String,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Bin)]
        format: OutputFormat,
    },
    /// Run the full pipeline (sync, phases, surfaces, features, labels)
    /// and write the dataset CSV plus its manifest.
    Features {
        #[arg(long)]
        tracking: PathBuf,
        /// Event CSV.
        #[arg(long)]
        events: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Grouping key for downstream splits; defaults to the tracking
        /// file stem.
        #[arg(long)]
        match_id: Option<String>,
    },
    /// Extract awaiting/on-ball phase pairs and print them.
    Phases {
        #[arg(long)]
        tracking: PathBuf,
        #[arg(long)]
        events: PathBuf,
        /// Optional CSV output for the pair table.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suite on synthetic (and optionally supplied)
    /// data; exits nonzero on any violation.
    Validate {
        #[arg(long)]
        tracking: Option<PathBuf>,
        #[arg(long)]
        events: Option<PathBuf>,
        /// Write the machine-readable report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure frames/second of the full 22-player surface stack.
    Bench {
        /// Number of synthetic frames to process per timed pass.
        #[arg(long, default_value_t = 60)]
        frames: usize,
        /// Emit the report as JSON.
        #[arg(long)]
        json: bool,
    },
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let config = commands::load_config(cli.config.as_deref())?;
    let threads = commands::resolve_threads(cli.threads);
    match cli.command {
        Command::Surfaces {
            tracking,
            frames,
            player,
            kinds,
            out,
            format,
        } => commands::surfaces::run(
            &config,
            &tracking,
            &frames,
            player.as_deref(),
            &kinds,
            &out,
            format,
            threads,
        ),
        Command::Features {
            tracking,
            events,
            out,
            match_id,
        } => commands::features::run(&config, &tracking, &events, &out, match_id.as_deref(), threads),
        Command::Phases {
            tracking,
            events,
            out,
        } => commands::phases::run(&config, &tracking, &events, out.as_deref()),
        Command::Validate {
            tracking,
            events,
            out,
        } => commands::validate::run(&config, tracking.as_deref(), events.as_deref(), out.as_deref()),
        Command::Bench { frames, json } => commands::bench::run(&config, frames, threads, json),
    }
}
