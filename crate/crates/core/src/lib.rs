//! Spatial computation for pose-enhanced soccer tracking data.
//!
//! The crate turns frames of player positions, velocities and body-rotation
//! angles into per-player probability surfaces over a 105x68 pitch grid:
//!
//! * [`vision`] — a speed-dependent probabilistic field of view,
//! * [`occlusion`] — visibility loss behind other players' torsos and the
//!   combined per-player vision map,
//! * [`control`] — player-influence and (imminent) pitch-control surfaces,
//! * [`value`] — pitch-value surfaces and the controlled-value scalar,
//! * [`phases`] — event/tracking fusion: pass receptions, awaiting and
//!   on-ball phases, scanning (VEA) detection,
//! * [`features`] — aggregated per-sample features and labels for the
//!   modeling dataset.
//!
//! Everything is a pure function over immutable inputs; surfaces produced
//! for the same inputs and configuration are byte-identical regardless of
//! thread count or invocation order.

pub mod angles;
pub mod config;
pub mod control;
pub mod error;
pub mod features;
pub mod geom;
pub mod grid;
pub mod io;
pub mod kinematics;
pub mod occlusion;
pub mod phases;
pub mod pipeline;
pub mod state;
pub mod synthetic;
pub mod value;
pub mod vision;

pub use config::Config;
pub use error::{Error, Result};
pub use geom::Vec2;
pub use grid::{PitchGrid, Surface, SurfaceKind};
pub use state::{Frame, PlayerId, PlayerState, Team};
