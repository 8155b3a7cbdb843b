//! Rollouts, evaluation, replays, rendering and benchmarking.

pub mod bench;
pub mod eval;
pub mod render;
pub mod rollout;
pub mod trajectory;

pub use bench::{batched_matches_sequential, bench, BenchReport};
pub use eval::{evaluate, EvalReport};
pub use render::render_svg;
pub use rollout::{run_episode, run_episode_quiet, EpisodeSummary};
pub use trajectory::{record, verify_replay, Trajectory, TrajectoryStep};

use std::path::PathBuf;
use std::sync::Arc;

use crate::error::Result;
use crate::track::TrackDef;

/// Environment variable naming a track file to use instead of the bundled one.
pub const TRACK_ENV_VAR: &str = "OMD_TRACK_PATH";

/// The bundled track, unless `OMD_TRACK_PATH` points elsewhere.
pub fn resolve_track() -> Result<Arc<TrackDef>> {
    match std::env::var_os(TRACK_ENV_VAR) {
        Some(p) if !p.is_empty() => Ok(Arc::new(TrackDef::from_path(PathBuf::from(p))?)),
        _ => Ok(TrackDef::canonical()),
    }
}
