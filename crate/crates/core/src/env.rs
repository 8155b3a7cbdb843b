//! Episode loop: reset, step, seeding and batched stepping.

use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::{advance_vehicle, Action, PhysicsConfig, VehicleState};
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::reward::{compute_reward, RewardConfig};
use crate::rng::{self, SimRng};
use crate::sensing::{observe, Observation, RayConfig};
use crate::track::{ProgressTracker, TrackDef, TrackFile};

pub const DEFAULT_EPISODE_LEN: usize = 2000;

/// Bumped whenever simulation semantics change without a config change.
const SIM_REVISION: u32 = 1;

/// Full environment definition. Immutable and shareable between instances.
#[derive(Debug, Clone)]
pub struct EnvConfig {
    pub track: Arc<TrackDef>,
    pub physics: PhysicsConfig,
    pub rays: RayConfig,
    pub reward: RewardConfig,
    pub episode_len: usize,
    env_version: String,
}

/// Serializable overrides; every field falls back to the bundled default.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvConfigFile {
    #[serde(default)]
    pub physics: Option<PhysicsConfig>,
    #[serde(default)]
    pub rays: Option<RayConfig>,
    #[serde(default)]
    pub reward: Option<RewardConfig>,
    #[serde(default)]
    pub episode_len: Option<usize>,
}

#[derive(Serialize)]
struct VersionedDefinition<'a> {
    revision: u32,
    rng: &'static str,
    track: &'a TrackFile,
    physics: &'a PhysicsConfig,
    rays: &'a RayConfig,
    reward: &'a RewardConfig,
    episode_len: usize,
}

impl EnvConfig {
    pub fn new(
        track: Arc<TrackDef>,
        physics: PhysicsConfig,
        rays: RayConfig,
        reward: RewardConfig,
        episode_len: usize,
    ) -> Result<Self> {
        physics.validate()?;
        rays.validate()?;
        reward.validate()?;
        if episode_len == 0 {
            return Err(Error::Config("episode_len must be positive".into()));
        }
        let def = VersionedDefinition {
            revision: SIM_REVISION,
            rng: "chacha8+splitmix64",
            track: track.source(),
            physics: &physics,
            rays: &rays,
            reward: &reward,
            episode_len,
        };
        let digest = Sha256::digest(serde_json::to_vec(&def).expect("definition serializes"));
        let hex: String = digest.iter().take(6).map(|b| format!("{b:02x}")).collect();
        let env_version = format!("{}+{hex}", track.name);
        Ok(Self {
            track,
            physics,
            rays,
            reward,
            episode_len,
            env_version,
        })
    }

    /// The canonical environment: bundled track and default constants.
    pub fn canonical() -> Self {
        Self::with_track(TrackDef::canonical()).expect("defaults are valid")
    }

    pub fn with_track(track: Arc<TrackDef>) -> Result<Self> {
        Self::new(
            track,
            PhysicsConfig::default(),
            RayConfig::default(),
            RewardConfig::default(),
            DEFAULT_EPISODE_LEN,
        )
    }

    /// Applies a JSON override document on top of the defaults.
    pub fn from_config_file(track: Arc<TrackDef>, path: impl AsRef<Path>) -> Result<Self> {
        let file: EnvConfigFile = serde_json::from_slice(&std::fs::read(path)?)?;
        Self::new(
            track,
            file.physics.unwrap_or_default(),
            file.rays.unwrap_or_default(),
            file.reward.unwrap_or_default(),
            file.episode_len.unwrap_or(DEFAULT_EPISODE_LEN),
        )
    }

    /// Identifier of the full configuration, embedded in datasets and replays.
    pub fn env_version(&self) -> &str {
        &self.env_version
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub u: f64,
    pub u_best: f64,
    pub lap_count: i64,
    pub progress_delta: f64,
    pub in_contact: bool,
    pub impact_speed: f64,
    pub speed: f64,
    pub position: Vec2,
    pub heading: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResult {
    pub observation: Observation,
    pub reward: f64,
    /// Never set: the episode only ends by truncation.
    pub terminated: bool,
    pub truncated: bool,
    pub info: StepInfo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Fresh,
    Running,
    Done,
}

/// One environment instance. Single owner; see [`batched_step`] for parallelism.
#[derive(Debug, Clone)]
pub struct Env {
    config: Arc<EnvConfig>,
    rng: SimRng,
    vehicle: VehicleState,
    tracker: ProgressTracker,
    u_start: f64,
    step_index: usize,
    phase: Phase,
}

impl Env {
    pub fn new(config: Arc<EnvConfig>) -> Self {
        Self {
            config,
            rng: rng::stream(0, rng::STREAM_START),
            vehicle: VehicleState::default(),
            tracker: ProgressTracker::new(0.0),
            u_start: 0.0,
            step_index: 0,
            phase: Phase::Fresh,
        }
    }

    pub fn canonical() -> Self {
        Self::new(Arc::new(EnvConfig::canonical()))
    }

    pub fn config(&self) -> &Arc<EnvConfig> {
        &self.config
    }

    pub fn track(&self) -> &TrackDef {
        &self.config.track
    }

    pub fn vehicle(&self) -> &VehicleState {
        &self.vehicle
    }

    pub fn tracker(&self) -> &ProgressTracker {
        &self.tracker
    }

    /// Unwrapped progress at the start of the episode.
    pub fn u_start(&self) -> f64 {
        self.u_start
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn is_done(&self) -> bool {
        self.phase == Phase::Done
    }

    /// Starts a new episode. With `Some(seed)` the start-pose stream is
    /// reseeded; with `None` it continues from its current state.
    pub fn reset(&mut self, seed: Option<u64>) -> Observation {
        if let Some(seed) = seed {
            self.rng = rng::stream(seed, rng::STREAM_START);
        }
        let track = &self.config.track;
        let (position, heading) = track.sample_start(&mut self.rng);
        self.vehicle = VehicleState::at_rest(position, heading);
        let s = track.project(position).s;
        self.tracker = ProgressTracker::new(s);
        self.u_start = s;
        self.step_index = 0;
        self.phase = Phase::Running;
        observe(&self.vehicle, track, &self.config.rays)
    }

    pub fn observation(&self) -> Observation {
        observe(&self.vehicle, &self.config.track, &self.config.rays)
    }

    pub fn step(&mut self, action: Action) -> Result<StepResult> {
        match self.phase {
            Phase::Fresh => return Err(Error::NotReset),
            Phase::Done => return Err(Error::EpisodeOver),
            Phase::Running => {}
        }
        let cfg = &*self.config;
        let track = &*cfg.track;
        let action = action.clamped();
        self.vehicle = advance_vehicle(&self.vehicle, action, track, &cfg.physics);
        let proj = track.project(self.vehicle.position);
        let delta = self.tracker.advance(proj.s, track.total_length);
        let reward = compute_reward(delta, self.vehicle.in_contact, self.vehicle.impact_speed, &cfg.reward);
        let observation = observe(&self.vehicle, track, &cfg.rays);
        self.step_index += 1;
        let truncated = self.step_index == cfg.episode_len;
        if truncated {
            self.phase = Phase::Done;
        }
        Ok(StepResult {
            observation,
            reward,
            terminated: false,
            truncated,
            info: StepInfo {
                u: self.tracker.u,
                u_best: self.tracker.u_best,
                lap_count: self.tracker.lap_count,
                progress_delta: delta,
                in_contact: self.vehicle.in_contact,
                impact_speed: self.vehicle.impact_speed,
                speed: self.vehicle.speed,
                position: self.vehicle.position,
                heading: self.vehicle.heading,
            },
        })
    }
}

/// Steps every instance with its action. Instances run in parallel; each
/// result equals what a lone `step` call would have produced.
pub fn batched_step(envs: &mut [Env], actions: &[Action]) -> Result<Vec<StepResult>> {
    if envs.len() != actions.len() {
        return Err(Error::LengthMismatch {
            envs: envs.len(),
            actions: actions.len(),
        });
    }
    envs.par_iter_mut()
        .zip(actions.par_iter())
        .map(|(env, &a)| env.step(a))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_before_reset_is_an_error() {
        let mut env = Env::canonical();
        assert!(matches!(env.step(Action::default()), Err(Error::NotReset)));
    }

    #[test]
    fn episode_truncates_once_and_then_refuses() {
        let mut env = Env::canonical();
        env.reset(Some(1));
        let mut truncations = 0;
        for i in 0..DEFAULT_EPISODE_LEN {
            let r = env.step(Action::new(0.0, 0.0)).unwrap();
            assert!(!r.terminated);
            if r.truncated {
                truncations += 1;
                assert_eq!(i + 1, DEFAULT_EPISODE_LEN);
            }
        }
        assert_eq!(truncations, 1);
        assert!(matches!(env.step(Action::default()), Err(Error::EpisodeOver)));
        env.reset(None);
        assert!(env.step(Action::default()).is_ok());
    }

    #[test]
    fn reset_with_same_seed_is_identical() {
        let mut a = Env::canonical();
        let mut b = Env::canonical();
        assert_eq!(a.reset(Some(0)), b.reset(Some(0)));
        assert_eq!(a.vehicle(), b.vehicle());
        assert_ne!(a.reset(Some(1)), b.reset(Some(0)));
    }

    #[test]
    fn standing_still_earns_nothing() {
        let mut env = Env::canonical();
        env.reset(Some(5));
        let r = env.step(Action::new(0.0, 0.0)).unwrap();
        assert!(r.reward <= 0.0);
    }

    #[test]
    fn full_throttle_start_earns_each_step() {
        let mut env = Env::canonical();
        // Heading offset of seed 0 is checked against the tangent below.
        env.reset(Some(0));
        let tangent = env.track().project(env.vehicle().position).tangent.angle();
        let off = crate::geom::wrap_angle(env.vehicle().heading - tangent);
        assert!(off.abs() <= 30f64.to_radians() + 1e-12);
        for _ in 0..20 {
            let r = env.step(Action::new(0.0, 1.0)).unwrap();
            assert!(r.reward > 0.0, "reward {}", r.reward);
        }
    }

    #[test]
    fn batch_length_mismatch() {
        let mut envs = vec![Env::canonical(), Env::canonical()];
        for e in &mut envs {
            e.reset(Some(0));
        }
        assert!(matches!(
            batched_step(&mut envs, &[Action::default()]),
            Err(Error::LengthMismatch { envs: 2, actions: 1 })
        ));
    }

    #[test]
    fn env_version_tracks_constants() {
        let base = EnvConfig::canonical();
        let other = EnvConfig::new(
            base.track.clone(),
            PhysicsConfig { v_max: 39.0, ..Default::default() },
            RayConfig::default(),
            RewardConfig::default(),
            DEFAULT_EPISODE_LEN,
        )
        .unwrap();
        assert_ne!(base.env_version(), other.env_version());
        assert_eq!(base.env_version(), EnvConfig::canonical().env_version());
        assert!(base.env_version().starts_with("offlinemania-1+"));
    }
}
