//! Recorded episodes and replay verification.
//!
//! A trajectory stores the seed and the applied actions; the per-step state
//! is kept for plotting and for checking that a replay reproduces it.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::rollout::run_episode;
use crate::dynamics::Action;
use crate::env::{Env, EnvConfig};
use crate::error::{Error, Result};
use crate::policy::Policy;

pub const TRAJECTORY_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryStep {
    pub position: [f64; 2],
    pub heading: f64,
    pub speed: f64,
    pub action: [f64; 2],
    pub reward: f64,
    pub in_contact: bool,
    pub u: f64,
    pub lap_count: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Trajectory {
    pub version: u32,
    pub env_version: String,
    pub policy: String,
    pub seed: u64,
    pub steps: Vec<TrajectoryStep>,
}

impl Trajectory {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_vec(self)?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_slice(&std::fs::read(path)?)
    }

    pub fn from_slice(bytes: &[u8]) -> Result<Self> {
        let t: Trajectory =
            serde_json::from_slice(bytes).map_err(|e| Error::Format(format!("unreadable trajectory: {e}")))?;
        if t.version != TRAJECTORY_VERSION {
            return Err(Error::Format(format!("unsupported trajectory version {}", t.version)));
        }
        Ok(t)
    }

    pub fn actions(&self) -> impl Iterator<Item = Action> + '_ {
        self.steps.iter().map(|s| Action::new(s.action[0], s.action[1]))
    }
}

/// Runs one episode and records it.
pub fn record(config: &Arc<EnvConfig>, policy: &dyn Policy, seed: u64) -> Trajectory {
    let mut env = Env::new(config.clone());
    let mut steps = Vec::with_capacity(config.episode_len);
    run_episode(&mut env, policy, seed, |_, action, res| {
        steps.push(TrajectoryStep {
            position: [res.info.position.x, res.info.position.y],
            heading: res.info.heading,
            speed: res.info.speed,
            action: action.to_array(),
            reward: res.reward,
            in_contact: res.info.in_contact,
            u: res.info.u,
            lap_count: res.info.lap_count,
        });
    });
    Trajectory {
        version: TRAJECTORY_VERSION,
        env_version: config.env_version().to_string(),
        policy: policy.name().to_string(),
        seed,
        steps,
    }
}

/// Feeds the recorded actions from the recorded seed and checks every
/// reward bit for bit.
pub fn verify_replay(config: &Arc<EnvConfig>, traj: &Trajectory) -> Result<()> {
    if traj.env_version != config.env_version() {
        return Err(Error::Format(format!(
            "trajectory was recorded on {}, environment is {}",
            traj.env_version,
            config.env_version()
        )));
    }
    let mut env = Env::new(config.clone());
    env.reset(Some(traj.seed));
    for (i, (step, action)) in traj.steps.iter().zip(traj.actions()).enumerate() {
        let res = env.step(action)?;
        if res.reward.to_bits() != step.reward.to_bits() {
            return Err(Error::ReplayMismatch {
                step: i,
                recorded: step.reward,
                replayed: res.reward,
            });
        }
    }
    Ok(())
}
