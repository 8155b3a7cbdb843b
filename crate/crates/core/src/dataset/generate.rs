//! Recording transitions from a policy.

use std::sync::Arc;

use rayon::prelude::*;

use super::format::{Dataset, DatasetHeader, Provenance, Transition};
use crate::env::{Env, EnvConfig};
use crate::error::{Error, Result};
use crate::harness::run_episode;
use crate::policy::Policy;
use crate::rng;

/// Seed of the `index`-th episode of a generation run.
pub fn episode_seed(seed: u64, index: u64) -> u64 {
    rng::derive_seed(seed, rng::STREAM_EPISODE.wrapping_add(index))
}

/// Records one full episode.
pub fn record_episode(config: &Arc<EnvConfig>, policy: &dyn Policy, episode_seed: u64) -> Vec<Transition> {
    let mut env = Env::new(config.clone());
    let mut out = Vec::with_capacity(config.episode_len);
    run_episode(&mut env, policy, episode_seed, |obs, action, res| {
        let a = action.to_array();
        out.push(Transition {
            obs: obs.to_f32(),
            action: [a[0] as f32, a[1] as f32],
            reward: res.reward as f32,
            next_obs: res.observation.to_f32(),
            terminal: res.terminated,
            timeout: res.truncated,
        });
    });
    out
}

/// Runs whole episodes until at least `n` transitions exist, then keeps the
/// first `n`. Episodes run in parallel; record order is episode order.
pub fn generate(policy: &dyn Policy, config: &Arc<EnvConfig>, n: u64, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::Config("transition count must be positive".into()));
    }
    let per_episode = config.episode_len as u64;
    let episodes = n.div_ceil(per_episode);
    let chunks: Vec<Vec<Transition>> = (0..episodes)
        .into_par_iter()
        .map(|i| record_episode(config, policy, episode_seed(seed, i)))
        .collect();
    let mut records: Vec<Transition> = chunks.into_iter().flatten().collect();
    records.truncate(n as usize);
    let prov = vec![Provenance {
        policy: policy.name().to_string(),
        count: n,
        seed,
    }];
    Ok(Dataset {
        header: DatasetHeader::new(config.env_version(), n, prov),
        records,
    })
}
