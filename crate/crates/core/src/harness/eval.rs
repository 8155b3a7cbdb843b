//! Multi-episode evaluation.

use std::sync::Arc;

use serde::Serialize;

use super::rollout::{run_episode_quiet, EpisodeSummary};
use crate::env::{Env, EnvConfig};
use crate::error::{Error, Result};
use crate::policy::Policy;

#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub policy: String,
    pub episodes: usize,
    pub mean_return: f64,
    pub std_return: f64,
    pub mean_laps: f64,
    /// Mean over completed laps only; `None` if no lap was completed.
    pub mean_lap_steps: Option<f64>,
    pub median_lap_steps: Option<f64>,
    pub collision_steps: Vec<usize>,
    pub returns: Vec<f64>,
    pub seeds: Vec<u64>,
    pub env_version: String,
}

/// Episode `i` uses seed `base_seed + i`.
pub fn evaluate(config: &Arc<EnvConfig>, policy: &dyn Policy, episodes: usize, base_seed: u64) -> Result<EvalReport> {
    if episodes == 0 {
        return Err(Error::Config("episodes must be at least 1".into()));
    }
    let seeds: Vec<u64> = (0..episodes as u64).map(|i| base_seed.wrapping_add(i)).collect();
    let mut env = Env::new(config.clone());
    let runs: Vec<EpisodeSummary> = seeds.iter().map(|&s| run_episode_quiet(&mut env, policy, s)).collect();
    Ok(report(policy.name(), &runs, config.env_version()))
}

pub fn report(policy: &str, runs: &[EpisodeSummary], env_version: &str) -> EvalReport {
    let n = runs.len() as f64;
    let returns: Vec<f64> = runs.iter().map(|r| r.episode_return).collect();
    let mean = returns.iter().sum::<f64>() / n;
    let var = returns.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
    let mut laps: Vec<usize> = runs.iter().flat_map(|r| r.lap_steps.iter().copied()).collect();
    laps.sort_unstable();
    let mean_lap_steps = (!laps.is_empty()).then(|| laps.iter().sum::<usize>() as f64 / laps.len() as f64);
    EvalReport {
        policy: policy.to_string(),
        episodes: runs.len(),
        mean_return: mean,
        std_return: var.sqrt(),
        mean_laps: runs.iter().map(|r| r.laps as f64).sum::<f64>() / n,
        mean_lap_steps,
        median_lap_steps: median(&laps),
        collision_steps: runs.iter().map(|r| r.collision_steps).collect(),
        returns,
        seeds: runs.iter().map(|r| r.seed).collect(),
        env_version: env_version.to_string(),
    }
}

fn median(sorted: &[usize]) -> Option<f64> {
    let n = sorted.len();
    match n {
        0 => None,
        _ if n % 2 == 1 => Some(sorted[n / 2] as f64),
        _ => Some((sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0),
    }
}

impl std::fmt::Display for EvalReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "policy        {}", self.policy)?;
        writeln!(f, "env_version   {}", self.env_version)?;
        writeln!(f, "episodes      {} (seeds {:?})", self.episodes, self.seeds)?;
        writeln!(f, "return        {:.2} +/- {:.2}", self.mean_return, self.std_return)?;
        writeln!(f, "laps          {:.2}", self.mean_laps)?;
        match (self.mean_lap_steps, self.median_lap_steps) {
            (Some(m), Some(md)) => writeln!(f, "lap steps     mean {m:.1}, median {md:.1}")?,
            _ => writeln!(f, "lap steps     -")?,
        }
        write!(f, "collisions    {:?}", self.collision_steps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn medians() {
        assert_eq!(median(&[]), None);
        assert_eq!(median(&[3]), Some(3.0));
        assert_eq!(median(&[1, 2, 4, 9]), Some(3.0));
    }
}
