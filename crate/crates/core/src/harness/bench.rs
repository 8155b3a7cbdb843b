//! Throughput measurement with random actions.

use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::Action;
use crate::env::{batched_step, Env, EnvConfig};
use crate::error::Result;
use crate::rng::{self, SimRng};

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub n_envs: usize,
    pub n_steps: usize,
    pub threads: usize,
    pub single_steps_per_sec: Option<f64>,
    /// Aggregate over all instances.
    pub batched_steps_per_sec: Option<f64>,
    pub speedup: Option<f64>,
}

fn random_action(rng: &mut SimRng) -> Action {
    Action::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
}

fn step_or_reset(env: &mut Env, a: Action) {
    if env.is_done() {
        env.reset(None);
    }
    env.step(a).expect("running");
}

/// Steps one instance `n_steps` times; returns steps per second.
pub fn bench_single(config: &Arc<EnvConfig>, n_steps: usize, seed: u64) -> f64 {
    let mut env = Env::new(config.clone());
    env.reset(Some(seed));
    let mut rng = rng::stream(seed, rng::STREAM_POLICY);
    let t = Instant::now();
    for _ in 0..n_steps {
        let a = random_action(&mut rng);
        step_or_reset(&mut env, a);
    }
    n_steps as f64 / t.elapsed().as_secs_f64()
}

/// Steps `n_envs` instances `n_steps` times each, every instance on its own
/// thread-pool task; returns aggregate steps per second.
pub fn bench_batched(config: &Arc<EnvConfig>, n_envs: usize, n_steps: usize, seed: u64) -> f64 {
    let t = Instant::now();
    (0..n_envs).into_par_iter().for_each(|i| {
        let s = rng::derive_seed(seed, i as u64);
        let mut env = Env::new(config.clone());
        env.reset(Some(s));
        let mut rng = rng::stream(s, rng::STREAM_POLICY);
        for _ in 0..n_steps {
            let a = random_action(&mut rng);
            step_or_reset(&mut env, a);
        }
    });
    (n_envs * n_steps) as f64 / t.elapsed().as_secs_f64()
}

pub fn bench(config: &Arc<EnvConfig>, n_envs: usize, n_steps: usize, seed: u64) -> BenchReport {
    let threads = rayon::current_num_threads();
    if n_steps == 0 || n_envs == 0 {
        return BenchReport {
            n_envs,
            n_steps,
            threads,
            single_steps_per_sec: None,
            batched_steps_per_sec: None,
            speedup: None,
        };
    }
    let single = bench_single(config, n_steps, seed);
    let batched = bench_batched(config, n_envs, n_steps, seed);
    BenchReport {
        n_envs,
        n_steps,
        threads,
        single_steps_per_sec: Some(single),
        batched_steps_per_sec: Some(batched),
        speedup: Some(batched / single),
    }
}

/// Runs the same random-action schedule through lock-step [`batched_step`]
/// and through independent sequential instances; true if every result
/// matches bit for bit.
pub fn batched_matches_sequential(config: &Arc<EnvConfig>, n_envs: usize, n_steps: usize, seed: u64) -> Result<bool> {
    let seeds: Vec<u64> = (0..n_envs).map(|i| rng::derive_seed(seed, i as u64)).collect();
    let mut rngs: Vec<SimRng> = seeds.iter().map(|&s| rng::stream(s, rng::STREAM_POLICY)).collect();
    let schedule: Vec<Vec<Action>> = (0..n_steps)
        .map(|_| rngs.iter_mut().map(random_action).collect())
        .collect();

    let mut batch: Vec<Env> = seeds
        .iter()
        .map(|&s| {
            let mut e = Env::new(config.clone());
            e.reset(Some(s));
            e
        })
        .collect();
    let mut batched = Vec::with_capacity(n_steps);
    for actions in &schedule {
        for e in batch.iter_mut().filter(|e| e.is_done()) {
            e.reset(None);
        }
        batched.push(batched_step(&mut batch, actions)?);
    }

    for (i, &s) in seeds.iter().enumerate() {
        let mut env = Env::new(config.clone());
        env.reset(Some(s));
        for (t, actions) in schedule.iter().enumerate() {
            if env.is_done() {
                env.reset(None);
            }
            let r = env.step(actions[i])?;
            let b = &batched[t][i];
            let same = r.reward.to_bits() == b.reward.to_bits()
                && r.truncated == b.truncated
                && r.observation.values.iter().zip(&b.observation.values).all(|(x, y)| x.to_bits() == y.to_bits());
            if !same {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
