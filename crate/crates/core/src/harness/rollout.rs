//! Episode runner and per-episode summaries.

use crate::dynamics::Action;
use crate::env::{Env, StepResult};
use crate::policy::{Policy, PrivilegedView};
use crate::rng;
use crate::sensing::Observation;

/// Outcome of one full episode.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeSummary {
    pub seed: u64,
    pub steps: usize,
    pub episode_return: f64,
    pub u_start: f64,
    pub u_best: f64,
    /// Whole laps of new ground covered from the start position.
    pub laps: u32,
    /// Duration in steps of each completed lap, in order.
    pub lap_steps: Vec<usize>,
    pub collision_steps: usize,
}

/// Runs one seeded episode to truncation. `on_step` sees the observation the
/// action was chosen from, the action, and the step result.
pub fn run_episode<F>(env: &mut Env, policy: &dyn Policy, seed: u64, mut on_step: F) -> EpisodeSummary
where
    F: FnMut(&Observation, Action, &StepResult),
{
    let mut obs = env.reset(Some(seed));
    let mut policy_rng = rng::stream(seed, rng::STREAM_POLICY);
    let length = env.track().total_length;
    let u_start = env.u_start();
    let mut summary = EpisodeSummary {
        seed,
        steps: 0,
        episode_return: 0.0,
        u_start,
        u_best: u_start,
        laps: 0,
        lap_steps: Vec::new(),
        collision_steps: 0,
    };
    let mut last_lap_step = 0;
    loop {
        let action = {
            let view = PrivilegedView {
                track: env.track(),
                vehicle: env.vehicle(),
            };
            policy.act(&obs, &view, &mut policy_rng).clamped()
        };
        let res = env.step(action).expect("episode is running");
        on_step(&obs, action, &res);
        summary.steps += 1;
        summary.episode_return += res.reward;
        summary.u_best = res.info.u_best;
        if res.info.in_contact {
            summary.collision_steps += 1;
        }
        while res.info.u_best >= u_start + (summary.laps as f64 + 1.0) * length {
            summary.laps += 1;
            summary.lap_steps.push(summary.steps - last_lap_step);
            last_lap_step = summary.steps;
        }
        obs = res.observation;
        if res.truncated || res.terminated {
            break;
        }
    }
    summary
}

/// Convenience wrapper that discards per-step data.
pub fn run_episode_quiet(env: &mut Env, policy: &dyn Policy, seed: u64) -> EpisodeSummary {
    run_episode(env, policy, seed, |_, _, _| {})
}
