//! Step many instances in lock-step and measure throughput.

use std::sync::Arc;

use offlinemania::dynamics::Action;
use offlinemania::env::{batched_step, Env, EnvConfig};
use offlinemania::harness::{batched_matches_sequential, bench};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = Arc::new(EnvConfig::canonical());
    let mut envs: Vec<Env> = (0..8).map(|_| Env::new(cfg.clone())).collect();
    for (i, e) in envs.iter_mut().enumerate() {
        e.reset(Some(i as u64));
    }
    let actions: Vec<Action> = (0..8).map(|i| Action::new(i as f64 / 8.0 - 0.5, 1.0)).collect();
    for _ in 0..100 {
        batched_step(&mut envs, &actions)?;
    }
    for (i, e) in envs.iter().enumerate() {
        println!("env {i}: s={:7.2} laps={}", e.tracker().u, e.tracker().lap_count);
    }

    println!("batched == sequential: {}", batched_matches_sequential(&cfg, 4, 3_000, 1)?);
    let r = bench(&cfg, 16, 20_000, 0);
    println!("{}", serde_json::to_string_pretty(&r)?);
    Ok(())
}
