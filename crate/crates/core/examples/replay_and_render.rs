//! Record an episode, verify it replays exactly, and draw it.
//!
//! cargo run --release --example replay_and_render -- [policy] [seed]

use std::sync::Arc;

use offlinemania::env::EnvConfig;
use offlinemania::harness::{record, render_svg, verify_replay, Trajectory};
use offlinemania::policy::builtin;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let policy = args.next().unwrap_or_else(|| "expert".into());
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);

    let cfg = Arc::new(EnvConfig::canonical());
    let p = builtin(&policy, &cfg.track, &cfg.physics)?;
    let traj = record(&cfg, &*p, seed);

    let dir = std::env::temp_dir().join("offlinemania-example");
    std::fs::create_dir_all(&dir)?;
    let json = dir.join(format!("{policy}-{seed}.json"));
    traj.save(&json)?;

    // A fresh load must reproduce every reward bit for bit.
    verify_replay(&cfg, &Trajectory::load(&json)?)?;
    println!("replay of {} steps verified", traj.steps.len());

    let svg = dir.join(format!("{policy}-{seed}.svg"));
    std::fs::write(&svg, render_svg(&cfg.track, &traj)?)?;
    println!("{}\n{}", json.display(), svg.display());
    Ok(())
}
