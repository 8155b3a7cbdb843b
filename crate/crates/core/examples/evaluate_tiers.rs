//! Evaluate every builtin policy over the same seeds.
//!
//! cargo run --release --example evaluate_tiers -- [episodes]

use std::sync::Arc;

use offlinemania::env::EnvConfig;
use offlinemania::harness::evaluate;
use offlinemania::policy::{builtin, BUILTIN_POLICIES};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let episodes = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(20);
    let cfg = Arc::new(EnvConfig::canonical());
    println!("{:<8} {:>10} {:>9} {:>6} {:>9} {:>10}", "policy", "return", "std", "laps", "lap med", "contacts");
    for name in BUILTIN_POLICIES {
        let p = builtin(name, &cfg.track, &cfg.physics)?;
        let r = evaluate(&cfg, &*p, episodes, 0)?;
        let contacts = r.collision_steps.iter().filter(|&&c| c > 0).count();
        println!(
            "{:<8} {:>10.1} {:>9.1} {:>6.2} {:>9} {:>7}/{}",
            name,
            r.mean_return,
            r.std_return,
            r.mean_laps,
            r.median_lap_steps.map_or("-".into(), |m| format!("{m:.0}")),
            contacts,
            episodes
        );
    }
    Ok(())
}
