//! Mix three tiers at 90/7/3 into a small dataset.

use std::sync::Arc;

use offlinemania::dataset::{generate, mix, quotas, MIX_RATIOS};
use offlinemania::env::EnvConfig;
use offlinemania::policy::builtin;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = Arc::new(EnvConfig::canonical());
    let tiers = ["basic", "medium", "expert"]
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let p = builtin(name, &cfg.track, &cfg.physics)?;
            generate(&*p, &cfg, 10_000, i as u64)
        })
        .collect::<Result<Vec<_>, _>>()?;

    println!("quotas for 5000: {:?}", quotas(&MIX_RATIOS, 5_000)?);
    let inputs: Vec<_> = tiers.iter().collect();
    let mixed = mix(&inputs, &MIX_RATIOS, 5_000, 99)?;
    for p in &mixed.header.provenance {
        println!("{:<8} {:>5} transitions (source seed {})", p.policy, p.count, p.seed);
    }

    // Asking for more than an input holds is an error, not a silent shortfall.
    match mix(&inputs, &[0.0, 0.0, 1.0], 20_000, 0) {
        Err(e) => println!("expected failure: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
