//! Record a dataset, write it, stream it back and summarize it.

use std::sync::Arc;

use offlinemania::dataset::{generate, stats, DatasetReader};
use offlinemania::env::EnvConfig;
use offlinemania::policy::builtin;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = Arc::new(EnvConfig::canonical());
    let expert = builtin("expert", &cfg.track, &cfg.physics)?;
    let data = generate(&*expert, &cfg, 5_000, 7)?;

    let dir = std::env::temp_dir().join("offlinemania-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("expert-5k.omd");
    data.save(&path)?;
    println!("wrote {} ({} bytes)", path.display(), std::fs::metadata(&path)?.len());

    // Streaming read: records are decoded one at a time.
    let reader = DatasetReader::open(&path)?;
    println!("header: {:?}", reader.header());
    let timeouts = reader.filter(|t| t.as_ref().is_ok_and(|t| t.timeout)).count();
    println!("timeouts: {timeouts}");

    let s = stats(&path)?;
    println!("episodes {} mean return {:?}", s.episodes, s.mean_episode_return);
    println!("reward min {:.3} max {:.3}", s.reward.min, s.reward.max);
    Ok(())
}
