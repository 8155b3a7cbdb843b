//! Plug a hand-written policy into the harness and record data with it.

use std::sync::Arc;

use offlinemania::dataset::generate;
use offlinemania::dynamics::Action;
use offlinemania::env::EnvConfig;
use offlinemania::harness::evaluate;
use offlinemania::policy::{Policy, PrivilegedView};
use offlinemania::rng::SimRng;
use offlinemania::sensing::{Observation, NUM_RAYS};

/// Steers toward whichever side has more free space; observation only.
struct WallFollower;

impl Policy for WallFollower {
    fn name(&self) -> &str {
        "wall-follower"
    }

    fn deterministic(&self) -> bool {
        true
    }

    fn act(&self, obs: &Observation, _view: &PrivilegedView<'_>, _rng: &mut SimRng) -> Action {
        let half = NUM_RAYS / 2;
        let left: f64 = (0..half).map(|i| obs.ray(i).distance).sum();
        let right: f64 = (half + 1..NUM_RAYS).map(|i| obs.ray(i).distance).sum();
        let front = obs.ray(half).distance;
        // Positive steer turns right.
        let steer = (2.0 * (right - left)).clamp(-1.0, 1.0);
        let throttle = if front < 0.3 && obs.forward_speed() > 8.0 { -0.5 } else { 0.6 };
        Action::new(steer, throttle)
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = Arc::new(EnvConfig::canonical());
    println!("{}", evaluate(&cfg, &WallFollower, 5, 0)?);
    let d = generate(&WallFollower, &cfg, 3_000, 0)?;
    println!("recorded {} transitions, provenance {:?}", d.len(), d.header.provenance);
    Ok(())
}
