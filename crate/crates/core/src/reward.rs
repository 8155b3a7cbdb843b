//! Centerline-progress reward with a speed-scaled wall-contact penalty.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardConfig {
    /// Collision coefficient.
    pub lambda: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self { lambda: 50.0 }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::Config(format!("reward.lambda must be >= 0, got {}", self.lambda)));
        }
        Ok(())
    }
}

/// Metres gained beyond the episode-best position, minus `lambda * |v|` on
/// every step spent touching a wall.
#[inline]
pub fn compute_reward(progress_delta: f64, in_contact: bool, impact_speed: f64, cfg: &RewardConfig) -> f64 {
    let penalty = if in_contact { cfg.lambda * impact_speed } else { 0.0 };
    progress_delta - penalty
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contact_without_progress() {
        assert_eq!(compute_reward(0.0, true, 2.0, &RewardConfig::default()), -100.0);
    }

    #[test]
    fn progress_without_contact() {
        assert_eq!(compute_reward(2.5, false, 0.0, &RewardConfig::default()), 2.5);
    }

    #[test]
    fn behind_best_is_zero() {
        assert_eq!(compute_reward(0.0, false, 0.0, &RewardConfig::default()), 0.0);
    }

    #[test]
    fn impact_speed_ignored_without_contact() {
        assert_eq!(compute_reward(1.0, false, 30.0, &RewardConfig::default()), 1.0);
    }
}
