//! The six-dataset suite: three single-tier sets, two mixes, one small set.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use super::format::Dataset;
use super::generate::generate;
use super::mix::mix;
use crate::env::EnvConfig;
use crate::error::Result;
use crate::policy::builtin;
use crate::rng::derive_seed;

pub const TIER_SIZE: u64 = 100_000;
pub const MIX_LARGE_SIZE: u64 = 200_000;
pub const SMALL_SIZE: u64 = 5_000;
pub const MIX_RATIOS: [f64; 3] = [0.90, 0.07, 0.03];

/// File names in the order they are produced.
pub const SUITE_FILES: [&str; 6] = [
    "basic.omd",
    "medium.omd",
    "expert.omd",
    "mix-large.omd",
    "mix-small.omd",
    "basic-small.omd",
];

/// Seed of one recipe, derived from the suite seed.
pub fn recipe_seed(seed: u64, recipe: &str) -> u64 {
    // Stable per-name tag; FNV-1a keeps it independent of std's hasher.
    let tag = recipe
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    derive_seed(seed, tag)
}

/// Builds every suite dataset in memory.
///
/// mix-large needs 180,000 basic transitions, more than the 100k basic set
/// holds, so it draws from a separate 200k basic pool. mix-small draws from
/// the three 100k sets. basic-small is generated fresh.
pub fn build_suite(config: &Arc<EnvConfig>, seed: u64) -> Result<Vec<(&'static str, Dataset)>> {
    let pol = |name| builtin(name, &config.track, &config.physics);
    let basic_p = pol("basic")?;
    let basic = generate(&*basic_p, config, TIER_SIZE, recipe_seed(seed, "basic"))?;
    let medium = generate(&*pol("medium")?, config, TIER_SIZE, recipe_seed(seed, "medium"))?;
    let expert = generate(&*pol("expert")?, config, TIER_SIZE, recipe_seed(seed, "expert"))?;
    let mix_large = {
        let pool = generate(&*basic_p, config, MIX_LARGE_SIZE, recipe_seed(seed, "basic-pool"))?;
        mix(&[&pool, &medium, &expert], &MIX_RATIOS, MIX_LARGE_SIZE, recipe_seed(seed, "mix-large"))?
    };
    let mix_small = mix(&[&basic, &medium, &expert], &MIX_RATIOS, SMALL_SIZE, recipe_seed(seed, "mix-small"))?;
    let basic_small = generate(&*basic_p, config, SMALL_SIZE, recipe_seed(seed, "basic-small"))?;
    Ok(vec![
        (SUITE_FILES[0], basic),
        (SUITE_FILES[1], medium),
        (SUITE_FILES[2], expert),
        (SUITE_FILES[3], mix_large),
        (SUITE_FILES[4], mix_small),
        (SUITE_FILES[5], basic_small),
    ])
}

/// Builds the suite and writes it into `dir`, returning the written paths.
pub fn write_suite(config: &Arc<EnvConfig>, seed: u64, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for (name, d) in build_suite(config, seed)? {
        let p = dir.join(name);
        d.save(&p)?;
        paths.push(p);
    }
    Ok(paths)
}
