//! Transition datasets: the `.omd` container, generation, mixing and stats.

pub mod format;
pub mod generate;
pub mod mix;
pub mod stats;
pub mod suite;

pub use format::{
    same_modulo_timestamp, Dataset, DatasetHeader, DatasetReader, DatasetWriter, MixInfo, Provenance, Transition,
    ACT_DIM, RECORD_BYTES,
};
pub use generate::{episode_seed, generate, record_episode};
pub use mix::{mix, quotas};
pub use stats::{stats, stats_from_reader, DatasetStats, FieldStats};
pub use suite::{build_suite, recipe_seed, write_suite, MIX_RATIOS, SUITE_FILES};
