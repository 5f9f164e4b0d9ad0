//! Level sets, stage partitioning, and the built-in bandwidth-reducing ordering.

mod levels;
mod partition;
mod rcm;

pub use levels::{
    compute_levels, compute_levels_upper, level_stats, levels_for_pattern, LevelSchedule,
    LevelSource, LevelStats,
};
pub use partition::{build_level_permutation, partition_stages, PartitionConfig, StagePartition};
pub use rcm::rcm_order;
