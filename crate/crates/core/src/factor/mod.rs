//! Numeric incomplete LU: the serial up-looking reference, the
//! point-to-point upper stage, and the two lower-stage methods.
//!
//! All entry points work on [`IluFactors`] already assembled in the level
//! ordering, where upper level `i` occupies rows
//! `level_ptr[i]..level_ptr[i + 1]` and the lower stage is the trailing
//! block of rows.

mod er;
mod kernel;
mod select;
mod serial;
mod sr;
mod sync;
mod tiles;
mod upper;

pub use er::{build_er, factor_er, ErLayout};
pub use select::{
    row_imbalance, select_lower_method, select_lower_method_with, LowerMethod, SelectThresholds,
};
pub use serial::factor_serial;
pub use sr::factor_sr;
pub(crate) use sync::run_p2p;
pub use sync::{build_sync_schedule, Sweep, SyncSchedule};
pub use tiles::{
    build_tiles, check_intra_level_independence, greedy_tile_sizes, Segment, TileLayout,
};
pub use upper::{build_upper_schedule, factor_parallel_upper};

use std::ops::Range;

use crate::ordering::{LevelSource, StagePartition};

/// Stage structure expressed in the factor (level) ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageLayout {
    level_ptr: Vec<usize>,
    n: usize,
    source: LevelSource,
}

impl StageLayout {
    pub fn from_partition(p: &StagePartition) -> Self {
        Self {
            level_ptr: p.level_ptr(),
            n: p.n(),
            source: p.source(),
        }
    }

    /// Layout from explicit level sizes; rows past the last level form the
    /// lower stage.
    pub fn from_level_sizes(sizes: &[usize], n: usize, source: LevelSource) -> Self {
        let mut level_ptr = Vec::with_capacity(sizes.len() + 1);
        level_ptr.push(0);
        for &s in sizes {
            level_ptr.push(level_ptr.last().unwrap() + s);
        }
        assert!(
            *level_ptr.last().unwrap() <= n,
            "levels exceed the row count"
        );
        Self {
            level_ptr,
            n,
            source,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of upper-stage rows; also the first lower-stage row.
    #[inline]
    pub fn nu(&self) -> usize {
        *self.level_ptr.last().unwrap()
    }

    #[inline]
    pub fn num_lower(&self) -> usize {
        self.n - self.nu()
    }

    #[inline]
    pub fn num_levels(&self) -> usize {
        self.level_ptr.len() - 1
    }

    #[inline]
    pub fn level_ptr(&self) -> &[usize] {
        &self.level_ptr
    }

    #[inline]
    pub fn source(&self) -> LevelSource {
        self.source
    }

    #[inline]
    pub fn level_range(&self, i: usize) -> Range<usize> {
        self.level_ptr[i]..self.level_ptr[i + 1]
    }

    /// Upper levels as explicit row lists.
    pub fn levels(&self) -> Vec<Vec<usize>> {
        (0..self.num_levels())
            .map(|i| self.level_range(i).collect())
            .collect()
    }

    /// Level containing upper-stage row `c`.
    #[inline]
    pub fn level_of(&self, c: usize) -> usize {
        debug_assert!(c < self.nu());
        self.level_ptr.partition_point(|&s| s <= c) - 1
    }
}
