use super::levels::{LevelSchedule, LevelSource};
use crate::error::{Error, Result};
use crate::sparse::Permutation;

/// Thresholds deciding which levels stay in the level-scheduled stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionConfig {
    /// A level needs at least this many rows to be accepted.
    pub min_level_rows: usize,
    /// A level is rejected when its mean row length exceeds this multiple
    /// of the matrix mean row length.
    pub density_factor: f64,
    /// Only a trailing run of rejected levels moves to the lower stage;
    /// rejected levels sandwiched between accepted ones stay put. When
    /// false, the first rejected level starts the lower stage.
    pub suffix_only: bool,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        Self {
            min_level_rows: 16,
            density_factor: 4.0,
            suffix_only: true,
        }
    }
}

impl PartitionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_level_rows < 1 {
            return Err(Error::Config("min_level_rows must be at least 1".into()));
        }
        if !(self.density_factor > 0.0) {
            return Err(Error::Config("density_factor must be positive".into()));
        }
        Ok(())
    }
}

/// Split of the levels into an upper (point-to-point scheduled) stage and a
/// trailing lower stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StagePartition {
    upper_levels: Vec<Vec<usize>>,
    lower_rows: Vec<usize>,
    cut_level: usize,
    config: PartitionConfig,
    source: LevelSource,
}

impl StagePartition {
    /// Partition with every level in the upper stage.
    pub fn all_upper(schedule: &LevelSchedule) -> Self {
        Self {
            upper_levels: schedule.levels().to_vec(),
            lower_rows: Vec::new(),
            cut_level: schedule.num_levels(),
            config: PartitionConfig {
                min_level_rows: 1,
                density_factor: f64::INFINITY,
                suffix_only: true,
            },
            source: schedule.source(),
        }
    }

    /// Partition with an explicit cut; levels at or after `cut_level` form
    /// the lower stage.
    pub fn with_cut(schedule: &LevelSchedule, cut_level: usize, config: PartitionConfig) -> Self {
        let cut_level = cut_level.min(schedule.num_levels());
        let upper_levels = schedule.levels()[..cut_level].to_vec();
        let mut lower_rows: Vec<usize> = schedule.levels()[cut_level..]
            .iter()
            .flatten()
            .copied()
            .collect();
        lower_rows.sort_unstable();
        Self {
            upper_levels,
            lower_rows,
            cut_level,
            config,
            source: schedule.source(),
        }
    }

    #[inline]
    pub fn upper_levels(&self) -> &[Vec<usize>] {
        &self.upper_levels
    }

    /// Lower-stage rows in ascending original index.
    #[inline]
    pub fn lower_rows(&self) -> &[usize] {
        &self.lower_rows
    }

    #[inline]
    pub fn cut_level(&self) -> usize {
        self.cut_level
    }

    #[inline]
    pub fn config(&self) -> &PartitionConfig {
        &self.config
    }

    #[inline]
    pub fn source(&self) -> LevelSource {
        self.source
    }

    pub fn num_upper_rows(&self) -> usize {
        self.upper_levels.iter().map(Vec::len).sum()
    }

    pub fn n(&self) -> usize {
        self.num_upper_rows() + self.lower_rows.len()
    }

    /// Offsets of the upper levels in the level ordering; the last entry is
    /// the first lower-stage row.
    pub fn level_ptr(&self) -> Vec<usize> {
        let mut ptr = Vec::with_capacity(self.upper_levels.len() + 1);
        ptr.push(0);
        for l in &self.upper_levels {
            ptr.push(ptr.last().unwrap() + l.len());
        }
        ptr
    }
}

/// Decides the stage split.
///
/// A level is accepted when it has at least `min_level_rows` rows and its
/// mean row length is at most `density_factor` times the matrix mean. The
/// cut is the start of the trailing run of rejected levels.
pub fn partition_stages(
    schedule: &LevelSchedule,
    row_nnz: &[usize],
    config: PartitionConfig,
) -> Result<StagePartition> {
    config.validate()?;
    if row_nnz.len() != schedule.n() {
        return Err(Error::DimensionMismatch {
            expected: schedule.n(),
            got: row_nnz.len(),
        });
    }
    let n = row_nnz.len();
    let nnz: usize = row_nnz.iter().sum();
    let matrix_mean = if n == 0 { 0.0 } else { nnz as f64 / n as f64 };
    let accepted = |level: &[usize]| {
        if level.len() < config.min_level_rows {
            return false;
        }
        let level_mean =
            level.iter().map(|&r| row_nnz[r]).sum::<usize>() as f64 / level.len() as f64;
        level_mean <= config.density_factor * matrix_mean
    };
    let levels = schedule.levels();
    let cut = if config.suffix_only {
        let mut cut = levels.len();
        while cut > 0 && !accepted(&levels[cut - 1]) {
            cut -= 1;
        }
        cut
    } else {
        levels
            .iter()
            .position(|l| !accepted(l))
            .unwrap_or(levels.len())
    };
    Ok(StagePartition::with_cut(schedule, cut, config))
}

/// New-to-old permutation: upper levels in order, then the lower rows.
pub fn build_level_permutation(p: &StagePartition) -> Permutation {
    let perm: Vec<usize> = p
        .upper_levels
        .iter()
        .flatten()
        .chain(p.lower_rows.iter())
        .copied()
        .collect();
    Permutation::new(perm).expect("partition covers every row exactly once")
}
