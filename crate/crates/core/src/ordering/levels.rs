use crate::sparse::SparsityPattern;

/// Which triangle/pattern a level schedule was derived from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LevelSource {
    /// `lower(A)`.
    LowerA,
    /// `lower(A + A^T)`.
    LowerAPlusAT,
    /// Strict upper triangle, dependencies pointing to larger indices
    /// (backward triangular solves).
    Upper,
}

/// Assignment of rows to dependency levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSchedule {
    level_of: Vec<usize>,
    levels: Vec<Vec<usize>>,
    source: LevelSource,
}

impl LevelSchedule {
    fn from_level_of(level_of: Vec<usize>, source: LevelSource) -> Self {
        let num = level_of.iter().map(|&l| l + 1).max().unwrap_or(0);
        let mut levels = vec![Vec::new(); num];
        for (r, &l) in level_of.iter().enumerate() {
            levels[l].push(r);
        }
        Self {
            level_of,
            levels,
            source,
        }
    }

    #[inline]
    pub fn level_of(&self) -> &[usize] {
        &self.level_of
    }

    #[inline]
    pub fn levels(&self) -> &[Vec<usize>] {
        &self.levels
    }

    #[inline]
    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.level_of.len()
    }

    #[inline]
    pub fn source(&self) -> LevelSource {
        self.source
    }

    pub fn stats(&self) -> LevelStats {
        level_stats(self)
    }
}

/// Longest-path level assignment on a strictly lower triangular pattern.
///
/// Row `r` gets `1 + max(level_of[c])` over its stored `c < r` (0 if none).
/// Entries on or above the diagonal are ignored. Rows within a level are
/// listed in ascending index order.
pub fn compute_levels(lower: &SparsityPattern, source: LevelSource) -> LevelSchedule {
    let n = lower.n();
    let mut level_of = vec![0usize; n];
    for r in 0..n {
        let mut lvl = 0;
        for &c in lower.row(r) {
            if c < r {
                lvl = lvl.max(level_of[c] + 1);
            }
        }
        level_of[r] = lvl;
    }
    LevelSchedule::from_level_of(level_of, source)
}

/// Levels for a backward sweep: row `i` depends on every stored `j > i`.
/// Entries on or below the diagonal are ignored.
pub fn compute_levels_upper(upper: &SparsityPattern) -> LevelSchedule {
    let n = upper.n();
    let mut level_of = vec![0usize; n];
    for r in (0..n).rev() {
        let mut lvl = 0;
        for &c in upper.row(r) {
            if c > r {
                lvl = lvl.max(level_of[c] + 1);
            }
        }
        level_of[r] = lvl;
    }
    LevelSchedule::from_level_of(level_of, LevelSource::Upper)
}

/// Level schedule of `lower(A)` or `lower(A + A^T)` for a full pattern.
pub fn levels_for_pattern(a: &SparsityPattern, source: LevelSource) -> LevelSchedule {
    match source {
        LevelSource::LowerA => compute_levels(&a.lower(), source),
        LevelSource::LowerAPlusAT => compute_levels(&a.symmetrize().lower(), source),
        LevelSource::Upper => compute_levels_upper(&a.upper()),
    }
}

/// Distribution of rows across levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelStats {
    pub num_levels: usize,
    pub min_rows: usize,
    pub max_rows: usize,
    /// Lower middle element for an even number of levels.
    pub median_rows: usize,
}

pub fn level_stats(s: &LevelSchedule) -> LevelStats {
    let mut sizes: Vec<usize> = s.levels.iter().map(Vec::len).collect();
    if sizes.is_empty() {
        return LevelStats {
            num_levels: 0,
            min_rows: 0,
            max_rows: 0,
            median_rows: 0,
        };
    }
    sizes.sort_unstable();
    LevelStats {
        num_levels: sizes.len(),
        min_rows: sizes[0],
        max_rows: *sizes.last().unwrap(),
        median_rows: sizes[(sizes.len() - 1) / 2],
    }
}
