//! Tile layout of the lower stage for the segmented-rows method.
//!
//! Lower-stage rows are cut into subblocks by column: one subblock per
//! upper level, plus the corner (columns in the lower stage). Each
//! subblock's nonzeros, taken row-major, are split greedily into tiles of
//! `tile_size` positions; a tile may span several rows and hold at most
//! one segment per row.

use std::ops::Range;

use super::StageLayout;
use crate::error::{Error, Result};
use crate::ordering::LevelSource;
use crate::pool::TaskGraph;
use crate::sparse::SparsityPattern;
use crate::symbolic::IluFactors;

/// Contiguous positions `start..end` of one row inside a tile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub row: usize,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SrTask {
    Divide(usize),
    Join,
    Update { level: usize, tile: usize },
}

#[derive(Debug, Clone)]
pub struct TileLayout {
    tile_size: usize,
    level_ptr: Vec<usize>,
    n: usize,
    segments: Vec<Segment>,
    tile_start: Vec<usize>,
    block_start: Vec<usize>,
    pub(crate) sr_graph: TaskGraph,
    pub(crate) sr_tasks: Vec<SrTask>,
    /// Tiles of the upper-level subblocks, ordered per row by column.
    pub(crate) solve_graph: TaskGraph,
}

impl TileLayout {
    #[inline]
    pub fn tile_size(&self) -> usize {
        self.tile_size
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn nu(&self) -> usize {
        *self.level_ptr.last().unwrap()
    }

    #[inline]
    pub fn level_ptr(&self) -> &[usize] {
        &self.level_ptr
    }

    /// Number of subblocks: one per upper level, then the corner.
    #[inline]
    pub fn num_blocks(&self) -> usize {
        self.block_start.len() - 1
    }

    #[inline]
    pub fn num_tiles(&self) -> usize {
        self.tile_start.len() - 1
    }

    /// Tile ids of subblock `b`; `b == num_levels` is the corner.
    #[inline]
    pub fn block_tiles(&self, b: usize) -> Range<usize> {
        self.block_start[b]..self.block_start[b + 1]
    }

    #[inline]
    pub fn segments(&self, tile: usize) -> &[Segment] {
        &self.segments[self.tile_start[tile]..self.tile_start[tile + 1]]
    }

    pub fn tile_nnz(&self, tile: usize) -> usize {
        self.segments(tile).iter().map(|s| s.end - s.start).sum()
    }

    pub fn num_sr_tasks(&self) -> usize {
        self.sr_tasks.len()
    }

    /// Column range of subblock `b`.
    pub fn block_cols(&self, b: usize) -> Range<usize> {
        let nl = self.level_ptr.len() - 1;
        if b < nl {
            self.level_ptr[b]..self.level_ptr[b + 1]
        } else {
            self.nu()..self.n
        }
    }
}

/// Sizes of the tiles produced by greedily packing `nnz` consecutive
/// positions into tiles of at most `tile_size`.
pub fn greedy_tile_sizes(nnz: usize, tile_size: usize) -> Vec<usize> {
    assert!(tile_size > 0);
    let mut sizes = vec![tile_size; nnz / tile_size];
    if !nnz.is_multiple_of(tile_size) {
        sizes.push(nnz % tile_size);
    }
    sizes
}

/// Verifies that no stored entry joins two distinct rows of the same upper
/// level.
pub fn check_intra_level_independence(
    pattern: &SparsityPattern,
    layout: &StageLayout,
) -> Result<()> {
    if pattern.n() != layout.n() {
        return Err(Error::DimensionMismatch {
            expected: layout.n(),
            got: pattern.n(),
        });
    }
    for i in 0..layout.num_levels() {
        let range = layout.level_range(i);
        for r in range.clone() {
            if let Some(&c) = pattern
                .row(r)
                .iter()
                .find(|&&c| c != r && range.contains(&c))
            {
                return Err(Error::InvalidStructure(format!(
                    "rows {r} and {c} share level {i} but are coupled"
                )));
            }
        }
    }
    Ok(())
}

#[inline]
fn first_at_or_after(p: &SparsityPattern, r: usize, col: usize) -> usize {
    let range = p.row_range(r);
    range.start + p.row(r).partition_point(|&c| c < col)
}

/// Builds tiles and the task graphs for factorization and forward solve.
///
/// Requires levels derived from `lower(A + A^T)` and checks the resulting
/// intra-level independence on the factor pattern.
pub fn build_tiles(f: &IluFactors, layout: &StageLayout, tile_size: usize) -> Result<TileLayout> {
    if layout.source() != LevelSource::LowerAPlusAT {
        return Err(Error::SrRequiresSymmetrizedLevels);
    }
    if tile_size == 0 {
        return Err(Error::Config("tile size must be at least 1".into()));
    }
    let pat = f.pattern();
    check_intra_level_independence(pat, layout)?;
    let n = layout.n();
    let nu = layout.nu();
    let nl = layout.num_levels();

    let mut segments = Vec::new();
    let mut tile_start = vec![0usize];
    let mut block_start = vec![0usize];
    for b in 0..=nl {
        let (lo, hi) = if b < nl {
            (layout.level_ptr()[b], layout.level_ptr()[b + 1])
        } else {
            (nu, n)
        };
        let mut fill = 0usize;
        for r in nu..n {
            let mut s = first_at_or_after(pat, r, lo);
            let e = first_at_or_after(pat, r, hi);
            while s < e {
                let take = (e - s).min(tile_size - fill);
                segments.push(Segment {
                    row: r,
                    start: s,
                    end: s + take,
                });
                s += take;
                fill += take;
                if fill == tile_size {
                    tile_start.push(segments.len());
                    fill = 0;
                }
            }
        }
        if fill > 0 {
            tile_start.push(segments.len());
        }
        block_start.push(tile_start.len() - 1);
    }

    // Upper levels touched by each lower row.
    let row_levels: Vec<Vec<usize>> = (nu..n)
        .map(|r| {
            let mut lv: Vec<usize> = pat
                .row(r)
                .iter()
                .take_while(|&&c| c < nu)
                .map(|&c| layout.level_of(c))
                .collect();
            lv.dedup();
            lv
        })
        .collect();

    let ntiles = tile_start.len() - 1;
    let segs_of = |t: usize| &segments[tile_start[t]..tile_start[t + 1]];

    let mut g = TaskGraph::default();
    let mut tasks = Vec::new();
    let mut divide_id = vec![usize::MAX; ntiles];
    for b in 0..nl {
        for t in block_start[b]..block_start[b + 1] {
            divide_id[t] = g.add_task();
            tasks.push(SrTask::Divide(t));
        }
    }
    let mut join_id = Vec::with_capacity(nl);
    for b in 0..nl {
        let j = g.add_task();
        tasks.push(SrTask::Join);
        for t in block_start[b]..block_start[b + 1] {
            g.add_dep(divide_id[t], j);
        }
        join_id.push(j);
    }
    // Source levels touching each target tile, ascending.
    let tile_levels: Vec<Vec<usize>> = (0..ntiles)
        .map(|t| {
            let mut lv: Vec<usize> = segs_of(t)
                .iter()
                .flat_map(|s| row_levels[s.row - nu].iter().copied())
                .collect();
            lv.sort_unstable();
            lv.dedup();
            lv
        })
        .collect();
    let mut last_update = vec![usize::MAX; ntiles];
    for i in 0..nl {
        for t in block_start[i + 1]..ntiles {
            if tile_levels[t].binary_search(&i).is_err() {
                continue;
            }
            let u = g.add_task();
            tasks.push(SrTask::Update { level: i, tile: t });
            g.add_dep(join_id[i], u);
            if last_update[t] != usize::MAX {
                g.add_dep(last_update[t], u);
            }
            last_update[t] = u;
        }
    }
    for t in 0..block_start[nl] {
        if last_update[t] != usize::MAX {
            g.add_dep(last_update[t], divide_id[t]);
        }
    }

    let mut solve = TaskGraph::default();
    let mut last_for_row = vec![usize::MAX; n - nu];
    for t in 0..block_start[nl] {
        let id = solve.add_task();
        let mut prev_dep = usize::MAX;
        for s in segs_of(t) {
            let last = last_for_row[s.row - nu];
            if last != usize::MAX && last != prev_dep {
                solve.add_dep(last, id);
                prev_dep = last;
            }
            last_for_row[s.row - nu] = id;
        }
    }

    Ok(TileLayout {
        tile_size,
        level_ptr: layout.level_ptr().to_vec(),
        n,
        segments,
        tile_start,
        block_start,
        sr_graph: g,
        sr_tasks: tasks,
        solve_graph: solve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pool::WorkerPool;
    use crate::sparse::{CsrMatrix, Permutation};
    use crate::symbolic::assemble_factors;

    #[test]
    fn greedy_split() {
        assert_eq!(greedy_tile_sizes(10, 4), vec![4, 4, 2]);
        assert!(greedy_tile_sizes(0, 4).is_empty());
    }

    /// Levels {0,1}, {2}; rows 3..6 in the lower stage, dense below.
    fn sample() -> (IluFactors, StageLayout) {
        let mut d = vec![vec![0.0; 6]; 6];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 10.0;
        }
        d[2][0] = 1.0;
        d[0][2] = 1.0;
        d[2][1] = 1.0;
        d[1][2] = 1.0;
        for r in 3..6 {
            for c in 0..6 {
                d[r][c] = if r == c { 10.0 } else { 1.0 };
                d[c][r] = if r == c { 10.0 } else { 1.0 };
            }
        }
        let a = CsrMatrix::from_dense(&d);
        let f = assemble_factors(
            &a,
            a.pattern(),
            &Permutation::identity(6),
            0.0,
            false,
            &WorkerPool::serial(),
        )
        .unwrap();
        (
            f,
            StageLayout::from_level_sizes(&[2, 1], 6, LevelSource::LowerAPlusAT),
        )
    }

    #[test]
    fn tiles_partition_each_subblock() {
        let (f, layout) = sample();
        let t = build_tiles(&f, &layout, 2).unwrap();
        assert_eq!(t.num_blocks(), 3);
        // subblock 0: rows 3..6 x cols {0,1} = 6 nonzeros
        let sizes: Vec<usize> = t.block_tiles(0).map(|x| t.tile_nnz(x)).collect();
        assert_eq!(sizes, greedy_tile_sizes(6, 2));
        for b in 0..t.num_blocks() {
            let cols = t.block_cols(b);
            let mut covered = Vec::new();
            for x in t.block_tiles(b) {
                for s in t.segments(x) {
                    assert!(f.pattern().col()[s.start..s.end]
                        .iter()
                        .all(|c| cols.contains(c)));
                    covered.extend(s.start..s.end);
                }
            }
            let mut want = Vec::new();
            for r in 3..6 {
                for q in f.pattern().row_range(r) {
                    if cols.contains(&f.pattern().col()[q]) {
                        want.push(q);
                    }
                }
            }
            assert_eq!(covered, want);
        }
    }

    #[test]
    fn requires_symmetrized_levels() {
        let (f, _) = sample();
        let layout = StageLayout::from_level_sizes(&[2, 1], 6, LevelSource::LowerA);
        assert_eq!(
            build_tiles(&f, &layout, 4).unwrap_err(),
            Error::SrRequiresSymmetrizedLevels
        );
        // levels {0,1,2} would couple rows 0 and 2
        let bad = StageLayout::from_level_sizes(&[3], 6, LevelSource::LowerAPlusAT);
        assert!(matches!(
            build_tiles(&f, &bad, 4),
            Err(Error::InvalidStructure(_))
        ));
    }
}
