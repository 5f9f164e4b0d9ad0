use super::tiles::{SrTask, TileLayout};
use crate::error::{Error, Result};
use crate::pool::WorkerPool;
use crate::symbolic::{IluFactors, KernelParts};

/// Segmented-rows lower stage.
///
/// For each upper level in turn the tiles of its subblock are divided by
/// their pivots, then every later tile touched by that level receives the
/// level's updates. Updates into one tile are chained by source level, so
/// each value sees its updates in ascending column order. Dropped L entries
/// are lumped (MILU) by the task holding the row's diagonal and zeroed once
/// the graph has drained. The corner is then factored row by row.
///
/// The upper stage must already be factored.
pub fn factor_sr(pool: &WorkerPool, f: &mut IluFactors, tiles: &TileLayout) -> Result<()> {
    if tiles.n() != f.n() {
        return Err(Error::DimensionMismatch {
            expected: f.n(),
            got: tiles.n(),
        });
    }
    let nu = tiles.nu();
    let n = f.n();
    let k = f.kernel_parts();
    let ptr = tiles.level_ptr();
    tiles.sr_graph.run(pool, |task| match tiles.sr_tasks[task] {
        SrTask::Divide(t) => {
            for s in tiles.segments(t) {
                for p in s.start..s.end {
                    // SAFETY: the tile's positions belong to this task alone;
                    // the pivot rows are upper-stage rows, already complete.
                    unsafe {
                        k.divide(s.row, p);
                    }
                }
            }
        }
        SrTask::Join => {}
        SrTask::Update { level, tile } => {
            for s in tiles.segments(tile) {
                // SAFETY: writes stay inside the segment (plus the diagonal
                // when it lies in the segment); the source level's values
                // are final after its join.
                unsafe { update_segment(&k, s.row, s.start..s.end, ptr[level], ptr[level + 1]) };
            }
        }
    });

    for r in nu..n {
        // SAFETY: serial from here on.
        unsafe {
            let split = k.first_at_or_after(r, nu);
            for p in k.row_start[r]..split {
                if k.dropped.get(p) {
                    k.val.set(p, 0.0);
                }
            }
            k.eliminate(r, split, k.diag_pos[r]);
            if k.pivot_is_zero(r) {
                return Err(Error::ZeroPivot(r));
            }
        }
    }
    Ok(())
}

/// Applies the updates of row `r`'s L entries with columns in `lo..hi` to
/// the positions `seg` of the same row.
unsafe fn update_segment(
    k: &KernelParts<'_>,
    r: usize,
    seg: std::ops::Range<usize>,
    lo: usize,
    hi: usize,
) {
    let d = k.diag_pos[r];
    let owner = k.milu && seg.contains(&d);
    let end = k.row_end(r);
    for p in k.first_at_or_after(r, lo)..k.first_at_or_after(r, hi) {
        if k.dropped.get(p) {
            if owner {
                k.lump_dropped(r, p);
            }
            continue;
        }
        let l = k.val.get(p);
        if owner {
            k.update(k.col[p], l, p + 1..end, seg.clone(), Some(d));
        } else {
            k.update(k.col[p], l, seg.clone(), seg.clone(), None);
        }
    }
}
