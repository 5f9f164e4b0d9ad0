//! Point-to-point synchronization schedules.
//!
//! Rows of each level are dealt round-robin to workers (the dealing counter
//! continues across levels). That mapping fixes a program order per worker.
//! A row's structural dependencies are then pruned with per-worker vector
//! clocks: a dependency is dropped if the worker already knows it completed
//! (same worker, or implied by an earlier observed completion), and a
//! remaining wait is dropped if another retained wait implies it.

use crate::error::{Error, Result};
use crate::pool::{DoneFlags, WorkerPool};
use crate::sparse::SparsityPattern;

/// Direction of the dependencies read from a pattern row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    /// Row `r` depends on stored columns `c < r`.
    Forward,
    /// Row `r` depends on stored columns `c > r`.
    Backward,
}

const UNSCHEDULED: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyncSchedule {
    nthreads: usize,
    owner: Vec<usize>,
    position: Vec<usize>,
    program_order: Vec<Vec<usize>>,
    wait_start: Vec<usize>,
    wait_rows: Vec<usize>,
}

impl SyncSchedule {
    #[inline]
    pub fn nthreads(&self) -> usize {
        self.nthreads
    }

    /// Size of the row index space (not all rows need to be scheduled).
    #[inline]
    pub fn n(&self) -> usize {
        self.owner.len()
    }

    /// Worker executing `row`, `None` for rows outside the schedule.
    #[inline]
    pub fn owner(&self, row: usize) -> Option<usize> {
        match self.owner[row] {
            UNSCHEDULED => None,
            w => Some(w),
        }
    }

    /// Index of `row` in its worker's program order.
    #[inline]
    pub fn position(&self, row: usize) -> Option<usize> {
        self.owner(row).map(|_| self.position[row])
    }

    #[inline]
    pub fn program_order(&self) -> &[Vec<usize>] {
        &self.program_order
    }

    /// Rows that must be observed complete before `row` starts.
    #[inline]
    pub fn waits(&self, row: usize) -> &[usize] {
        &self.wait_rows[self.wait_start[row]..self.wait_start[row + 1]]
    }

    pub fn num_waits(&self) -> usize {
        self.wait_rows.len()
    }

    pub fn num_scheduled(&self) -> usize {
        self.program_order.iter().map(Vec::len).sum()
    }
}

/// Builds the worker mapping and pruned wait lists for `levels`.
///
/// Dependencies of a row are the entries of `deps.row(r)` in the direction
/// given by `sweep`; columns outside the schedule are assumed complete
/// before the schedule runs. Each dependency must lie in a strictly earlier
/// level.
pub fn build_sync_schedule(
    levels: &[Vec<usize>],
    deps: &SparsityPattern,
    sweep: Sweep,
    nthreads: usize,
) -> Result<SyncSchedule> {
    if nthreads < 1 {
        return Err(Error::Config("worker count must be at least 1".into()));
    }
    let n = deps.n();
    let p = nthreads;
    let mut owner = vec![UNSCHEDULED; n];
    let mut position = vec![0usize; n];
    let mut level_of = vec![0usize; n];
    let mut program_order: Vec<Vec<usize>> = vec![Vec::new(); p];
    let mut dealt = 0usize;
    for (l, level) in levels.iter().enumerate() {
        for &r in level {
            if r >= n || owner[r] != UNSCHEDULED {
                return Err(Error::InvalidStructure(format!(
                    "row {r} scheduled twice or out of range"
                )));
            }
            let w = dealt % p;
            dealt += 1;
            owner[r] = w;
            position[r] = program_order[w].len();
            program_order[w].push(r);
            level_of[r] = l;
        }
    }

    // Vector clocks: entry w' = number of rows of worker w' known complete.
    let mut slot = vec![usize::MAX; n];
    let mut clocks: Vec<u32> = Vec::new();
    let mut known: Vec<Vec<u32>> = vec![vec![0; p]; p];
    let mut need = vec![0u32; p];
    let mut touched: Vec<usize> = Vec::new();
    let mut cands: Vec<usize> = Vec::new();

    let mut wait_lists: Vec<Vec<usize>> = vec![Vec::new(); n];
    for level in levels {
        for &r in level {
            let w = owner[r];
            touched.clear();
            for &c in deps.row(r) {
                let is_dep = match sweep {
                    Sweep::Forward => c < r,
                    Sweep::Backward => c > r,
                };
                if !is_dep || owner[c] == UNSCHEDULED {
                    continue;
                }
                if level_of[c] >= level_of[r] {
                    return Err(Error::InvalidStructure(format!(
                        "row {r} depends on row {c} which is not in an earlier level"
                    )));
                }
                let wc = owner[c];
                if wc == w {
                    continue;
                }
                let cnt = position[c] as u32 + 1;
                if need[wc] == 0 {
                    touched.push(wc);
                }
                need[wc] = need[wc].max(cnt);
            }
            cands.clear();
            for &wc in &touched {
                if need[wc] > known[w][wc] {
                    cands.push(program_order[wc][need[wc] as usize - 1]);
                }
            }
            // drop waits implied by another retained wait
            let retained: Vec<usize> = cands
                .iter()
                .copied()
                .filter(|&x| {
                    let (wx, cx) = (owner[x], position[x] as u32 + 1);
                    !cands
                        .iter()
                        .any(|&y| y != x && clocks[slot[y] * p + wx] >= cx)
                })
                .collect();
            for &wc in &touched {
                need[wc] = 0;
            }
            for &y in &retained {
                let base = slot[y] * p;
                for k in 0..p {
                    known[w][k] = known[w][k].max(clocks[base + k]);
                }
            }
            known[w][w] = position[r] as u32 + 1;
            slot[r] = clocks.len() / p;
            clocks.extend_from_slice(&known[w]);
            let mut retained = retained;
            retained.sort_unstable();
            wait_lists[r] = retained;
        }
    }

    let mut wait_start = Vec::with_capacity(n + 1);
    let mut wait_rows = Vec::new();
    wait_start.push(0);
    for wl in &wait_lists {
        wait_rows.extend_from_slice(wl);
        wait_start.push(wait_rows.len());
    }
    Ok(SyncSchedule {
        nthreads,
        owner,
        position,
        program_order,
        wait_start,
        wait_rows,
    })
}

/// Runs `work(row)` for every scheduled row: each worker walks its program
/// order, waits on the row's retained dependencies, runs the row and then
/// publishes its completion.
pub(crate) fn run_p2p<F>(pool: &WorkerPool, sched: &SyncSchedule, work: F) -> Result<()>
where
    F: Fn(usize) + Sync,
{
    if pool.nthreads() != sched.nthreads() {
        return Err(Error::Config(format!(
            "schedule built for {} workers, pool has {}",
            sched.nthreads(),
            pool.nthreads()
        )));
    }
    if sched.nthreads() == 1 {
        for &r in &sched.program_order[0] {
            work(r);
        }
        return Ok(());
    }
    let flags = DoneFlags::new(sched.n());
    pool.broadcast(|w| {
        for &r in &sched.program_order[w] {
            for &x in sched.waits(r) {
                flags.wait(x);
            }
            work(r);
            flags.publish(r);
        }
    });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordering::{compute_levels, LevelSource};

    #[test]
    fn one_worker_needs_no_waits() {
        let p = SparsityPattern::from_positions(4, [(1, 0), (2, 0), (3, 1), (3, 2)]).unwrap();
        let s = compute_levels(&p, LevelSource::LowerA);
        let sched = build_sync_schedule(s.levels(), &p, Sweep::Forward, 1).unwrap();
        assert_eq!(sched.num_waits(), 0);
        assert_eq!(sched.program_order()[0], vec![0, 1, 2, 3]);
    }

    #[test]
    fn two_rows_two_workers() {
        let p = SparsityPattern::from_positions(2, [(1, 0)]).unwrap();
        let sched = build_sync_schedule(&[vec![0], vec![1]], &p, Sweep::Forward, 2).unwrap();
        assert_eq!(sched.owner(0), Some(0));
        assert_eq!(sched.owner(1), Some(1));
        assert_eq!(sched.waits(1), &[0]);
        assert!(sched.waits(0).is_empty());
    }

    #[test]
    fn implied_wait_is_pruned() {
        // 0 -> 1 -> 2, and 0 -> 2 directly: with three workers row 2 only
        // needs to wait for row 1.
        let p = SparsityPattern::from_positions(3, [(1, 0), (2, 0), (2, 1)]).unwrap();
        let sched =
            build_sync_schedule(&[vec![0], vec![1], vec![2]], &p, Sweep::Forward, 3).unwrap();
        assert_eq!(sched.waits(1), &[0]);
        assert_eq!(sched.waits(2), &[1]);
    }

    #[test]
    fn rejects_same_level_dependency() {
        let p = SparsityPattern::from_positions(2, [(1, 0)]).unwrap();
        assert!(build_sync_schedule(&[vec![0, 1]], &p, Sweep::Forward, 2).is_err());
        assert!(build_sync_schedule(&[vec![0], vec![1]], &p, Sweep::Forward, 0).is_err());
    }

    #[test]
    fn backward_sweep() {
        let u = SparsityPattern::from_positions(3, [(0, 1), (1, 2)]).unwrap();
        let sched =
            build_sync_schedule(&[vec![2], vec![1], vec![0]], &u, Sweep::Backward, 2).unwrap();
        assert_eq!(sched.owner(2), Some(0));
        assert_eq!(sched.owner(1), Some(1));
        assert_eq!(sched.owner(0), Some(0));
        assert_eq!(sched.waits(1), &[2]);
        assert_eq!(sched.waits(0), &[1]);
    }
}
