//! Worker pool, disjoint shared writes, completion flags and a small
//! dependency-counting task executor.

use std::collections::VecDeque;
use std::marker::PhantomData;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use crate::error::{Error, Result};

/// Fixed-size pool of workers. Every parallel kernel runs one closure per
/// worker; point-to-point waiting relies on all workers being live at once.
pub struct WorkerPool {
    pool: Option<rayon::ThreadPool>,
    nthreads: usize,
}

impl WorkerPool {
    pub fn new(nthreads: usize) -> Result<Self> {
        if nthreads < 1 {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        let pool = if nthreads == 1 {
            None
        } else {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(nthreads)
                    .thread_name(|i| format!("levilu-worker-{i}"))
                    .build()
                    .map_err(|e| Error::Config(e.to_string()))?,
            )
        };
        Ok(Self { pool, nthreads })
    }

    pub fn serial() -> Self {
        Self {
            pool: None,
            nthreads: 1,
        }
    }

    #[inline]
    pub fn nthreads(&self) -> usize {
        self.nthreads
    }

    /// Runs `f(worker_id)` once on every worker and returns when all are done.
    /// A single-worker pool runs on the calling thread.
    pub fn broadcast<F>(&self, f: F)
    where
        F: Fn(usize) + Sync,
    {
        match &self.pool {
            None => f(0),
            Some(p) => {
                p.broadcast(|ctx| f(ctx.index()));
            }
        }
    }
}

impl std::fmt::Debug for WorkerPool {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WorkerPool")
            .field("nthreads", &self.nthreads)
            .finish()
    }
}

/// Slice handle that several workers may write concurrently, each to a
/// disjoint set of indices. Reads of another worker's indices are valid
/// only after synchronizing with that worker (completion flag or join).
#[derive(Clone, Copy)]
pub(crate) struct SharedMut<'a, T> {
    ptr: *mut T,
    len: usize,
    _marker: PhantomData<&'a mut [T]>,
}

unsafe impl<T: Send> Send for SharedMut<'_, T> {}
unsafe impl<T: Send> Sync for SharedMut<'_, T> {}

impl<'a, T: Copy> SharedMut<'a, T> {
    pub(crate) fn new(s: &'a mut [T]) -> Self {
        Self {
            ptr: s.as_mut_ptr(),
            len: s.len(),
            _marker: PhantomData,
        }
    }

    /// # Safety
    /// No concurrent write to `i`.
    #[inline(always)]
    pub(crate) unsafe fn get(&self, i: usize) -> T {
        debug_assert!(i < self.len);
        *self.ptr.add(i)
    }

    /// # Safety
    /// Caller is the only accessor of `i` until the next synchronization.
    #[inline(always)]
    pub(crate) unsafe fn set(&self, i: usize, v: T) {
        debug_assert!(i < self.len);
        *self.ptr.add(i) = v;
    }
}

/// One single-writer completion flag per row.
pub(crate) struct DoneFlags {
    flags: Vec<AtomicBool>,
}

impl DoneFlags {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            flags: (0..n).map(|_| AtomicBool::new(false)).collect(),
        }
    }

    #[inline]
    pub(crate) fn publish(&self, i: usize) {
        self.flags[i].store(true, Ordering::Release);
    }

    /// Spins until `i` is published, yielding after a short burst so that
    /// oversubscribed pools still make progress.
    #[inline]
    pub(crate) fn wait(&self, i: usize) {
        let mut spins = 0u32;
        while !self.flags[i].load(Ordering::Acquire) {
            if spins < 128 {
                std::hint::spin_loop();
                spins += 1;
            } else {
                std::thread::yield_now();
            }
        }
    }
}

/// Records the smallest failing row across workers.
pub(crate) struct FirstError {
    row: AtomicUsize,
}

impl FirstError {
    pub(crate) fn new() -> Self {
        Self {
            row: AtomicUsize::new(usize::MAX),
        }
    }

    pub(crate) fn record(&self, row: usize) {
        self.row.fetch_min(row, Ordering::Relaxed);
    }

    pub(crate) fn get(&self) -> Option<usize> {
        match self.row.load(Ordering::Relaxed) {
            usize::MAX => None,
            r => Some(r),
        }
    }
}

/// Static DAG of tasks; `run` executes every task exactly once after all of
/// its predecessors, on all pool workers.
#[derive(Debug, Clone, Default)]
pub(crate) struct TaskGraph {
    npred: Vec<usize>,
    succ: Vec<Vec<usize>>,
}

impl TaskGraph {
    pub(crate) fn add_task(&mut self) -> usize {
        self.npred.push(0);
        self.succ.push(Vec::new());
        self.npred.len() - 1
    }

    /// `after` runs only once `before` completed.
    pub(crate) fn add_dep(&mut self, before: usize, after: usize) {
        self.succ[before].push(after);
        self.npred[after] += 1;
    }

    pub(crate) fn len(&self) -> usize {
        self.npred.len()
    }

    pub(crate) fn run<F>(&self, pool: &WorkerPool, f: F)
    where
        F: Fn(usize) + Sync,
    {
        let total = self.len();
        if total == 0 {
            return;
        }
        if pool.nthreads() == 1 {
            // Kahn order on the caller thread
            let mut remaining = self.npred.clone();
            let mut ready: VecDeque<usize> = (0..total).filter(|&t| remaining[t] == 0).collect();
            while let Some(t) = ready.pop_front() {
                f(t);
                for &s in &self.succ[t] {
                    remaining[s] -= 1;
                    if remaining[s] == 0 {
                        ready.push_back(s);
                    }
                }
            }
            return;
        }
        let remaining: Vec<AtomicUsize> = self.npred.iter().map(|&c| AtomicUsize::new(c)).collect();
        let queue = Mutex::new(
            (0..total)
                .filter(|&t| self.npred[t] == 0)
                .collect::<VecDeque<_>>(),
        );
        let cv = Condvar::new();
        let done = AtomicUsize::new(0);
        pool.broadcast(|_| loop {
            let next = {
                let mut q = queue.lock().unwrap();
                loop {
                    if let Some(t) = q.pop_front() {
                        break Some(t);
                    }
                    if done.load(Ordering::Acquire) == total {
                        break None;
                    }
                    q = cv.wait_timeout(q, Duration::from_millis(1)).unwrap().0;
                }
            };
            let Some(t) = next else { return };
            f(t);
            let mut newly = Vec::new();
            for &s in &self.succ[t] {
                if remaining[s].fetch_sub(1, Ordering::AcqRel) == 1 {
                    newly.push(s);
                }
            }
            let finished = done.fetch_add(1, Ordering::AcqRel) + 1;
            if !newly.is_empty() || finished == total {
                let mut q = queue.lock().unwrap();
                q.extend(newly);
                drop(q);
                cv.notify_all();
            }
        });
    }
}

/// Splits `items` into `parts` contiguous chunks of roughly equal total
/// weight. Returns `parts + 1` boundaries.
pub(crate) fn balanced_chunks(weights: &[usize], parts: usize) -> Vec<usize> {
    let total: usize = weights.iter().sum();
    let mut bounds = Vec::with_capacity(parts + 1);
    bounds.push(0);
    let mut acc = 0usize;
    let mut k = 0;
    for part in 1..parts {
        let target = (total as u128 * part as u128 / parts as u128) as usize;
        while k < weights.len() && acc + weights[k] / 2 < target {
            acc += weights[k];
            k += 1;
        }
        bounds.push(k);
    }
    bounds.push(weights.len());
    bounds
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Mutex;

    #[test]
    fn broadcast_reaches_every_worker() {
        let pool = WorkerPool::new(4).unwrap();
        let seen = Mutex::new(Vec::new());
        pool.broadcast(|w| seen.lock().unwrap().push(w));
        let mut s = seen.into_inner().unwrap();
        s.sort();
        assert_eq!(s, vec![0, 1, 2, 3]);
        assert!(WorkerPool::new(0).is_err());
    }

    #[test]
    fn task_graph_respects_dependencies() {
        let mut g = TaskGraph::default();
        let ids: Vec<_> = (0..50).map(|_| g.add_task()).collect();
        for i in 1..50 {
            g.add_dep(ids[(i * 7) % i], ids[i]);
        }
        for threads in [1, 3] {
            let pool = WorkerPool::new(threads).unwrap();
            let order = Mutex::new(Vec::new());
            g.run(&pool, |t| order.lock().unwrap().push(t));
            let order = order.into_inner().unwrap();
            assert_eq!(order.len(), 50);
            let pos: Vec<_> = (0..50)
                .map(|t| order.iter().position(|&x| x == t).unwrap())
                .collect();
            for i in 1..50 {
                assert!(pos[(i * 7) % i] < pos[i]);
            }
        }
    }

    #[test]
    fn chunks_cover_everything() {
        let b = balanced_chunks(&[1, 1, 1, 1, 10, 1, 1, 1], 3);
        assert_eq!(b.len(), 4);
        assert_eq!(b[0], 0);
        assert_eq!(*b.last().unwrap(), 8);
        assert!(b.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(balanced_chunks(&[], 4), vec![0, 0, 0, 0, 0]);
    }
}
