//! Per-entry elimination primitives. Every factorization path goes through
//! these so the floating-point operation sequence on each stored value is
//! the same regardless of how rows and tiles are scheduled.

use std::ops::Range;

use crate::symbolic::KernelParts;

impl KernelParts<'_> {
    #[inline(always)]
    pub(crate) fn row_end(&self, r: usize) -> usize {
        self.row_start[r + 1]
    }

    /// First position of row `r` whose column is `>= col`.
    #[inline]
    pub(crate) fn first_at_or_after(&self, r: usize, col: usize) -> usize {
        let s = self.row_start[r];
        s + self.col[s..self.row_start[r + 1]].partition_point(|&c| c < col)
    }

    /// Divides the L entry at `p` of row `r` by its pivot. A dropped entry
    /// keeps its undivided value and gets flagged; `None` is returned.
    ///
    /// # Safety
    /// `p` is written by the caller only; the pivot row is complete.
    #[inline(always)]
    pub(crate) unsafe fn divide(&self, r: usize, p: usize) -> Option<f64> {
        let c = self.col[p];
        let l = self.val.get(p) / self.val.get(self.diag_pos[c]);
        if self.drop_tol > 0.0 && l.abs() < self.drop_tol * self.row_norm[r] {
            self.dropped.set(p, true);
            None
        } else {
            self.val.set(p, l);
            Some(l)
        }
    }

    /// Lumps a dropped entry's value onto the diagonal of `r` (modified ILU).
    ///
    /// # Safety
    /// Caller owns the diagonal of `r`.
    #[inline(always)]
    pub(crate) unsafe fn lump_dropped(&self, r: usize, p: usize) {
        if self.milu {
            let d = self.diag_pos[r];
            self.val.set(d, self.val.get(d) + self.val.get(p));
        }
    }

    /// `a[r, j] -= l * u[c, j]` for each `j` in `U(c, :)`. Targets are looked
    /// up among positions `search` of row `r`; only those inside `write` are
    /// modified. A column missing from `search` is fill and, when `fill_to`
    /// is set, its update is applied to that position instead.
    ///
    /// # Safety
    /// Row `c` is complete; caller owns `write` and `fill_to`.
    #[inline(always)]
    pub(crate) unsafe fn update(
        &self,
        c: usize,
        l: f64,
        search: Range<usize>,
        write: Range<usize>,
        fill_to: Option<usize>,
    ) {
        let mut t = search.start;
        for q in self.diag_pos[c] + 1..self.row_end(c) {
            let j = self.col[q];
            while t < search.end && self.col[t] < j {
                t += 1;
            }
            if t < search.end && self.col[t] == j {
                if write.contains(&t) {
                    self.val.set(t, self.val.get(t) - l * self.val.get(q));
                }
            } else if let Some(d) = fill_to {
                self.val.set(d, self.val.get(d) - l * self.val.get(q));
            }
        }
    }

    /// Eliminates the L positions `lo..hi` of row `r` in order, updating the
    /// rest of the row in place.
    ///
    /// # Safety
    /// Caller owns row `r`; all pivot rows referenced are complete.
    #[inline]
    pub(crate) unsafe fn eliminate(&self, r: usize, lo: usize, hi: usize) {
        let end = self.row_end(r);
        let fill_to = if self.milu {
            Some(self.diag_pos[r])
        } else {
            None
        };
        for p in lo..hi {
            match self.divide(r, p) {
                Some(l) => self.update(self.col[p], l, p + 1..end, p + 1..end, fill_to),
                None => {
                    self.lump_dropped(r, p);
                    self.val.set(p, 0.0);
                }
            }
        }
    }

    /// # Safety
    /// Row `r` is complete.
    #[inline(always)]
    pub(crate) unsafe fn pivot_is_zero(&self, r: usize) -> bool {
        self.val.get(self.diag_pos[r]) == 0.0
    }
}
