use crate::error::{Error, Result};
use crate::pool::{balanced_chunks, FirstError, SharedMut, WorkerPool};
use crate::sparse::{CsrMatrix, Permutation, SparsityPattern};

/// Combined incomplete factors on a fixed symbolic pattern.
///
/// Each row stores its strict-lower (L, unit diagonal implicit) entries,
/// then the diagonal, then the strict-upper (U) entries. Rows are in the
/// level ordering given by `perm` (`perm[new] = old`).
#[derive(Debug, Clone, PartialEq)]
pub struct IluFactors {
    pattern: SparsityPattern,
    val: Vec<f64>,
    diag_pos: Vec<usize>,
    perm: Permutation,
    row_norm: Vec<f64>,
    dropped: Vec<bool>,
    drop_tol: f64,
    milu: bool,
}

impl IluFactors {
    #[inline]
    pub fn n(&self) -> usize {
        self.pattern.n()
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.pattern.nnz()
    }

    #[inline]
    pub fn pattern(&self) -> &SparsityPattern {
        &self.pattern
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.val
    }

    #[inline]
    pub fn diag_pos(&self) -> &[usize] {
        &self.diag_pos
    }

    #[inline]
    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    #[inline]
    pub fn drop_tol(&self) -> f64 {
        self.drop_tol
    }

    #[inline]
    pub fn milu(&self) -> bool {
        self.milu
    }

    /// Infinity norm of each row of the assembled (unfactored) matrix.
    #[inline]
    pub fn row_norm(&self) -> &[f64] {
        &self.row_norm
    }

    /// Positions whose L value was dropped by the numeric threshold.
    pub fn dropped(&self) -> &[bool] {
        &self.dropped
    }

    pub fn num_dropped(&self) -> usize {
        self.dropped.iter().filter(|&&d| d).count()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.diag_pos.iter().map(|&p| self.val[p]).collect()
    }

    /// Strict-lower range of row `i`.
    #[inline]
    pub fn lower_range(&self, i: usize) -> std::ops::Range<usize> {
        self.pattern.row_start()[i]..self.diag_pos[i]
    }

    /// Strict-upper range of row `i`.
    #[inline]
    pub fn upper_range(&self, i: usize) -> std::ops::Range<usize> {
        self.diag_pos[i] + 1..self.pattern.row_start()[i + 1]
    }

    /// Dense `L` (with unit diagonal) in the factor ordering.
    pub fn l_dense(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        let mut l = vec![vec![0.0; n]; n];
        for i in 0..n {
            l[i][i] = 1.0;
            for p in self.lower_range(i) {
                l[i][self.pattern.col()[p]] = self.val[p];
            }
        }
        l
    }

    /// Dense `U` in the factor ordering.
    pub fn u_dense(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        let mut u = vec![vec![0.0; n]; n];
        for i in 0..n {
            for p in self.diag_pos[i]..self.pattern.row_start()[i + 1] {
                u[i][self.pattern.col()[p]] = self.val[p];
            }
        }
        u
    }

    #[cfg(test)]
    pub(crate) fn values_mut_for_test(&mut self) -> &mut [f64] {
        &mut self.val
    }

    /// Raw parts for the numeric kernels.
    pub(crate) fn kernel_parts(&mut self) -> KernelParts<'_> {
        KernelParts {
            col: self.pattern.col(),
            row_start: self.pattern.row_start(),
            diag_pos: &self.diag_pos,
            row_norm: &self.row_norm,
            drop_tol: self.drop_tol,
            milu: self.milu,
            val: SharedMut::new(&mut self.val),
            dropped: SharedMut::new(&mut self.dropped),
        }
    }

    /// Values in the factor ordering, with the strict-lower part read as L
    /// and the rest as U.
    pub fn as_csr(&self) -> CsrMatrix {
        CsrMatrix::from_pattern(self.pattern.clone(), self.val.clone()).expect("lengths agree")
    }
}

pub(crate) struct KernelParts<'a> {
    pub col: &'a [usize],
    pub row_start: &'a [usize],
    pub diag_pos: &'a [usize],
    pub row_norm: &'a [f64],
    pub drop_tol: f64,
    pub milu: bool,
    pub val: SharedMut<'a, f64>,
    pub dropped: SharedMut<'a, bool>,
}

/// Copies `P A P^T` into the factor storage for `pattern` (already in the
/// new ordering). Fill positions start at zero. Rows are split across the
/// pool in nnz-balanced contiguous chunks.
pub fn assemble_factors(
    a: &CsrMatrix,
    pattern: &SparsityPattern,
    perm: &Permutation,
    drop_tol: f64,
    milu: bool,
    pool: &WorkerPool,
) -> Result<IluFactors> {
    let n = a.n();
    if pattern.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: pattern.n(),
        });
    }
    if perm.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: perm.len(),
        });
    }
    if !(drop_tol >= 0.0 && drop_tol.is_finite()) {
        return Err(Error::Config(format!(
            "drop tolerance must be finite and >= 0, got {drop_tol}"
        )));
    }
    let mut diag_pos = vec![0usize; n];
    for (i, d) in diag_pos.iter_mut().enumerate() {
        *d = pattern.find(i, i).ok_or(Error::MissingDiagonal(i))?;
    }

    let nnz = pattern.nnz();
    let mut val = vec![0.0f64; nnz];
    let mut row_norm = vec![0.0f64; n];
    let weights: Vec<usize> = (0..n).map(|i| pattern.row_nnz(i)).collect();
    let bounds = balanced_chunks(&weights, pool.nthreads());
    let bad_row = FirstError::new();
    {
        let val_s = SharedMut::new(&mut val);
        let norm_s = SharedMut::new(&mut row_norm);
        pool.broadcast(|w| {
            let mut scratch: Vec<(usize, f64)> = Vec::new();
            for i in bounds[w]..bounds[w + 1] {
                let (cols, vals) = a.row(perm.perm()[i]);
                scratch.clear();
                scratch.extend(cols.iter().zip(vals).map(|(&j, &v)| (perm.inv()[j], v)));
                scratch.sort_unstable_by_key(|&(j, _)| j);
                let range = pattern.row_range(i);
                let pcols = pattern.row(i);
                let mut q = 0;
                let mut norm = 0.0f64;
                for &(j, v) in &scratch {
                    while q < pcols.len() && pcols[q] < j {
                        q += 1;
                    }
                    if q == pcols.len() || pcols[q] != j {
                        bad_row.record(i);
                        break;
                    }
                    // SAFETY: row i belongs to this worker's chunk.
                    unsafe { val_s.set(range.start + q, v) };
                    norm = norm.max(v.abs());
                }
                unsafe { norm_s.set(i, norm) };
            }
        });
    }
    if let Some(i) = bad_row.get() {
        return Err(Error::InvalidStructure(format!(
            "pattern row {i} does not contain every entry of the permuted matrix"
        )));
    }
    Ok(IluFactors {
        pattern: pattern.clone(),
        val,
        diag_pos,
        perm: perm.clone(),
        row_norm,
        dropped: vec![false; nnz],
        drop_tol,
        milu,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::iluk_pattern;

    fn two() -> CsrMatrix {
        CsrMatrix::from_dense(&[vec![4.0, 2.0], vec![1.0, 3.0]])
    }

    #[test]
    fn identity_perm_copies_values() {
        let a = two();
        let f = assemble_factors(
            &a,
            a.pattern(),
            &Permutation::identity(2),
            0.0,
            false,
            &WorkerPool::serial(),
        )
        .unwrap();
        assert_eq!(f.values(), a.values());
        assert_eq!(f.diag_pos(), &[0, 3]);
        assert_eq!(f.row_norm(), &[4.0, 3.0]);
    }

    #[test]
    fn swap_perm_moves_values() {
        let a = two();
        let p = Permutation::new(vec![1, 0]).unwrap();
        let b = a.permute_symmetric(&p).unwrap();
        let f = assemble_factors(&a, b.pattern(), &p, 0.0, false, &WorkerPool::serial()).unwrap();
        assert_eq!(f.values(), b.values());
    }

    #[test]
    fn fill_positions_start_at_zero() {
        let a = crate::gen::poisson2d(5);
        let (pat, lv) = iluk_pattern(a.pattern(), 1).unwrap();
        for threads in [1, 3] {
            let f = assemble_factors(
                &a,
                &pat,
                &Permutation::identity(a.n()),
                0.0,
                false,
                &WorkerPool::new(threads).unwrap(),
            )
            .unwrap();
            for i in 0..a.n() {
                for q in pat.row_range(i) {
                    let j = pat.col()[q];
                    match a.get(i, j) {
                        Some(v) => {
                            assert_eq!(lv.levels[q], 0);
                            assert_eq!(f.values()[q], v);
                        }
                        None => {
                            assert!(lv.levels[q] > 0);
                            assert_eq!(f.values()[q], 0.0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn errors() {
        let a = two();
        let no_diag = SparsityPattern::from_positions(2, [(0, 0), (0, 1), (1, 0)]).unwrap();
        assert_eq!(
            assemble_factors(
                &a,
                &no_diag,
                &Permutation::identity(2),
                0.0,
                false,
                &WorkerPool::serial()
            )
            .unwrap_err(),
            Error::MissingDiagonal(1)
        );
        let diag = SparsityPattern::diagonal(2);
        assert!(matches!(
            assemble_factors(
                &a,
                &diag,
                &Permutation::identity(2),
                0.0,
                false,
                &WorkerPool::serial()
            ),
            Err(Error::InvalidStructure(_))
        ));
        assert!(matches!(
            assemble_factors(
                &a,
                a.pattern(),
                &Permutation::identity(3),
                0.0,
                false,
                &WorkerPool::serial()
            ),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
