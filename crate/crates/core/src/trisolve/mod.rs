//! Triangular solves with the combined factors: `L y = b` (unit diagonal)
//! and `U x = y`.
//!
//! Every path accumulates a row in ascending column order starting from the
//! right-hand side entry, so all paths agree bitwise with [`solve_serial`].

mod lower;
mod parallel;

pub use lower::{build_ls_lower_plan, solve_ls_lower, LowerSolve, LsLowerPlan};
pub use parallel::{
    build_csrls_plan, build_ls_plan, solve_baseline_csrls, solve_ls, CsrLsPlan, LsPlan,
};

pub use crate::factor::Sweep;

use crate::error::{Error, Result};
use crate::pool::{SharedMut, WorkerPool};
use crate::symbolic::IluFactors;

/// `x[r] -= sum of val[p] * x[col[p]]` over `ps`, ascending.
///
/// # Safety
/// Caller owns `x[r]`; every referenced `x[col[p]]` is final.
#[inline(always)]
pub(crate) unsafe fn gather(
    f: &IluFactors,
    x: &SharedMut<'_, f64>,
    r: usize,
    ps: std::ops::Range<usize>,
) {
    let col = f.pattern().col();
    let val = f.values();
    let mut acc = x.get(r);
    for p in ps {
        acc -= val[p] * x.get(col[p]);
    }
    x.set(r, acc);
}

/// One row of the forward or backward sweep.
///
/// # Safety
/// As for [`gather`].
#[inline(always)]
pub(crate) unsafe fn solve_row(f: &IluFactors, x: &SharedMut<'_, f64>, r: usize, which: Sweep) {
    match which {
        Sweep::Forward => gather(f, x, r, f.lower_range(r)),
        Sweep::Backward => {
            gather(f, x, r, f.upper_range(r));
            x.set(r, x.get(r) / f.values()[f.diag_pos()[r]]);
        }
    }
}

pub(crate) fn check_rhs(f: &IluFactors, b: &[f64], which: Sweep) -> Result<()> {
    if b.len() != f.n() {
        return Err(Error::DimensionMismatch {
            expected: f.n(),
            got: b.len(),
        });
    }
    if which == Sweep::Backward {
        if let Some(r) = f.diag_pos().iter().position(|&d| f.values()[d] == 0.0) {
            return Err(Error::ZeroPivot(r));
        }
    }
    Ok(())
}

/// Reference sweep: forward in ascending rows, backward in descending rows.
pub fn solve_serial(f: &IluFactors, b: &[f64], which: Sweep) -> Result<Vec<f64>> {
    check_rhs(f, b, which)?;
    let mut x = b.to_vec();
    let xs = SharedMut::new(&mut x);
    let n = f.n();
    // SAFETY: single thread in dependency order.
    unsafe {
        match which {
            Sweep::Forward => (0..n).for_each(|r| solve_row(f, &xs, r, which)),
            Sweep::Backward => (0..n).rev().for_each(|r| solve_row(f, &xs, r, which)),
        }
    }
    Ok(x)
}

/// How the preconditioner's two sweeps are executed.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum SolvePath {
    Serial,
    CsrLs(CsrLsPlan),
    Ls(LsPlan),
    LsLower(LsLowerPlan),
}

impl SolvePath {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Serial => "serial",
            Self::CsrLs(_) => "csr-ls",
            Self::Ls(_) => "ls",
            Self::LsLower(_) => "ls-lower",
        }
    }

    /// One sweep in the factor ordering.
    pub fn solve(
        &self,
        pool: &WorkerPool,
        f: &IluFactors,
        b: &[f64],
        which: Sweep,
    ) -> Result<Vec<f64>> {
        match self {
            Self::Serial => solve_serial(f, b, which),
            Self::CsrLs(p) => solve_baseline_csrls(pool, f, p.schedule(which), b, which),
            Self::Ls(p) => solve_ls(pool, f, p.schedule(which), b, which),
            Self::LsLower(p) => solve_ls_lower(pool, f, p, b, which),
        }
    }
}

/// `z = P^T U^{-1} L^{-1} P r` for factors of `P A P^T`; `r` and `z` are in
/// the original ordering.
pub fn apply_preconditioner(
    pool: &WorkerPool,
    f: &IluFactors,
    path: &SolvePath,
    r: &[f64],
) -> Result<Vec<f64>> {
    if r.len() != f.n() {
        return Err(Error::DimensionMismatch {
            expected: f.n(),
            got: r.len(),
        });
    }
    let rp = f.perm().apply(r);
    let y = path.solve(pool, f, &rp, Sweep::Forward)?;
    let z = path.solve(pool, f, &y, Sweep::Backward)?;
    Ok(f.perm().apply_inverse(&z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::factor_serial;
    use crate::sparse::{CsrMatrix, Permutation};
    use crate::symbolic::assemble_factors;

    fn factored(a: &CsrMatrix) -> IluFactors {
        let mut f = assemble_factors(
            a,
            a.pattern(),
            &Permutation::identity(a.n()),
            0.0,
            false,
            &WorkerPool::serial(),
        )
        .unwrap();
        factor_serial(&mut f).unwrap();
        f
    }

    #[test]
    fn identity_factors() {
        let f = factored(&CsrMatrix::identity(3));
        let b = [1.0, -2.0, 3.0];
        assert_eq!(solve_serial(&f, &b, Sweep::Forward).unwrap(), b);
        let z = apply_preconditioner(&WorkerPool::serial(), &f, &SolvePath::Serial, &b).unwrap();
        assert_eq!(z, b);
    }

    #[test]
    fn two_by_two() {
        let f = factored(&CsrMatrix::from_dense(&[vec![4.0, 2.0], vec![1.0, 3.0]]));
        let y = solve_serial(&f, &[6.0, 4.0], Sweep::Forward).unwrap();
        assert_eq!(y, vec![6.0, 2.5]);
        assert_eq!(
            solve_serial(&f, &y, Sweep::Backward).unwrap(),
            vec![1.0, 1.0]
        );
    }

    #[test]
    fn permuted_preconditioner_inverts_tridiagonal() {
        // reversing a tridiagonal matrix keeps it fill-free
        let a = crate::gen::tridiag(6);
        let p = Permutation::new(vec![5, 4, 3, 2, 1, 0]).unwrap();
        let pat = a.permute_symmetric(&p).unwrap();
        let mut f =
            assemble_factors(&a, pat.pattern(), &p, 0.0, false, &WorkerPool::serial()).unwrap();
        factor_serial(&mut f).unwrap();
        let b: Vec<f64> = (0..6).map(|i| i as f64 - 2.0).collect();
        let z = apply_preconditioner(&WorkerPool::serial(), &f, &SolvePath::Serial, &b).unwrap();
        let az = a.spmv(&z).unwrap();
        for i in 0..6 {
            assert!((az[i] - b[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_diagonal_rejected_backward() {
        let mut f = factored(&CsrMatrix::identity(2));
        f.values_mut_for_test()[1] = 0.0;
        assert_eq!(
            solve_serial(&f, &[1.0, 1.0], Sweep::Backward).unwrap_err(),
            Error::ZeroPivot(1)
        );
        assert!(solve_serial(&f, &[1.0, 1.0], Sweep::Forward).is_ok());
        assert!(solve_serial(&f, &[1.0], Sweep::Forward).is_err());
    }
}
