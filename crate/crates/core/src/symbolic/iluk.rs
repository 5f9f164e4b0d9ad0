use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::sparse::SparsityPattern;

/// Level of fill for every stored position of a symbolic pattern, aligned
/// with the pattern's storage order. Original positions have level 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FillLevelTable {
    pub levels: Vec<usize>,
}

/// ILU(0) keeps the input pattern; every row must have its diagonal.
pub fn ilu0_pattern(a: &SparsityPattern) -> Result<SparsityPattern> {
    if let Some(i) = a.first_missing_diagonal() {
        return Err(Error::MissingDiagonal(i));
    }
    Ok(a.clone())
}

/// Level-of-fill symbolic factorization.
///
/// `fill(i, j) = min over m < min(i, j) of fill(i, m) + fill(m, j) + 1`,
/// keeping positions with level at most `k`. Rows are processed top-down;
/// within a row, columns are eliminated in ascending order so fill created
/// to the left of the diagonal is itself eliminated.
pub fn iluk_pattern(a: &SparsityPattern, k: usize) -> Result<(SparsityPattern, FillLevelTable)> {
    if let Some(i) = a.first_missing_diagonal() {
        return Err(Error::MissingDiagonal(i));
    }
    let n = a.n();
    let mut row_start = Vec::with_capacity(n + 1);
    let mut col: Vec<usize> = Vec::with_capacity(a.nnz());
    let mut lev_store: Vec<usize> = Vec::with_capacity(a.nnz());
    let mut diag_pos = vec![0usize; n];
    row_start.push(0);

    let mut lev = vec![usize::MAX; n];
    let mut cols: Vec<usize> = Vec::new();
    let mut todo = BTreeSet::new();
    for i in 0..n {
        cols.clear();
        for &j in a.row(i) {
            lev[j] = 0;
            cols.push(j);
            if j < i {
                todo.insert(j);
            }
        }
        while let Some(m) = todo.pop_first() {
            let lim = lev[m];
            for q in diag_pos[m] + 1..row_start[m + 1] {
                let j = col[q];
                let nl = lim + lev_store[q] + 1;
                if nl > k {
                    continue;
                }
                if lev[j] == usize::MAX {
                    lev[j] = nl;
                    cols.push(j);
                    if j < i {
                        todo.insert(j);
                    }
                } else if nl < lev[j] {
                    lev[j] = nl;
                }
            }
        }
        cols.sort_unstable();
        for &j in &cols {
            if j == i {
                diag_pos[i] = col.len();
            }
            col.push(j);
            lev_store.push(lev[j]);
            lev[j] = usize::MAX;
        }
        row_start.push(col.len());
    }
    Ok((
        SparsityPattern::from_parts_unchecked(n, row_start, col),
        FillLevelTable { levels: lev_store },
    ))
}
