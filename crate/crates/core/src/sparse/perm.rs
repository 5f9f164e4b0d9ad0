use std::io::{BufRead, Write};

use super::{CsrMatrix, SparsityPattern};
use crate::error::{Error, Result};

/// A bijection on `[0, n)`. `perm[new] = old`, `inv[old] = new`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    perm: Vec<usize>,
    inv: Vec<usize>,
}

impl Permutation {
    /// Builds a permutation from its new-to-old map.
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut inv = vec![usize::MAX; n];
        for (new, &old) in perm.iter().enumerate() {
            if old >= n {
                return Err(Error::InvalidPermutation(format!(
                    "index {old} out of range for n={n}"
                )));
            }
            if inv[old] != usize::MAX {
                return Err(Error::InvalidPermutation(format!("index {old} repeated")));
            }
            inv[old] = new;
        }
        Ok(Self { perm, inv })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
            inv: (0..n).collect(),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.perm.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// New-to-old map.
    #[inline]
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Old-to-new map.
    #[inline]
    pub fn inv(&self) -> &[usize] {
        &self.inv
    }

    pub fn inverse(&self) -> Self {
        Self {
            perm: self.inv.clone(),
            inv: self.perm.clone(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Applies `self` after `first`: the result maps new index `k` to
    /// `first.perm[self.perm[k]]`.
    pub fn then(&self, first: &Permutation) -> Result<Self> {
        if first.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: first.len(),
                got: self.len(),
            });
        }
        Self::new(self.perm.iter().map(|&k| first.perm[k]).collect())
    }

    /// `out[new] = x[perm[new]]`.
    pub fn apply<T: Copy>(&self, x: &[T]) -> Vec<T> {
        self.perm.iter().map(|&o| x[o]).collect()
    }

    /// `out[perm[new]] = x[new]`.
    pub fn apply_inverse<T: Copy + Default>(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); x.len()];
        for (new, &old) in self.perm.iter().enumerate() {
            out[old] = x[new];
        }
        out
    }

    /// Reads a permutation file: one 0-based index per line, line `k` holding `perm[k]`.
    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut perm = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('%') || t.starts_with('#') {
                continue;
            }
            let v = t.parse::<usize>().map_err(|e| Error::Parse {
                line: lineno + 1,
                msg: e.to_string(),
            })?;
            perm.push(v);
        }
        Self::new(perm)
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        for p in &self.perm {
            writeln!(w, "{p}")?;
        }
        Ok(())
    }
}

fn check_len(n: usize, p: &Permutation) -> Result<()> {
    if p.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: p.len(),
        });
    }
    Ok(())
}

impl SparsityPattern {
    /// Symmetric permutation `P S P^T` of the positions.
    pub fn permute_symmetric(&self, p: &Permutation) -> Result<SparsityPattern> {
        check_len(self.n(), p)?;
        let mut row_start = Vec::with_capacity(self.n() + 1);
        let mut col = Vec::with_capacity(self.nnz());
        row_start.push(0);
        for &old in p.perm() {
            let start = col.len();
            col.extend(self.row(old).iter().map(|&j| p.inv()[j]));
            col[start..].sort_unstable();
            row_start.push(col.len());
        }
        Ok(SparsityPattern::from_parts_unchecked(
            self.n(),
            row_start,
            col,
        ))
    }
}

impl CsrMatrix {
    /// `B = P A P^T`, i.e. `B[inv[i], inv[j]] = A[i, j]`. Values are only moved.
    pub fn permute_symmetric(&self, p: &Permutation) -> Result<CsrMatrix> {
        check_len(self.n(), p)?;
        let mut row_start = Vec::with_capacity(self.n() + 1);
        let mut col = Vec::with_capacity(self.nnz());
        let mut val = Vec::with_capacity(self.nnz());
        let mut scratch: Vec<(usize, f64)> = Vec::new();
        row_start.push(0);
        for &old in p.perm() {
            let (cols, vals) = self.row(old);
            scratch.clear();
            scratch.extend(cols.iter().zip(vals).map(|(&j, &v)| (p.inv()[j], v)));
            scratch.sort_unstable_by_key(|&(j, _)| j);
            for &(j, v) in &scratch {
                col.push(j);
                val.push(v);
            }
            row_start.push(col.len());
        }
        CsrMatrix::from_pattern(
            SparsityPattern::from_parts_unchecked(self.n(), row_start, col),
            val,
        )
    }
}
