use super::pattern::{transpose_parts, SparsityPattern};
use crate::error::{Error, Result};

/// Square sparse matrix in compressed sparse row form.
///
/// Explicit zeros are kept as stored entries; the stored pattern is what the
/// symbolic phase works on.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pattern: SparsityPattern,
    val: Vec<f64>,
}

impl CsrMatrix {
    pub fn new(n: usize, row_start: Vec<usize>, col: Vec<usize>, val: Vec<f64>) -> Result<Self> {
        let pattern = SparsityPattern::new(n, row_start, col)?;
        Self::from_pattern(pattern, val)
    }

    pub fn from_pattern(pattern: SparsityPattern, val: Vec<f64>) -> Result<Self> {
        if val.len() != pattern.nnz() {
            return Err(Error::DimensionMismatch {
                expected: pattern.nnz(),
                got: val.len(),
            });
        }
        Ok(Self { pattern, val })
    }

    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(Error::InvalidStructure(format!(
                    "entry ({i}, {j}) outside {n}x{n}"
                )));
            }
            rows[i].push((j, v));
        }
        let mut row_start = Vec::with_capacity(n + 1);
        let mut col = Vec::with_capacity(triplets.len());
        let mut val = Vec::with_capacity(triplets.len());
        row_start.push(0);
        for mut r in rows {
            // stable: duplicates are summed in input order
            r.sort_by_key(|&(j, _)| j);
            for (j, v) in r {
                if col.len() > *row_start.last().unwrap() && *col.last().unwrap() == j {
                    *val.last_mut().unwrap() += v;
                } else {
                    col.push(j);
                    val.push(v);
                }
            }
            row_start.push(col.len());
        }
        Ok(Self {
            pattern: SparsityPattern::from_parts_unchecked(n, row_start, col),
            val,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            pattern: SparsityPattern::diagonal(n),
            val: vec![1.0; n],
        }
    }

    pub fn from_dense(a: &[Vec<f64>]) -> Self {
        let n = a.len();
        let t: Vec<_> = (0..n)
            .flat_map(|i| {
                (0..n)
                    .filter(move |&j| a[i][j] != 0.0)
                    .map(move |j| (i, j, a[i][j]))
            })
            .collect();
        Self::from_triplets(n, &t).expect("dense input is square")
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        let mut d = vec![vec![0.0; n]; n];
        for i in 0..n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                d[i][j] = v;
            }
        }
        d
    }

    pub fn validate(&self) -> Result<()> {
        self.pattern.validate()?;
        if self.val.len() != self.pattern.nnz() {
            return Err(Error::InvalidStructure(
                "value array length differs from nnz".into(),
            ));
        }
        Ok(())
    }

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
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.val
    }

    pub fn into_parts(self) -> (SparsityPattern, Vec<f64>) {
        (self.pattern, self.val)
    }

    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.pattern.row_range(i);
        (&self.pattern.col()[r.clone()], &self.val[r])
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.pattern.find(i, j).map(|k| self.val[k])
    }

    pub fn transpose(&self) -> Self {
        let (row_start, col, val) = transpose_parts(&self.pattern, Some(&self.val));
        Self {
            pattern: SparsityPattern::from_parts_unchecked(self.n(), row_start, col),
            val: val.expect("values requested"),
        }
    }

    /// Mean stored entries per row.
    pub fn mean_row_nnz(&self) -> f64 {
        if self.n() == 0 {
            0.0
        } else {
            self.nnz() as f64 / self.n() as f64
        }
    }

    /// `y = A x`, accumulating each row in ascending column order.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.n()];
        self.spmv_into(x, &mut y)?;
        Ok(y)
    }

    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        let n = self.n();
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.len(),
            });
        }
        if y.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: y.len(),
            });
        }
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (&j, &v) in cols.iter().zip(vals) {
                acc += v * x[j];
            }
            *yi = acc;
        }
        Ok(())
    }

    /// Row sums `A * ones`.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.row(i).1.iter().sum()).collect()
    }

    pub fn is_structurally_symmetric(&self) -> bool {
        self.pattern.is_symmetric()
    }

    /// Numerically symmetric with identical pattern.
    pub fn is_symmetric(&self) -> bool {
        let t = self.transpose();
        t.pattern == self.pattern && t.val == self.val
    }
}
