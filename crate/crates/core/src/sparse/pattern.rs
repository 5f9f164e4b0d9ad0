use crate::error::{Error, Result};

/// Structure of a square CSR matrix: row offsets and sorted column indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsityPattern {
    n: usize,
    row_start: Vec<usize>,
    col: Vec<usize>,
}

impl SparsityPattern {
    /// Builds a pattern after checking the CSR invariants.
    pub fn new(n: usize, row_start: Vec<usize>, col: Vec<usize>) -> Result<Self> {
        let p = Self { n, row_start, col };
        p.validate()?;
        Ok(p)
    }

    /// Caller guarantees the CSR invariants.
    pub(crate) fn from_parts_unchecked(n: usize, row_start: Vec<usize>, col: Vec<usize>) -> Self {
        debug_assert!(Self {
            n,
            row_start: row_start.clone(),
            col: col.clone()
        }
        .validate()
        .is_ok());
        Self { n, row_start, col }
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            row_start: vec![0; n + 1],
            col: Vec::new(),
        }
    }

    pub fn diagonal(n: usize) -> Self {
        Self {
            n,
            row_start: (0..=n).collect(),
            col: (0..n).collect(),
        }
    }

    /// Builds a pattern from arbitrary (row, col) positions; duplicates collapse.
    pub fn from_positions(
        n: usize,
        positions: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, j) in positions {
            if i >= n || j >= n {
                return Err(Error::InvalidStructure(format!(
                    "position ({i}, {j}) outside {n}x{n}"
                )));
            }
            rows[i].push(j);
        }
        let mut row_start = Vec::with_capacity(n + 1);
        let mut col = Vec::new();
        row_start.push(0);
        for mut r in rows {
            r.sort_unstable();
            r.dedup();
            col.extend_from_slice(&r);
            row_start.push(col.len());
        }
        Ok(Self { n, row_start, col })
    }

    /// Checks every structural invariant of the CSR layout.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if self.row_start.len() != n + 1 {
            return Err(Error::InvalidStructure(format!(
                "row_start has length {}, expected {}",
                self.row_start.len(),
                n + 1
            )));
        }
        if self.row_start[0] != 0 {
            return Err(Error::InvalidStructure("row_start[0] != 0".into()));
        }
        if self.row_start[n] != self.col.len() {
            return Err(Error::InvalidStructure(format!(
                "row_start[n] = {} but {} column indices stored",
                self.row_start[n],
                self.col.len()
            )));
        }
        for i in 0..n {
            if self.row_start[i] > self.row_start[i + 1] {
                return Err(Error::InvalidStructure(format!(
                    "row_start decreases at row {i}"
                )));
            }
            let cols = self.row(i);
            for (k, &c) in cols.iter().enumerate() {
                if c >= n {
                    return Err(Error::InvalidStructure(format!(
                        "row {i}: column {c} out of range"
                    )));
                }
                if k > 0 && cols[k - 1] >= c {
                    return Err(Error::InvalidStructure(format!(
                        "row {i}: columns not strictly increasing"
                    )));
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.col.len()
    }

    #[inline]
    pub fn row_start(&self) -> &[usize] {
        &self.row_start
    }

    #[inline]
    pub fn col(&self) -> &[usize] {
        &self.col
    }

    #[inline]
    pub fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        self.row_start[i]..self.row_start[i + 1]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[usize] {
        &self.col[self.row_range(i)]
    }

    #[inline]
    pub fn row_nnz(&self, i: usize) -> usize {
        self.row_start[i + 1] - self.row_start[i]
    }

    /// Storage offset of `(i, j)`, if present.
    pub fn find(&self, i: usize, j: usize) -> Option<usize> {
        let start = self.row_start[i];
        self.row(i).binary_search(&j).ok().map(|k| start + k)
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.find(i, j).is_some()
    }

    /// Pattern of the transpose. Row `i` of the result lists column `i` of
    /// `self` in ascending row order.
    pub fn transpose(&self) -> Self {
        let (row_start, col, _) = transpose_parts(self, None::<&[f64]>);
        Self {
            n: self.n,
            row_start,
            col,
        }
    }

    /// Union of the positions of `A` and `A^T`.
    pub fn symmetrize(&self) -> Self {
        let t = self.transpose();
        let mut row_start = Vec::with_capacity(self.n + 1);
        let mut col = Vec::with_capacity(self.nnz() * 2);
        row_start.push(0);
        for i in 0..self.n {
            let (a, b) = (self.row(i), t.row(i));
            let (mut p, mut q) = (0, 0);
            while p < a.len() || q < b.len() {
                let next = match (a.get(p), b.get(q)) {
                    (Some(&x), Some(&y)) if x == y => {
                        p += 1;
                        q += 1;
                        x
                    }
                    (Some(&x), Some(&y)) if x < y => {
                        p += 1;
                        x
                    }
                    (Some(_), Some(&y)) => {
                        q += 1;
                        y
                    }
                    (Some(&x), None) => {
                        p += 1;
                        x
                    }
                    (None, Some(&y)) => {
                        q += 1;
                        y
                    }
                    (None, None) => unreachable!(),
                };
                col.push(next);
            }
            row_start.push(col.len());
        }
        Self {
            n: self.n,
            row_start,
            col,
        }
    }

    /// Strictly lower triangular part (`col < row`).
    pub fn lower(&self) -> Self {
        self.filter(|i, j| j < i)
    }

    /// Strictly upper triangular part (`col > row`).
    pub fn upper(&self) -> Self {
        self.filter(|i, j| j > i)
    }

    fn filter(&self, keep: impl Fn(usize, usize) -> bool) -> Self {
        let mut row_start = Vec::with_capacity(self.n + 1);
        let mut col = Vec::new();
        row_start.push(0);
        for i in 0..self.n {
            col.extend(self.row(i).iter().copied().filter(|&j| keep(i, j)));
            row_start.push(col.len());
        }
        Self {
            n: self.n,
            row_start,
            col,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.transpose() == *self
    }

    /// Maximum `|i - j|` over stored positions.
    pub fn bandwidth(&self) -> usize {
        (0..self.n)
            .flat_map(|i| self.row(i).iter().map(move |&j| i.abs_diff(j)))
            .max()
            .unwrap_or(0)
    }

    /// Rows without a stored diagonal position.
    pub fn first_missing_diagonal(&self) -> Option<usize> {
        (0..self.n).find(|&i| !self.contains(i, i))
    }
}

/// Counting-sort transpose shared by the pattern and matrix variants.
pub(crate) fn transpose_parts<T: AsRef<[f64]>>(
    p: &SparsityPattern,
    val: Option<T>,
) -> (Vec<usize>, Vec<usize>, Option<Vec<f64>>) {
    let n = p.n;
    let nnz = p.nnz();
    let mut count = vec![0usize; n + 1];
    for &c in &p.col {
        count[c + 1] += 1;
    }
    for i in 0..n {
        count[i + 1] += count[i];
    }
    let row_start = count.clone();
    let mut next = count;
    let mut col = vec![0usize; nnz];
    let src = val.as_ref().map(|v| v.as_ref());
    let mut out = src.map(|_| vec![0.0f64; nnz]);
    for i in 0..n {
        for k in p.row_range(i) {
            let c = p.col[k];
            let dst = next[c];
            next[c] += 1;
            col[dst] = i;
            if let (Some(o), Some(s)) = (out.as_mut(), src) {
                o[dst] = s[k];
            }
        }
    }
    (row_start, col, out)
}
