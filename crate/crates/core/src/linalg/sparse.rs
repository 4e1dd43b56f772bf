//! Compressed sparse row storage.

use crate::error::{Error, Result};

/// Accumulates `(row, col, value)` entries before compression.
///
/// Duplicates are summed in insertion order, so identical insertion
/// sequences compress to bit-identical matrices.
#[derive(Debug, Clone)]
pub struct TripletBuilder {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, entries: Vec::new() }
    }

    pub fn with_capacity(nrows: usize, ncols: usize, cap: usize) -> Self {
        Self { nrows, ncols, entries: Vec::with_capacity(cap) }
    }

    #[inline]
    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.nrows && col < self.ncols);
        self.entries.push((row, col, value));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Compress into CSR. Explicit zeros that result from summation are kept,
    /// which preserves structural symmetry of symmetric assemblies.
    pub fn build(mut self) -> CsrMatrix {
        // stable sort keeps insertion order among duplicates
        self.entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; self.nrows + 1];
        let mut col_idx = Vec::with_capacity(self.entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for &(r, c, v) in &self.entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..self.nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix { nrows: self.nrows, ncols: self.ncols, row_ptr, col_idx, values }
    }
}

/// General rectangular CSR matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, row_ptr: vec![0; nrows + 1], col_idx: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: diag.to_vec(),
        }
    }

    /// Build from a dense row-major table, dropping exact zeros.
    pub fn from_dense(nrows: usize, ncols: usize, data: &[f64]) -> Self {
        let mut b = TripletBuilder::new(nrows, ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                let v = data[i * ncols + j];
                if v != 0.0 {
                    b.push(i, j, v);
                }
            }
        }
        b.build()
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[s..e], &self.values[s..e])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(p) => vals[p],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    /// `y = A x`, summing each row left to right.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.ncols {
            return Err(Error::DimensionMismatch { expected: self.ncols, got: x.len() });
        }
        let mut y = vec![0.0; self.nrows];
        self.mul_vec_into(x, &mut y);
        Ok(y)
    }

    /// Unchecked `y = A x`; panics on dimension mismatch.
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            let mut s = 0.0;
            for (c, v) in cols.iter().zip(vals) {
                s += v * x[*c];
            }
            *yi = s;
        }
    }

    /// `y = Aᵀ x`.
    pub fn mul_transpose_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.nrows {
            return Err(Error::DimensionMismatch { expected: self.nrows, got: x.len() });
        }
        let mut y = vec![0.0; self.ncols];
        for (i, xi) in x.iter().enumerate() {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                y[*c] += v * xi;
            }
        }
        Ok(y)
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut b = TripletBuilder::with_capacity(self.ncols, self.nrows, self.nnz());
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                b.push(*c, i, *v);
            }
        }
        b.build()
    }

    /// Submatrix with the given row and column index lists (in that order).
    pub fn extract(&self, rows: &[usize], cols: &[usize]) -> CsrMatrix {
        let mut col_map = vec![usize::MAX; self.ncols];
        for (k, &c) in cols.iter().enumerate() {
            col_map[c] = k;
        }
        let mut b = TripletBuilder::new(rows.len(), cols.len());
        for (ri, &r) in rows.iter().enumerate() {
            let (cs, vs) = self.row(r);
            for (c, v) in cs.iter().zip(vs) {
                let k = col_map[*c];
                if k != usize::MAX {
                    b.push(ri, k, *v);
                }
            }
        }
        b.build()
    }

    pub fn scale(&mut self, s: f64) {
        self.values.iter_mut().for_each(|v| *v *= s);
    }

    /// `alpha * self + beta * other`; shapes must match.
    pub fn add_scaled(&self, alpha: f64, other: &CsrMatrix, beta: f64) -> CsrMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut b = TripletBuilder::with_capacity(self.nrows, self.ncols, self.nnz() + other.nnz());
        for i in 0..self.nrows {
            let (c1, v1) = self.row(i);
            for (c, v) in c1.iter().zip(v1) {
                b.push(i, *c, alpha * v);
            }
            let (c2, v2) = other.row(i);
            for (c, v) in c2.iter().zip(v2) {
                b.push(i, *c, beta * v);
            }
        }
        b.build()
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.nrows * self.ncols];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                d[i * self.ncols + c] += v;
            }
        }
        d
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `max |A_ij - A_ji|` for square matrices.
    pub fn asymmetry(&self) -> f64 {
        assert_eq!(self.nrows, self.ncols);
        let mut worst = 0.0f64;
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(*c, i)).abs());
            }
        }
        worst
    }

    fn structurally_symmetric(&self) -> bool {
        (0..self.nrows).all(|i| {
            let (cols, _) = self.row(i);
            cols.iter().all(|&c| self.row(c).0.binary_search(&i).is_ok())
        })
    }
}

/// Square, structurally symmetric CSR matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSym(CsrMatrix);

impl SparseSym {
    /// Wraps a square matrix whose pattern is symmetric. Values are checked
    /// to `1e-12` relative to the largest entry.
    pub fn new(m: CsrMatrix) -> Result<Self> {
        if m.nrows != m.ncols {
            return Err(Error::DimensionMismatch { expected: m.nrows, got: m.ncols });
        }
        if !m.structurally_symmetric() {
            return Err(Error::InvalidArgument("pattern is not symmetric".into()));
        }
        let tol = 1e-12 * m.max_abs().max(f64::MIN_POSITIVE);
        if m.asymmetry() > tol {
            return Err(Error::InvalidArgument(format!(
                "matrix is not symmetric (max asymmetry {:e})",
                m.asymmetry()
            )));
        }
        Ok(Self(m))
    }

    /// Symmetrizes the pattern (adding explicit zeros) and checks values.
    pub fn from_csr_symmetrized(m: CsrMatrix) -> Result<Self> {
        if m.nrows != m.ncols {
            return Err(Error::DimensionMismatch { expected: m.nrows, got: m.ncols });
        }
        let zero = m.transpose().add_scaled(0.0, &m, 0.0);
        Self::new(m.add_scaled(1.0, &zero, 1.0))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self(CsrMatrix::from_diagonal(diag))
    }

    pub fn n(&self) -> usize {
        self.0.nrows
    }

    pub fn csr(&self) -> &CsrMatrix {
        &self.0
    }

    pub fn into_csr(self) -> CsrMatrix {
        self.0
    }

    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.0.mul_vec(x)
    }

    pub fn principal(&self, idx: &[usize]) -> SparseSym {
        SparseSym(self.0.extract(idx, idx))
    }
}

impl std::ops::Deref for SparseSym {
    type Target = CsrMatrix;
    fn deref(&self) -> &CsrMatrix {
        &self.0
    }
}

/// `y = A x` for a symmetric sparse matrix.
pub fn spmv(a: &SparseSym, x: &[f64]) -> Result<Vec<f64>> {
    a.spmv(x)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_spmv() {
        let a = SparseSym::from_diagonal(&[1.0, 1.0, 1.0]);
        assert_eq!(spmv(&a, &[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn row_sums() {
        let a = SparseSym::new(CsrMatrix::from_dense(2, 2, &[2.0, -1.0, -1.0, 2.0])).unwrap();
        assert_eq!(spmv(&a, &[1.0, 1.0]).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn dimension_mismatch() {
        let a = SparseSym::from_diagonal(&[1.0, 2.0]);
        assert!(matches!(spmv(&a, &[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn duplicates_are_summed() {
        let mut b = TripletBuilder::new(2, 2);
        b.push(0, 0, 1.0);
        b.push(1, 0, 2.0);
        b.push(0, 0, 3.0);
        let m = b.build();
        assert_eq!(m.get(0, 0), 4.0);
        assert_eq!(m.get(1, 0), 2.0);
        assert_eq!(m.nnz(), 2);
    }

    #[test]
    fn rejects_unsymmetric() {
        let m = CsrMatrix::from_dense(2, 2, &[1.0, 2.0, 0.5, 1.0]);
        assert!(SparseSym::new(m).is_err());
    }

    #[test]
    fn transpose_and_extract() {
        let m = CsrMatrix::from_dense(2, 3, &[1.0, 0.0, 2.0, 0.0, 3.0, 4.0]);
        let t = m.transpose();
        assert_eq!(t.to_dense(), vec![1.0, 0.0, 0.0, 3.0, 2.0, 4.0]);
        let s = m.extract(&[1], &[2, 1]);
        assert_eq!(s.to_dense(), vec![4.0, 3.0]);
    }
}
