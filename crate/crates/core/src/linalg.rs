//! Dense and sparse containers plus the handful of BLAS-1 style kernels the
//! solvers need. Points of every feasible set are stored as flat
//! [`DenseVector`]s; matrix-shaped points (nuclear-norm ball) are row-major.

use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DenseVector(Vec<f64>);

impl DenseVector {
    pub fn zeros(len: usize) -> Self {
        DenseVector(vec![0.0; len])
    }

    pub fn from_vec(v: Vec<f64>) -> Self {
        DenseVector(v)
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        dot(&self.0, other)
    }

    /// `self ← (1 − t)·self + t·other`
    pub fn lerp_toward(&mut self, other: &[f64], t: f64) {
        debug_assert_eq!(self.len(), other.len());
        for (a, b) in self.0.iter_mut().zip(other) {
            *a += t * (b - *a);
        }
    }

    pub fn scale(&mut self, s: f64) {
        self.0.iter_mut().for_each(|v| *v *= s);
    }

    pub fn axpy(&mut self, a: f64, x: &[f64]) {
        axpy(&mut self.0, a, x);
    }
}

impl Deref for DenseVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for DenseVector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for DenseVector {
    fn from(v: Vec<f64>) -> Self {
        DenseVector(v)
    }
}

impl FromIterator<f64> for DenseVector {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        DenseVector(iter.into_iter().collect())
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    debug_assert_eq!(y.len(), x.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist_sq(a, b).sqrt()
}

/// Convex combination `(1 − t)·a + t·b` as a new vector.
pub fn combine(a: &[f64], b: &[f64], t: f64) -> DenseVector {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

/// Anything that can be applied as `G·v` and `Gᵀ·u`.
pub trait LinearOperator {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    /// `out ← G·v`, `v.len() == cols`.
    fn apply(&self, v: &[f64], out: &mut [f64]);
    /// `out ← Gᵀ·u`, `u.len() == rows`.
    fn apply_transpose(&self, u: &[f64], out: &mut [f64]);
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::argument(format!(
                "matrix {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::argument("matrix entries must be finite"));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = DenseMatrix::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m.data[i * n + i] = *d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn view(&self) -> MatrixView<'_> {
        MatrixView {
            rows: self.rows,
            cols: self.cols,
            data: &self.data,
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm(&self.data)
    }
}

/// Borrowed row-major matrix, used to treat a flat point as a matrix.
#[derive(Debug, Clone, Copy)]
pub struct MatrixView<'a> {
    pub rows: usize,
    pub cols: usize,
    pub data: &'a [f64],
}

impl<'a> MatrixView<'a> {
    pub fn new(rows: usize, cols: usize, data: &'a [f64]) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::argument(format!(
                "view {rows}x{cols} over {} entries",
                data.len()
            )));
        }
        Ok(MatrixView { rows, cols, data })
    }
}

impl LinearOperator for MatrixView<'_> {
    fn rows(&self) -> usize {
        self.rows
    }
    fn cols(&self) -> usize {
        self.cols
    }
    fn apply(&self, v: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(&self.data[i * self.cols..(i + 1) * self.cols], v);
        }
    }
    fn apply_transpose(&self, u: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, ui) in u.iter().enumerate() {
            if *ui != 0.0 {
                axpy(out, *ui, &self.data[i * self.cols..(i + 1) * self.cols]);
            }
        }
    }
}

impl LinearOperator for DenseMatrix {
    fn rows(&self) -> usize {
        self.rows
    }
    fn cols(&self) -> usize {
        self.cols
    }
    fn apply(&self, v: &[f64], out: &mut [f64]) {
        self.view().apply(v, out)
    }
    fn apply_transpose(&self, u: &[f64], out: &mut [f64]) {
        self.view().apply_transpose(u, out)
    }
}

/// Compressed sparse rows with strictly increasing column indices per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseRowMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseRowMatrix {
    pub fn new(cols: usize) -> Self {
        SparseRowMatrix {
            rows: 0,
            cols,
            row_ptr: vec![0],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Append a row given as `(index, value)` pairs. Zeros are dropped.
    pub fn push_row(&mut self, entries: &[(usize, f64)]) -> Result<()> {
        let mut last: Option<usize> = None;
        for &(j, v) in entries {
            if j >= self.cols {
                return Err(Error::argument(format!(
                    "column index {j} out of range for {} columns",
                    self.cols
                )));
            }
            if last.is_some_and(|l| j <= l) {
                return Err(Error::argument("column indices must be strictly increasing"));
            }
            if !v.is_finite() {
                return Err(Error::argument("sparse values must be finite"));
            }
            last = Some(j);
        }
        for &(j, v) in entries {
            if v != 0.0 {
                self.indices.push(j);
                self.values.push(v);
            }
        }
        self.row_ptr.push(self.indices.len());
        self.rows += 1;
        Ok(())
    }

    pub fn from_dense(m: &DenseMatrix) -> Self {
        let mut s = SparseRowMatrix::new(m.cols());
        for i in 0..m.rows() {
            let row: Vec<(usize, f64)> = m
                .row(i)
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(j, v)| (j, *v))
                .collect();
            s.push_row(&row).expect("dense rows are well formed");
        }
        s
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Widen the column count, e.g. to align with another split.
    pub fn set_cols(&mut self, cols: usize) -> Result<()> {
        if self.indices.iter().any(|&j| j >= cols) {
            return Err(Error::argument(format!(
                "cannot shrink to {cols} columns: an index is out of range"
            )));
        }
        self.cols = cols;
        Ok(())
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.indices[s..e], &self.values[s..e])
    }

    /// `⟨row_i, x⟩` for a dense `x` of length `cols`.
    #[inline]
    pub fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        let (idx, val) = self.row(i);
        idx.iter().zip(val).map(|(j, v)| v * x[*j]).sum()
    }

    pub fn row_norm_sq(&self, i: usize) -> f64 {
        self.row(i).1.iter().map(|v| v * v).sum()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            let (idx, val) = self.row(i);
            for (j, v) in idx.iter().zip(val) {
                m.set(i, *j, *v);
            }
        }
        m
    }
}

impl LinearOperator for SparseRowMatrix {
    fn rows(&self) -> usize {
        self.rows
    }
    fn cols(&self) -> usize {
        self.cols
    }
    fn apply(&self, v: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row_dot(i, v);
        }
    }
    fn apply_transpose(&self, u: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, ui) in u.iter().enumerate() {
            let (idx, val) = self.row(i);
            for (j, v) in idx.iter().zip(val) {
                out[*j] += ui * v;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_rejects_unsorted_and_drops_zeros() {
        let mut s = SparseRowMatrix::new(4);
        assert!(s.push_row(&[(2, 1.0), (1, 1.0)]).is_err());
        s.push_row(&[(0, 0.0), (3, 2.0)]).unwrap();
        assert_eq!(s.nnz(), 1);
        assert_eq!(s.row(0).0, &[3]);
        assert!(s.push_row(&[(4, 1.0)]).is_err());
    }

    #[test]
    fn sparse_and_dense_operators_agree() {
        let d = DenseMatrix::from_row_major(2, 3, vec![1.0, 0.0, 2.0, 0.0, -1.0, 3.0]).unwrap();
        let s = SparseRowMatrix::from_dense(&d);
        let v = [1.0, 2.0, 3.0];
        let (mut a, mut b) = ([0.0; 2], [0.0; 2]);
        d.apply(&v, &mut a);
        s.apply(&v, &mut b);
        assert_eq!(a, b);
        let u = [0.5, -2.0];
        let (mut a, mut b) = ([0.0; 3], [0.0; 3]);
        d.apply_transpose(&u, &mut a);
        s.apply_transpose(&u, &mut b);
        assert_eq!(a, b);
        assert_eq!(s.to_dense(), d);
    }

    #[test]
    fn lerp_is_convex_combination() {
        let mut a = DenseVector::from_vec(vec![1.0, 0.0]);
        a.lerp_toward(&[0.0, 1.0], 0.25);
        assert_eq!(a.as_slice(), &[0.75, 0.25]);
    }
}
