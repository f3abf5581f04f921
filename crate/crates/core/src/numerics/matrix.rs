use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::NumericsError;

pub type C64 = Complex64;

/// Dense complex vector.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexVector {
    entries: Vec<C64>,
}

impl ComplexVector {
    pub fn new(entries: Vec<C64>) -> Result<Self, NumericsError> {
        if entries.is_empty() {
            return Err(NumericsError::Empty);
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(NumericsError::NonFinite);
        }
        Ok(Self { entries })
    }

    pub(crate) fn from_vec(entries: Vec<C64>) -> Self {
        Self { entries }
    }

    pub fn zeros(len: usize) -> Self {
        Self { entries: vec![C64::new(0.0, 0.0); len] }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.entries
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.entries
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, C64> {
        self.entries.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Hermitian inner product `selfᴴ·other`.
    pub fn dot_h(&self, other: &ComplexVector) -> C64 {
        assert_eq!(self.len(), other.len(), "vector length mismatch");
        self.entries.iter().zip(&other.entries).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scale(&self, s: C64) -> ComplexVector {
        Self::from_vec(self.entries.iter().map(|z| z * s).collect())
    }

    pub fn conj(&self) -> ComplexVector {
        Self::from_vec(self.entries.iter().map(|z| z.conj()).collect())
    }

    /// Column matrix `len × 1`.
    pub fn to_column(&self) -> ComplexMatrix {
        ComplexMatrix::from_raw(self.len(), 1, self.entries.clone())
    }

    /// `self · selfᴴ`.
    pub fn outer_h(&self) -> ComplexMatrix {
        let n = self.len();
        ComplexMatrix::from_fn(n, n, |i, j| self.entries[i] * self.entries[j].conj())
    }
}

impl Index<usize> for ComplexVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.entries[i]
    }
}

impl IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.entries[i]
    }
}

impl fmt::Debug for ComplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.entries.iter()).finish()
    }
}

impl FromIterator<C64> for ComplexVector {
    fn from_iter<I: IntoIterator<Item = C64>>(iter: I) -> Self {
        Self::from_vec(iter.into_iter().collect())
    }
}

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Validated constructor from row-major entries.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, NumericsError> {
        if rows == 0 || cols == 0 {
            return Err(NumericsError::Empty);
        }
        if data.len() != rows * cols {
            return Err(NumericsError::DimMismatch {
                expected: (rows, cols),
                found: (data.len(), 1),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(NumericsError::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_raw(rows, cols, vec![C64::new(0.0, 0.0); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::from_raw(rows, cols, data)
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { C64::new(0.0, 0.0) })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[ComplexVector]) -> Self {
        assert!(!columns.is_empty(), "at least one column required");
        let rows = columns[0].len();
        assert!(columns.iter().all(|c| c.len() == rows), "ragged columns");
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector::from_vec((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn row(&self, i: usize) -> ComplexVector {
        ComplexVector::from_vec(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn set_column(&mut self, j: usize, v: &ComplexVector) {
        assert_eq!(v.len(), self.rows);
        for i in 0..self.rows {
            self[(i, j)] = v[i];
        }
    }

    /// Submatrix made of the listed columns, in the listed order.
    pub fn select_columns(&self, idx: &[usize]) -> ComplexMatrix {
        Self::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])])
    }

    /// Submatrix made of the listed rows, in the listed order.
    pub fn select_rows(&self, idx: &[usize]) -> ComplexMatrix {
        Self::from_fn(idx.len(), self.cols, |i, j| self[(idx[i], j)])
    }

    pub fn transpose(&self) -> ComplexMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> ComplexMatrix {
        Self::from_raw(self.rows, self.cols, self.data.iter().map(|z| z.conj()).collect())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul inner dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> ComplexVector {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v.iter())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn add(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape());
        Self::from_raw(
            self.rows,
            self.cols,
            self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        )
    }

    pub fn sub(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape());
        Self::from_raw(
            self.rows,
            self.cols,
            self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        )
    }

    pub fn add_scaled_assign(&mut self, rhs: &ComplexMatrix, s: f64) {
        assert_eq!(self.shape(), rhs.shape());
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b * s;
        }
    }

    pub fn scale(&self, s: C64) -> ComplexMatrix {
        Self::from_raw(self.rows, self.cols, self.data.iter().map(|z| z * s).collect())
    }

    pub fn scale_real(&self, s: f64) -> ComplexMatrix {
        Self::from_raw(self.rows, self.cols, self.data.iter().map(|z| z * s).collect())
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square(), "trace of non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `‖A − Aᴴ‖_F / ‖A‖_F`, zero for the zero matrix.
    pub fn hermitian_defect(&self) -> f64 {
        assert!(self.is_square());
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt() / norm
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    ComplexMatrix::from_fn(ra * rb, ca * cb, |i, j| a[(i / rb, j / cb)] * b[(i % rb, j % cb)])
}

/// Kronecker product of two vectors.
pub fn kron_vec(a: &ComplexVector, b: &ComplexVector) -> ComplexVector {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a.iter() {
        for y in b.iter() {
            out.push(x * y);
        }
    }
    ComplexVector::from_vec(out)
}
