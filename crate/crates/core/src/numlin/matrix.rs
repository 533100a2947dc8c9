//! Dense complex matrices and vectors.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries, validating shape and finiteness.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        let m = Self { rows, cols, data };
        if !m.is_finite() {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidInput("ragged rows".into()));
        }
        Self::from_row_major(r, c, rows.concat())
    }

    /// Real diagonal matrix.
    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn from_diagonal(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: C64, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector::new((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn mul_vec(&self, x: &ComplexVector) -> ComplexVector {
        assert_eq!(self.cols, x.len());
        ComplexVector::new(
            (0..self.rows)
                .map(|i| self.row(i).iter().zip(x.iter()).map(|(a, b)| a * b).sum())
                .collect(),
        )
    }

    /// `y* M x`.
    pub fn bilinear(&self, y: &ComplexVector, x: &ComplexVector) -> C64 {
        y.dot(&self.mul_vec(x))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(l, j)];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out.add_scaled(C64::new(1.0, 0.0), rhs);
        out
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out.add_scaled(C64::new(-1.0, 0.0), rhs);
        out
    }
}

/// Dense complex column vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexVector(Vec<C64>);

impl ComplexVector {
    pub fn new(entries: Vec<C64>) -> Self {
        Self(entries)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![C64::new(0.0, 0.0); n])
    }

    /// Standard basis vector `e_i` of length `n`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = C64::new(1.0, 0.0);
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, C64> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Hermitian inner product `self* other`.
    pub fn dot(&self, other: &Self) -> C64 {
        assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self(self.0.iter().map(|&z| z * c).collect())
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        self.scale(C64::new(1.0 / n, 0.0))
    }

    /// Outer product `self other*`.
    pub fn outer(&self, other: &Self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.len(), other.len(), |i, j| self.0[i] * other.0[j].conj())
    }

    /// Rotates the phase so that the largest-magnitude entry is real and positive.
    pub fn with_canonical_phase(&self) -> Self {
        let pivot = self
            .0
            .iter()
            .copied()
            .fold(C64::new(0.0, 0.0), |best, z| if z.norm() > best.norm() { z } else { best });
        if pivot.norm() == 0.0 {
            return self.clone();
        }
        self.scale(pivot.conj() / pivot.norm())
    }
}

impl Index<usize> for ComplexVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.0[i]
    }
}

impl From<Vec<C64>> for ComplexVector {
    fn from(v: Vec<C64>) -> Self {
        Self(v)
    }
}
