//! Small dense matrices over exact rationals.

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qkernel::{format_fraction, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(size: usize) -> Self {
        Self::from_fn(size, size, |i, j| if i == j { Scalar::one() } else { Scalar::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Lower-triangular square matrix from a fallible entry function on `i >= j`.
    pub fn lower_from_fn(size: usize, mut f: impl FnMut(usize, usize) -> Result<Scalar>) -> Result<Self> {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            for j in 0..=i {
                m.set(i, j, f(i, j)?);
            }
        }
        Ok(m)
    }

    pub fn diagonal(values: &[Scalar]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i].clone() } else { Scalar::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let rows: Vec<Vec<Scalar>> = (0..self.rows)
            .into_par_iter()
            .map(|i| {
                (0..other.cols)
                    .map(|j| {
                        let mut acc = Scalar::zero();
                        for k in 0..self.cols {
                            let a = self.get(i, k);
                            if a.is_zero() {
                                continue;
                            }
                            let b = other.get(k, j);
                            if !b.is_zero() {
                                acc += a * b;
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        Ok(Matrix { rows: self.rows, cols: other.cols, data: rows.into_iter().flatten().collect() })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch("matrix difference".into()));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// First position (row-major) where the matrices differ.
    pub fn first_difference(&self, other: &Matrix) -> Option<(usize, usize)> {
        if self.rows != other.rows || self.cols != other.cols {
            return Some((0, 0));
        }
        (0..self.rows * self.cols)
            .find(|&k| self.data[k] != other.data[k])
            .map(|k| (k / self.cols, k % self.cols))
    }

    /// Leading `size x size` block.
    pub fn leading(&self, size: usize) -> Matrix {
        Self::from_fn(size, size, |i, j| self.get(i, j).clone())
    }

    pub fn to_fraction_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| self.row(i).iter().map(format_fraction).collect()).collect()
    }
}
