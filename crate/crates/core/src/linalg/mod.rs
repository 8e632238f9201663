//! Deterministic dense linear algebra.
//!
//! Every sum in this module (means, inner products, distances) goes through the
//! fixed pairwise tree in [`reduce`], so results never depend on how a caller
//! schedules the work.

mod eigen;
mod kernels;
pub mod reduce;
mod svd;

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

pub use eigen::{symmetric_eigen_descending, SymmetricEigen, JACOBI_MAX_SWEEPS};
pub use kernels::{combine_row, Kernels, Sequential};
pub use svd::{thin_svd_snapshot, thin_svd_snapshot_with, ThinSvd, GRAM_EIGEN_TOL};

/// A dense vector of finite reals. Never empty.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector {
    values: Vec<f64>,
}

impl DenseVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("vector must have at least one entry"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(alloc::format!(
                "non-finite entry at index {i}"
            )));
        }
        Ok(Self { values })
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec())
    }

    /// Callers guarantee a nonempty, all-finite buffer.
    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(!values.is_empty());
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self { values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(reduce::dot(&self.values, &self.values))
    }
}

impl AsRef<[f64]> for DenseVector {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// A dense column-major matrix of finite reals with at least one row and column.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    values: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl DenseMatrix {
    pub fn from_col_major(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(
                "matrix must have at least one row and one column",
            ));
        }
        if values.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(alloc::format!(
                "non-finite entry at row {}, column {}",
                i % rows,
                i / rows
            )));
        }
        Ok(Self { values, rows, cols })
    }

    /// Builds a matrix from row-major data, mostly handy for small literals.
    pub fn from_row_major(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: values.len(),
            });
        }
        let mut col_major = vec![0.0; values.len()];
        for r in 0..rows {
            for c in 0..cols {
                col_major[c * rows + r] = values[r * cols + c];
            }
        }
        Self::from_col_major(rows, cols, col_major)
    }

    /// Stacks equally sized vectors as columns.
    pub fn from_columns<V: AsRef<[f64]>>(columns: &[V]) -> Result<Self> {
        let first = columns
            .first()
            .ok_or_else(|| Error::invalid("no columns given"))?;
        let rows = first.as_ref().len();
        let mut values = Vec::with_capacity(rows * columns.len());
        for col in columns {
            let col = col.as_ref();
            if col.len() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    found: col.len(),
                });
            }
            values.extend_from_slice(col);
        }
        Self::from_col_major(rows, columns.len(), values)
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            values[i * n + i] = 1.0;
        }
        Self::from_col_major(n, n, values)
    }

    pub(crate) fn from_col_major_unchecked(rows: usize, cols: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), rows * cols);
        Self { values, rows, cols }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[col * self.rows + row]
    }

    pub fn column(&self, col: usize) -> &[f64] {
        &self.values[col * self.rows..(col + 1) * self.rows]
    }

    pub fn columns(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.rows)
    }

    pub fn as_col_major(&self) -> &[f64] {
        &self.values
    }

    pub fn into_col_major(self) -> Vec<f64> {
        self.values
    }

    pub fn transpose(&self) -> Self {
        let mut out = vec![0.0; self.values.len()];
        for c in 0..self.cols {
            for r in 0..self.rows {
                out[r * self.cols + c] = self.values[c * self.rows + r];
            }
        }
        Self::from_col_major_unchecked(self.cols, self.rows, out)
    }

    /// Keeps the first `k` columns.
    pub fn leading_columns(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.cols {
            return Err(Error::invalid(alloc::format!(
                "cannot take {k} leading columns of a matrix with {} columns",
                self.cols
            )));
        }
        Ok(Self::from_col_major_unchecked(
            self.rows,
            k,
            self.values[..k * self.rows].to_vec(),
        ))
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(reduce::dot(&self.values, &self.values))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Column mean `(1/n) Σ_i X[:, i]`, reduced pairwise over columns.
pub fn mean_vector(x: &DenseMatrix) -> Result<DenseVector> {
    let sums = reduce::column_sum(x);
    let n = x.cols() as f64;
    Ok(DenseVector::from_vec_unchecked(
        sums.into_iter().map(|s| s / n).collect(),
    ))
}

pub fn euclidean_distance(x: &DenseVector, y: &DenseVector) -> Result<f64> {
    Ok(libm::sqrt(squared_distance(x.as_slice(), y.as_slice())?))
}

pub fn squared_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok(reduce::squared_distance(x, y))
}

/// Coefficients `Uᵀx` of `x` in the column basis `U`.
pub fn project(basis: &DenseMatrix, x: &DenseVector) -> Result<DenseVector> {
    if basis.rows() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.rows(),
            found: x.dim(),
        });
    }
    Ok(DenseVector::from_vec_unchecked(
        basis
            .columns()
            .map(|u| reduce::dot(u, x.as_slice()))
            .collect(),
    ))
}

/// Sign convention for basis vectors: the entry of largest magnitude is made
/// nonnegative, ties going to the lowest index. Returns whether `v` was flipped.
pub fn canonicalize_sign(v: &mut [f64]) -> bool {
    let mut best = 0;
    for (i, value) in v.iter().enumerate() {
        if value.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&b| b < 0.0) {
        v.iter_mut().for_each(|e| *e = -*e);
        true
    } else {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, row_major: &[f64]) -> DenseMatrix {
        DenseMatrix::from_row_major(rows, cols, row_major).unwrap()
    }

    fn v(values: &[f64]) -> DenseVector {
        DenseVector::from_slice(values).unwrap()
    }

    #[test]
    fn construction_rejects_non_finite_and_empty() {
        assert!(DenseVector::new(vec![]).is_err());
        assert!(DenseVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(DenseMatrix::from_col_major(1, 2, vec![f64::INFINITY, 0.0]).is_err());
        assert!(matches!(
            DenseMatrix::from_col_major(2, 2, vec![0.0; 3]),
            Err(Error::DimensionMismatch {
                expected: 4,
                found: 3
            })
        ));
    }

    #[test]
    fn mean_of_two_columns() {
        let x = m(2, 2, &[1.0, 3.0, 2.0, 4.0]);
        assert_eq!(mean_vector(&x).unwrap().as_slice(), &[2.0, 3.0]);
    }

    #[test]
    fn mean_of_single_column_is_identity() {
        let x = DenseMatrix::from_columns(&[[0.25, -7.5, 3.0]]).unwrap();
        assert_eq!(mean_vector(&x).unwrap().as_slice(), &[0.25, -7.5, 3.0]);
    }

    #[test]
    fn mean_of_opposite_columns_is_zero() {
        let x = DenseMatrix::from_columns(&[[1.5, -2.0, 9.0], [-1.5, 2.0, -9.0]]).unwrap();
        assert_eq!(mean_vector(&x).unwrap().as_slice(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn distance_examples() {
        let x = v(&[0.3, -1.0, 4.0]);
        assert_eq!(euclidean_distance(&x, &x).unwrap(), 0.0);
        assert_eq!(
            euclidean_distance(&v(&[0.0, 0.0, 0.0]), &v(&[1.0, 2.0, 2.0])).unwrap(),
            3.0
        );
        assert!(matches!(
            euclidean_distance(&v(&[1.0]), &v(&[1.0, 2.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn projection_onto_standard_basis() {
        let basis =
            DenseMatrix::from_columns(&[[1.0, 0.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0, 0.0]])
                .unwrap();
        let coeffs = project(&basis, &v(&[5.0, 4.0, 3.0, 2.0, 1.0])).unwrap();
        assert_eq!(coeffs.as_slice(), &[5.0, 4.0]);
        let orth = project(&basis, &v(&[0.0, 0.0, 3.0, 2.0, 1.0])).unwrap();
        assert_eq!(orth.as_slice(), &[0.0, 0.0]);
        assert!(matches!(
            project(&basis, &v(&[1.0, 2.0])),
            Err(Error::DimensionMismatch {
                expected: 5,
                found: 2
            })
        ));
    }

    #[test]
    fn sign_convention_ties_go_to_lowest_index() {
        let mut a = [0.5, -0.5, 0.1];
        assert!(!canonicalize_sign(&mut a));
        let mut b = [-0.5, 0.5, 0.1];
        assert!(canonicalize_sign(&mut b));
        assert_eq!(b, [0.5, -0.5, -0.1]);
        let mut c = [0.1, -0.9];
        canonicalize_sign(&mut c);
        assert_eq!(c, [-0.1, 0.9]);
    }

    #[test]
    fn transpose_and_leading_columns() {
        let x = m(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let t = x.transpose();
        assert_eq!((t.rows(), t.cols()), (3, 2));
        assert_eq!(t.get(2, 1), 6.0);
        let lead = x.leading_columns(2).unwrap();
        assert_eq!(lead.column(1), &[2.0, 5.0]);
        assert!(x.leading_columns(4).is_err());
    }
}
