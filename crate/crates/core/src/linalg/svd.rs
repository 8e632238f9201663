use alloc::format;
use alloc::vec::Vec;

use super::{canonicalize_sign, symmetric_eigen_descending, DenseMatrix, Kernels, Sequential};
use crate::error::{Error, Result};

/// Convergence tolerance handed to the Jacobi solver for the Gram matrix.
pub const GRAM_EIGEN_TOL: f64 = 1e-12;

/// Thin SVD `X ≈ U · diag(σ) · Vᵀ` restricted to the numerical rank.
#[derive(Debug, Clone, PartialEq)]
pub struct ThinSvd {
    /// Left singular vectors, `rows × k`, orthonormal columns.
    pub u: DenseMatrix,
    /// Strictly positive, non-increasing, length `k`.
    pub singular_values: Vec<f64>,
    /// Right singular vectors (Gram eigenvectors), `cols × k`.
    pub v: DenseMatrix,
}

impl ThinSvd {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }
}

pub fn thin_svd_snapshot(x: &DenseMatrix) -> Result<ThinSvd> {
    thin_svd_snapshot_with(&Sequential, x)
}

/// Thin SVD of a tall matrix through the eigendecomposition of its `n × n` Gram
/// matrix (the snapshot method).
///
/// With `XᵀX = V Λ Vᵀ`, each retained pair gives `σ_i = √λ_i` and
/// `u_i = X v_i / σ_i`. A component is retained while
/// `λ_i > ε · rows · λ_max`; the Gram eigenvalues carry absolute error of
/// order `ε · λ_max`, so anything below that is indistinguishable from zero.
/// Columns of `U` follow [`canonicalize_sign`], with `V` flipped to match.
pub fn thin_svd_snapshot_with<K: Kernels + ?Sized>(
    kernels: &K,
    x: &DenseMatrix,
) -> Result<ThinSvd> {
    let (rows, cols) = (x.rows(), x.cols());
    if rows < cols {
        return Err(Error::invalid(format!(
            "snapshot SVD needs a tall matrix, got {rows}x{cols}"
        )));
    }
    if x.is_zero() {
        return Err(Error::invalid("snapshot SVD of an all-zero matrix"));
    }

    let gram = kernels.gram(x);
    let eig = symmetric_eigen_descending(&gram, GRAM_EIGEN_TOL)?;
    let lambda_max = eig.eigenvalues[0];
    let cutoff = f64::EPSILON * rows as f64 * lambda_max;
    let rank = eig.eigenvalues.iter().take_while(|&&l| l > cutoff).count();
    if rank == 0 {
        return Err(Error::NumericalFailure(
            "Gram matrix has no positive eigenvalue".into(),
        ));
    }

    let singular_values: Vec<f64> = eig.eigenvalues[..rank]
        .iter()
        .map(|&l| libm::sqrt(l))
        .collect();
    let mut v = eig.eigenvectors.leading_columns(rank)?.into_col_major();
    let mut u = kernels
        .combine(
            x,
            &DenseMatrix::from_col_major_unchecked(cols, rank, v.clone()),
            &singular_values,
        )
        .into_col_major();
    for i in 0..rank {
        if canonicalize_sign(&mut u[i * rows..(i + 1) * rows]) {
            v[i * cols..(i + 1) * cols]
                .iter_mut()
                .for_each(|e| *e = -*e);
        }
    }

    Ok(ThinSvd {
        u: DenseMatrix::from_col_major_unchecked(rows, rank, u),
        singular_values,
        v: DenseMatrix::from_col_major_unchecked(cols, rank, v),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::reduce;

    #[test]
    fn diagonal_tall_matrix() {
        let x = DenseMatrix::from_row_major(3, 2, &[3.0, 0.0, 0.0, 2.0, 0.0, 0.0]).unwrap();
        let svd = thin_svd_snapshot(&x).unwrap();
        assert_eq!(svd.singular_values, [3.0, 2.0]);
        assert_eq!(svd.u.column(0), &[1.0, 0.0, 0.0]);
        assert_eq!(svd.u.column(1), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn rank_one_matrix_has_one_singular_value() {
        // 7 · u vᵀ with unit u ∈ R⁴, v ∈ R³
        let u = [0.5, -0.5, 0.5, 0.5];
        let v = [2.0 / 3.0, 1.0 / 3.0, -2.0 / 3.0];
        let mut cols = Vec::new();
        for vj in v {
            cols.push(u.map(|ui| 7.0 * ui * vj));
        }
        let x = DenseMatrix::from_columns(&cols).unwrap();
        let svd = thin_svd_snapshot(&x).unwrap();
        assert_eq!(svd.rank(), 1);
        assert!((svd.singular_values[0] - 7.0).abs() < 1e-12);
        for (a, b) in svd.u.column(0).iter().zip(u) {
            assert!((a.abs() - b.abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn repeated_column_is_rank_one() {
        let col = [0.2, 0.9, 0.4, 0.7, 0.1];
        let x = DenseMatrix::from_columns(&[col; 4]).unwrap();
        let svd = thin_svd_snapshot(&x).unwrap();
        assert_eq!(svd.rank(), 1);
        let norm = libm::sqrt(reduce::dot(&col, &col));
        for (a, b) in svd.u.column(0).iter().zip(col) {
            assert!((a - b / norm).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_zero_and_wide() {
        let z = DenseMatrix::from_col_major(3, 2, alloc::vec![0.0; 6]).unwrap();
        assert!(matches!(thin_svd_snapshot(&z), Err(Error::InvalidInput(_))));
        let wide = DenseMatrix::from_col_major(2, 3, alloc::vec![1.0; 6]).unwrap();
        assert!(matches!(
            thin_svd_snapshot(&wide),
            Err(Error::InvalidInput(_))
        ));
    }
}
