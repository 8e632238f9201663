use alloc::vec;
use alloc::vec::Vec;

use super::{reduce, DenseMatrix};

/// The two O(N·n²) kernels behind the snapshot SVD.
///
/// Implementations may split the work however they like, but every output entry
/// must be produced by [`reduce::dot`] (for the Gram matrix) or [`combine_row`]
/// (for the left singular vectors) so that results stay bit-identical to
/// [`Sequential`].
pub trait Kernels {
    /// `XᵀX`.
    fn gram(&self, x: &DenseMatrix) -> DenseMatrix;

    /// `out[:, i] = X · coeffs[:, i] / scales[i]`.
    fn combine(&self, x: &DenseMatrix, coeffs: &DenseMatrix, scales: &[f64]) -> DenseMatrix;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Kernels for Sequential {
    fn gram(&self, x: &DenseMatrix) -> DenseMatrix {
        let n = x.cols();
        let mut g = vec![0.0; n * n];
        for a in 0..n {
            for b in a..n {
                let d = reduce::dot(x.column(a), x.column(b));
                g[a * n + b] = d;
                g[b * n + a] = d;
            }
        }
        DenseMatrix::from_col_major_unchecked(n, n, g)
    }

    fn combine(&self, x: &DenseMatrix, coeffs: &DenseMatrix, scales: &[f64]) -> DenseMatrix {
        let (rows, k) = (x.rows(), coeffs.cols());
        let mut out = vec![0.0; rows * k];
        let mut scratch = Vec::with_capacity(x.cols());
        let mut row_out = vec![0.0; k];
        for row in 0..rows {
            combine_row(x, row, coeffs, scales, &mut scratch, &mut row_out);
            for (i, &value) in row_out.iter().enumerate() {
                out[i * rows + row] = value;
            }
        }
        DenseMatrix::from_col_major_unchecked(rows, k, out)
    }
}

/// Computes row `row` of `X · coeffs / scales` into `out` (length `coeffs.cols()`).
///
/// `scratch` is reused to gather the row of `X`.
pub fn combine_row(
    x: &DenseMatrix,
    row: usize,
    coeffs: &DenseMatrix,
    scales: &[f64],
    scratch: &mut Vec<f64>,
    out: &mut [f64],
) {
    debug_assert_eq!(coeffs.rows(), x.cols());
    scratch.clear();
    scratch.extend((0..x.cols()).map(|c| x.get(row, c)));
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = reduce::dot(scratch, coeffs.column(i)) / scales[i];
    }
}
