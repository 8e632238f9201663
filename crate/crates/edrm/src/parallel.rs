//! Rayon-backed kernels and training entry points.
//!
//! Output is bit-identical to the sequential kernels for any pool size: work is
//! only split across independent output entries, never inside a reduction.

use edrm_core::linalg::{combine_row, reduce, Kernels};
use edrm_core::{
    ClassSubspace, DenseMatrix, ImageShape, Label, MeanDistanceModel, Method, Model,
    PcaDetectorModel,
};
use rayon::prelude::*;

use crate::dataset::LabeledMatrix;
use crate::error::Result;

const ROW_CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, Default)]
pub struct Rayon;

impl Kernels for Rayon {
    fn gram(&self, x: &DenseMatrix) -> DenseMatrix {
        let n = x.cols();
        let upper: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|a| {
                (a..n)
                    .map(|b| reduce::dot(x.column(a), x.column(b)))
                    .collect()
            })
            .collect();
        let mut g = vec![0.0; n * n];
        for (a, row) in upper.iter().enumerate() {
            for (offset, &d) in row.iter().enumerate() {
                let b = a + offset;
                g[a * n + b] = d;
                g[b * n + a] = d;
            }
        }
        DenseMatrix::from_col_major(n, n, g).expect("finite Gram matrix")
    }

    fn combine(&self, x: &DenseMatrix, coeffs: &DenseMatrix, scales: &[f64]) -> DenseMatrix {
        let (rows, k) = (x.rows(), coeffs.cols());
        let starts: Vec<usize> = (0..rows).step_by(ROW_CHUNK).collect();
        let blocks: Vec<Vec<f64>> = starts
            .par_iter()
            .map(|&start| {
                let end = (start + ROW_CHUNK).min(rows);
                let mut block = vec![0.0; (end - start) * k];
                let mut scratch = Vec::with_capacity(x.cols());
                for (row, out) in (start..end).zip(block.chunks_exact_mut(k)) {
                    combine_row(x, row, coeffs, scales, &mut scratch, out);
                }
                block
            })
            .collect();
        let mut out = vec![0.0; rows * k];
        for (&start, block) in starts.iter().zip(&blocks) {
            for (offset, row_vals) in block.chunks_exact(k).enumerate() {
                for (i, &v) in row_vals.iter().enumerate() {
                    out[i * rows + start + offset] = v;
                }
            }
        }
        DenseMatrix::from_col_major(rows, k, out).expect("finite singular vectors")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainConfig {
    pub method: Method,
    pub r: usize,
    pub centered: bool,
    pub shape: ImageShape,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            method: Method::Pca,
            r: 180,
            centered: false,
            shape: ImageShape::default(),
        }
    }
}

pub fn train_mean_model(
    pos: &LabeledMatrix,
    neg: &LabeledMatrix,
    shape: ImageShape,
) -> Result<MeanDistanceModel> {
    Ok(MeanDistanceModel::train(&pos.matrix, &neg.matrix, shape)?)
}

/// Fits the two class subspaces concurrently.
pub fn train_pca_detector(
    pos: &LabeledMatrix,
    neg: &LabeledMatrix,
    r: usize,
    centered: bool,
    shape: ImageShape,
) -> Result<PcaDetectorModel> {
    for m in [pos, neg] {
        if m.matrix.rows() != shape.dim() {
            return Err(edrm_core::Error::DimensionMismatch {
                expected: shape.dim(),
                found: m.matrix.rows(),
            }
            .into());
        }
    }
    let (p, n) = rayon::join(
        || ClassSubspace::fit(&Rayon, &pos.matrix, r, centered, Label::Positive),
        || ClassSubspace::fit(&Rayon, &neg.matrix, r, centered, Label::Negative),
    );
    Ok(PcaDetectorModel::from_subspaces(p?, n?, centered, shape)?)
}

pub fn train(pos: &LabeledMatrix, neg: &LabeledMatrix, cfg: &TrainConfig) -> Result<Model> {
    Ok(match cfg.method {
        Method::Mean => train_mean_model(pos, neg, cfg.shape)?.into(),
        Method::Pca => train_pca_detector(pos, neg, cfg.r, cfg.centered, cfg.shape)?.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use edrm_core::linalg::Sequential;

    fn sample(rows: usize, cols: usize) -> DenseMatrix {
        let values = (0..rows * cols)
            .map(|i| ((i * 7919) % 1000) as f64 / 997.0 - 0.3)
            .collect();
        DenseMatrix::from_col_major(rows, cols, values).unwrap()
    }

    #[test]
    fn kernels_match_sequential_bitwise() {
        let x = sample(10_000, 9);
        let coeffs = sample(9, 4);
        let scales = [1.5, 2.0, 0.25, 3.0];
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        let (g, c) = pool.install(|| (Rayon.gram(&x), Rayon.combine(&x, &coeffs, &scales)));
        assert_eq!(g, Sequential.gram(&x));
        assert_eq!(c, Sequential.combine(&x, &coeffs, &scales));
    }
}
