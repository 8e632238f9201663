//! Fixed-order pairwise reductions.
//!
//! Ranges longer than [`LEAF`] are split at the midpoint and the two halves are
//! added; shorter ranges are summed left to right. The tree depends only on the
//! length of the input, which is what makes the parallel kernels bit-identical
//! to the sequential ones.

use alloc::vec;
use alloc::vec::Vec;

use super::DenseMatrix;

pub const LEAF: usize = 16;

pub fn sum(xs: &[f64]) -> f64 {
    if xs.len() <= LEAF {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        acc
    } else {
        let (lo, hi) = xs.split_at(xs.len() / 2);
        sum(lo) + sum(hi)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    if a.len() <= LEAF {
        let mut acc = 0.0;
        for i in 0..a.len() {
            acc += a[i] * b[i];
        }
        acc
    } else {
        let mid = a.len() / 2;
        dot(&a[..mid], &b[..mid]) + dot(&a[mid..], &b[mid..])
    }
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    if a.len() <= LEAF {
        let mut acc = 0.0;
        for i in 0..a.len() {
            let d = a[i] - b[i];
            acc += d * d;
        }
        acc
    } else {
        let mid = a.len() / 2;
        squared_distance(&a[..mid], &b[..mid]) + squared_distance(&a[mid..], &b[mid..])
    }
}

/// Entrywise sum of all columns, reduced pairwise over the column index.
pub fn column_sum(x: &DenseMatrix) -> Vec<f64> {
    let mut out = vec![0.0; x.rows()];
    column_sum_range(x, 0, x.cols(), &mut out);
    out
}

fn column_sum_range(x: &DenseMatrix, lo: usize, hi: usize, out: &mut [f64]) {
    if hi - lo <= LEAF {
        out.fill(0.0);
        for c in lo..hi {
            for (acc, v) in out.iter_mut().zip(x.column(c)) {
                *acc += v;
            }
        }
    } else {
        let mid = lo + (hi - lo) / 2;
        column_sum_range(x, lo, mid, out);
        let mut right = vec![0.0; out.len()];
        column_sum_range(x, mid, hi, &mut right);
        for (acc, v) in out.iter_mut().zip(&right) {
            *acc += v;
        }
    }
}
