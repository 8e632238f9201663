#![allow(dead_code)]

use edrm_core::{DenseMatrix, DenseVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_col_major(rows, cols, gaussian_vec(rng, rows * cols)).unwrap()
}

pub fn vector(values: Vec<f64>) -> DenseVector {
    DenseVector::new(values).unwrap()
}

/// Double-double accumulator: keeps roughly 106 bits through a running sum.
#[derive(Default, Clone, Copy)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    pub fn add(&mut self, x: f64) {
        let (s, e) = Self::two_sum(self.hi, x);
        let (hi, lo) = Self::two_sum(s, e + self.lo);
        self.hi = hi;
        self.lo = lo;
    }

    /// Adds the exact product `a·b`.
    pub fn add_product(&mut self, a: f64, b: f64) {
        let p = a * b;
        let err = a.mul_add(b, -p);
        self.add(p);
        self.add(err);
    }

    /// Adds `(a - b)²` exactly up to double-double precision.
    pub fn add_squared_difference(&mut self, a: f64, b: f64) {
        let (d, e) = Self::two_sum(a, -b);
        self.add_product(d, d);
        self.add(2.0 * d * e);
        self.add_product(e, e);
    }

    pub fn value(&self) -> f64 {
        self.hi + self.lo
    }
}

pub fn oracle_squared_distance(x: &[f64], y: &[f64]) -> f64 {
    let mut acc = DoubleDouble::default();
    for (a, b) in x.iter().zip(y) {
        acc.add_squared_difference(*a, *b);
    }
    acc.value()
}

pub fn oracle_mean(x: &DenseMatrix) -> Vec<f64> {
    (0..x.rows())
        .map(|r| {
            let mut acc = DoubleDouble::default();
            for c in 0..x.cols() {
                acc.add(x.get(r, c));
            }
            acc.value() / x.cols() as f64
        })
        .collect()
}

pub fn to_nalgebra(x: &DenseMatrix) -> nalgebra::DMatrix<f64> {
    nalgebra::DMatrix::from_column_slice(x.rows(), x.cols(), x.as_col_major())
}

/// Eigenpairs of a symmetric matrix from nalgebra, sorted descending.
pub fn oracle_symmetric_eigen(a: nalgebra::DMatrix<f64>) -> Vec<(f64, Vec<f64>)> {
    let eig = a.symmetric_eigen();
    let mut pairs: Vec<(f64, Vec<f64>)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, eig.eigenvectors.column(i).iter().copied().collect()))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs
}

/// Singular values of `x` as square roots of the eigenvalues of the `rows × rows`
/// outer-product matrix `XXᵀ`, with matching left singular vectors.
pub fn oracle_svd(x: &DenseMatrix) -> Vec<(f64, Vec<f64>)> {
    let m = to_nalgebra(x);
    let outer = &m * m.transpose();
    oracle_symmetric_eigen(outer)
        .into_iter()
        .map(|(l, v)| (l.max(0.0).sqrt(), v))
        .collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn max_orthonormality_error(u: &DenseMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..u.cols() {
        for j in 0..u.cols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot(u.column(i), u.column(j)) - target).abs());
        }
    }
    worst
}
