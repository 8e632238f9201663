use alloc::format;
use alloc::vec::Vec;

use super::{canonicalize_sign, DenseMatrix};
use crate::error::{Error, Result};

pub const JACOBI_MAX_SWEEPS: usize = 100;

const SYMMETRY_TOL: f64 = 1e-10;

/// Eigenpairs of a symmetric matrix, eigenvalues in non-increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors, one per column, in eigenvalue order.
    pub eigenvectors: DenseMatrix,
}

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Iterates until the off-diagonal Frobenius mass is at most `tol · ‖A‖_F`.
/// Each eigenvector is sign-normalized with [`canonicalize_sign`].
pub fn symmetric_eigen_descending(a: &DenseMatrix, tol: f64) -> Result<SymmetricEigen> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::invalid(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            n,
            a.cols()
        )));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::invalid(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let scale = a.max_abs();
    for c in 0..n {
        for r in (c + 1)..n {
            if (a.get(r, c) - a.get(c, r)).abs() > SYMMETRY_TOL * scale {
                return Err(Error::invalid(format!(
                    "matrix is not symmetric at ({r}, {c})"
                )));
            }
        }
    }

    let mut m = a.as_col_major().to_vec();
    let mut v = DenseMatrix::identity(n)?.into_col_major();
    let threshold = tol * a.frobenius_norm();

    let mut converged = false;
    for sweep in 0..=JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&m, n) <= threshold {
            converged = true;
            break;
        }
        if sweep == JACOBI_MAX_SWEEPS {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, n, p, q, sweep);
            }
        }
    }
    if !converged {
        return Err(Error::NumericalFailure(format!(
            "Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal eigenvalues keep their diagonal order
    order.sort_by(|&i, &j| m[j * n + j].total_cmp(&m[i * n + i]));

    let eigenvalues = order.iter().map(|&i| m[i * n + i]).collect();
    let mut vectors = Vec::with_capacity(n * n);
    for &i in &order {
        let start = vectors.len();
        vectors.extend_from_slice(&v[i * n..(i + 1) * n]);
        canonicalize_sign(&mut vectors[start..]);
    }
    Ok(SymmetricEigen {
        eigenvalues,
        eigenvectors: DenseMatrix::from_col_major_unchecked(n, n, vectors),
    })
}

fn off_diagonal_norm(m: &[f64], n: usize) -> f64 {
    let mut acc = 0.0;
    for c in 0..n {
        for r in (c + 1)..n {
            let x = m[c * n + r];
            acc += x * x;
        }
    }
    libm::sqrt(2.0 * acc)
}

/// Applies the rotation that annihilates `m[p, q]`, i.e. `m ← Jᵀ m J`, `v ← v J`.
fn rotate(m: &mut [f64], v: &mut [f64], n: usize, p: usize, q: usize, sweep: usize) {
    let apq = m[q * n + p];
    if apq == 0.0 {
        return;
    }
    let app = m[p * n + p];
    let aqq = m[q * n + q];
    // Past the first few sweeps, drop elements that cannot change either diagonal.
    let g = 100.0 * apq.abs();
    if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
        m[q * n + p] = 0.0;
        m[p * n + q] = 0.0;
        return;
    }

    let theta = (aqq - app) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let t = 1.0 / (theta.abs() + libm::sqrt(theta * theta + 1.0));
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / libm::sqrt(t * t + 1.0);
    let s = t * c;

    for k in 0..n {
        let mkp = m[p * n + k];
        let mkq = m[q * n + k];
        m[p * n + k] = c * mkp - s * mkq;
        m[q * n + k] = s * mkp + c * mkq;
    }
    for k in 0..n {
        let mpk = m[k * n + p];
        let mqk = m[k * n + q];
        m[k * n + p] = c * mpk - s * mqk;
        m[k * n + q] = s * mpk + c * mqk;
    }
    m[p * n + p] = app - t * apq;
    m[q * n + q] = aqq + t * apq;
    m[q * n + p] = 0.0;
    m[p * n + q] = 0.0;

    for k in 0..n {
        let vkp = v[p * n + k];
        let vkq = v[q * n + k];
        v[p * n + k] = c * vkp - s * vkq;
        v[q * n + k] = s * vkp + c * vkq;
    }
}
