//! Eigenvalues of symmetric matrices via the cyclic Jacobi method.
//!
//! Sweeps rotate every strict upper-triangle entry toward zero until the
//! off-diagonal Frobenius norm drops below an absolute tolerance. Only
//! eigenvalues are accumulated; eigenvectors are never formed.

use crate::error::{Error, Result};

/// Convergence target for the off-diagonal Frobenius norm.
const OFF_DIAGONAL_TOL: f64 = 1e-10;
/// Hard cap on full sweeps before giving up.
const MAX_SWEEPS: usize = 64;

/// Computes all eigenvalues of a symmetric `n x n` matrix given in
/// row-major order, sorted descending.
///
/// # Errors
/// The input must be square, non-empty, finite, and symmetric to within
/// `1e-9`; iteration must converge within the sweep budget.
pub fn symmetric_eigenvalues(matrix: &[f64], n: usize) -> Result<Vec<f64>> {
    if n == 0 || matrix.len() != n * n {
        return Err(Error::InvalidInput(format!(
            "expected a non-empty square matrix, got {} entries for n={n}",
            matrix.len()
        )));
    }
    let mut a = matrix.to_vec();
    for i in 0..n {
        for j in 0..n {
            let v = a[i * n + j];
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "matrix entry ({i}, {j}) is not finite"
                )));
            }
            if (v - a[j * n + i]).abs() > 1e-9 {
                return Err(Error::InvalidInput(format!(
                    "matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    if n == 1 {
        return Ok(vec![a[0]]);
    }

    let off_norm = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    for _ in 0..MAX_SWEEPS {
        if off_norm(&a) <= OFF_DIAGONAL_TOL {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                // Rotation angle that annihilates a[p][q].
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    if off_norm(&a) > OFF_DIAGONAL_TOL {
        return Err(Error::Degenerate(format!(
            "Jacobi iteration did not converge within {MAX_SWEEPS} sweeps"
        )));
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(eig)
}
