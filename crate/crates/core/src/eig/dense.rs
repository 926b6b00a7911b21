//! Small dense Hermitian eigenproblems.

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::{Error, Result};

pub type Dense = Vec<Vec<Complex64>>;

fn to_mat(a: &Dense) -> Mat<Complex64> {
    Mat::from_fn(a.len(), a.len(), |i, j| 0.5 * (a[i][j] + a[j][i].conj()))
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(a: &Dense) -> Result<(Vec<f64>, Dense)> {
    let n = a.len();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let evd = to_mat(a)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Singular(format!("dense eigensolve failed: {e:?}")))?;
    let vals = (0..n).map(|i| evd.S()[i].re).collect();
    let vecs = (0..n)
        .map(|c| (0..n).map(|r| evd.U()[(r, c)]).collect())
        .collect();
    Ok((vals, vecs))
}

/// Solves `A x = λ B x` for Hermitian `A` and Hermitian positive definite `B`.
///
/// Eigenvectors are B-orthonormal.
pub fn generalized_eigen(a: &Dense, b: &Dense) -> Result<(Vec<f64>, Dense)> {
    let n = a.len();
    if b.len() != n {
        return Err(Error::InvalidParameter("pencil dimensions differ".into()));
    }
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let llt = to_mat(b)
        .llt(Side::Lower)
        .map_err(|_| Error::Singular("mass matrix is not positive definite".into()))?;
    let l = llt.L();
    // C = L⁻¹ A L⁻ᴴ, column by column
    let lower_solve = |rhs: &mut [Complex64]| {
        for i in 0..n {
            let mut s = rhs[i];
            for k in 0..i {
                s -= l[(i, k)] * rhs[k];
            }
            rhs[i] = s / l[(i, i)];
        }
    };
    let mut x: Dense = (0..n).map(|j| (0..n).map(|i| a[i][j]).collect()).collect();
    for col in x.iter_mut() {
        lower_solve(col);
    }
    // x holds columns of L⁻¹A; C = (L⁻¹ (L⁻¹A)ᴴ)ᴴ
    let mut y: Dense = (0..n)
        .map(|i| (0..n).map(|j| x[j][i].conj()).collect())
        .collect();
    for col in y.iter_mut() {
        lower_solve(col);
    }
    let c: Dense = (0..n)
        .map(|i| (0..n).map(|j| y[i][j].conj()).collect())
        .collect();
    let (vals, z) = hermitian_eigen(&c)?;
    // x = L⁻ᴴ z
    let vecs = z
        .into_iter()
        .map(|mut v| {
            for i in (0..n).rev() {
                let mut s = v[i];
                for k in i + 1..n {
                    s -= l[(k, i)].conj() * v[k];
                }
                v[i] = s / l[(i, i)].conj();
            }
            v
        })
        .collect();
    Ok((vals, vecs))
}

/// Largest eigenvalue of a real symmetric matrix.
pub fn max_eigenvalue(a: &[Vec<f64>]) -> Result<f64> {
    let c: Dense = a
        .iter()
        .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
        .collect();
    let (vals, _) = hermitian_eigen(&c)?;
    vals.last()
        .copied()
        .ok_or_else(|| Error::InvalidParameter("empty matrix".into()))
}
