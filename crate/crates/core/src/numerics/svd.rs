//! Truncated SVD computed from the eigendecomposition of the smaller Gram
//! matrix. For an m x n input this costs one min(m,n)-sized symmetric
//! eigensolve plus a handful of matrix-vector products.

use super::eig::sym_eig;
use super::matrix::{dot, DenseMatrix};
use super::NumericsError;

pub const DEFAULT_SVD_TOL: f64 = 1e-10;

// Singular values below this fraction of ||A||_F are treated as zero: their
// Gram eigenvalues sit at roundoff level (eps * ||A||^2), so dividing by them
// would amplify noise. The matching singular vectors come from null-space
// completion instead.
const NEGLIGIBLE_SIGMA_FRAC: f64 = 1e-7;

pub struct Svd {
    /// rows x r, orthonormal columns.
    pub u: DenseMatrix,
    /// r singular values, non-increasing, non-negative.
    pub s: Vec<f64>,
    /// cols x r, orthonormal columns.
    pub v: DenseMatrix,
}

/// Leading `r` singular triplets of `a`. Requires r <= min(rows, cols).
pub fn truncated_svd(a: &DenseMatrix, r: usize, tol: f64) -> Result<Svd, NumericsError> {
    let (m, n) = (a.rows(), a.cols());
    let small = m.min(n);
    if r > small {
        return Err(NumericsError::RankTooLarge { requested: r, dim: small });
    }
    let norm = a.frobenius_norm();
    let cutoff = NEGLIGIBLE_SIGMA_FRAC * norm;

    // Gram on the smaller side; its eigenvalues are squared singular values.
    let gram_on_rows = m <= n;
    let mut gram = DenseMatrix::zeros(small, small);
    if gram_on_rows {
        for i in 0..m {
            for j in i..m {
                let g = dot(a.row(i), a.row(j));
                gram.set(i, j, g);
                gram.set(j, i, g);
            }
        }
    } else {
        for i in 0..n {
            for j in i..n {
                let g = a.col_dot(i, j);
                gram.set(i, j, g);
                gram.set(j, i, g);
            }
        }
    }

    let (lambdas, w) = sym_eig(&gram, r, tol)?;
    let s: Vec<f64> = lambdas.iter().map(|l| l.max(0.0).sqrt()).collect();

    let (mut u, mut v) = if gram_on_rows {
        (w, DenseMatrix::zeros(n, r))
    } else {
        (DenseMatrix::zeros(m, r), w)
    };

    for c in 0..r {
        if s[c] > cutoff {
            if gram_on_rows {
                // v_c = A^T u_c / s_c
                let uc = u.col_to_vec(c);
                let vc = a.transpose_vec_mul(&uc);
                for i in 0..n {
                    v.set(i, c, vc[i] / s[c]);
                }
            } else {
                let vc = v.col_to_vec(c);
                let uc = a.vec_mul(&vc);
                for i in 0..m {
                    u.set(i, c, uc[i] / s[c]);
                }
            }
        } else {
            // Null-direction: any unit vector orthogonal to the columns
            // already placed works, because those span the row (resp. column)
            // space of a.
            if gram_on_rows {
                complete_column(&mut v, c);
            } else {
                complete_column(&mut u, c);
            }
        }
    }

    #[cfg(debug_assertions)]
    for c in 0..r {
        let vc = v.col_to_vec(c);
        let uc = u.col_to_vec(c);
        let av = a.vec_mul(&vc);
        let resid: f64 = av
            .iter()
            .zip(&uc)
            .map(|(x, y)| (x - s[c] * y).powi(2))
            .sum::<f64>()
            .sqrt();
        let bound = if s[c] > cutoff { tol * (1.0 + norm) } else { cutoff * (1.0 + 2.0 * tol) };
        debug_assert!(resid <= bound.max(tol), "triplet {c} residual {resid} > {bound}");
    }

    Ok(Svd { u, s, v })
}

// Overwrites column c with a unit vector orthogonal to columns 0..c, found by
// Gram-Schmidt over the canonical basis. Deterministic.
fn complete_column(mat: &mut DenseMatrix, c: usize) {
    let dim = mat.rows();
    for basis in 0..dim {
        let mut cand = vec![0.0; dim];
        cand[basis] = 1.0;
        // Two orthogonalization passes for numerical safety.
        for _ in 0..2 {
            for prev in 0..c {
                let pc = mat.col_to_vec(prev);
                let coef = dot(&cand, &pc);
                for i in 0..dim {
                    cand[i] -= coef * pc[i];
                }
            }
        }
        let nrm = dot(&cand, &cand).sqrt();
        if nrm > 0.5 {
            for i in 0..dim {
                mat.set(i, c, cand[i] / nrm);
            }
            return;
        }
    }
    unreachable!("fewer than dim orthonormal columns requested");
}
