//! Small dense linear solves used by the least-squares fits.

use super::matrix::DenseMatrix;
use super::NumericsError;

/// Solves G x = b for symmetric positive-definite G by Cholesky. Fails with
/// `SingularSystem` when a pivot is not strictly positive.
pub fn cholesky_solve(g: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>, NumericsError> {
    let n = g.rows();
    assert_eq!(g.cols(), n, "cholesky needs a square matrix");
    assert_eq!(b.len(), n);

    // Lower-triangular factor, row-major.
    let mut l = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = g.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return Err(NumericsError::SingularSystem { pivot: i });
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }

    // Forward then back substitution.
    let mut y = vec![0.0f64; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    let mut x = vec![0.0f64; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    Ok(x)
}

/// Upper bound estimate of the squared spectral norm of `a` (largest
/// eigenvalue of A^T A) by deterministic power iteration. Used for step-size
/// selection; a couple of percent of slack is added by the caller.
pub fn spectral_norm_sq_estimate(a: &DenseMatrix, iters: usize) -> f64 {
    let n = a.cols();
    if n == 0 || a.rows() == 0 {
        return 0.0;
    }
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut lambda = 0.0;
    for _ in 0..iters {
        let av = a.vec_mul(&v);
        let atav = a.transpose_vec_mul(&av);
        let nrm = atav.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nrm == 0.0 {
            return 0.0;
        }
        lambda = nrm;
        for (vi, g) in v.iter_mut().zip(&atav) {
            *vi = g / nrm;
        }
    }
    lambda
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng::Rng;

    #[test]
    fn solves_small_spd_system() {
        // G = [[4,2],[2,3]], b = [2,1] -> x = [0.5, 0]
        let g = DenseMatrix::from_row_major(2, 2, vec![4.0, 2.0, 2.0, 3.0]);
        let x = cholesky_solve(&g, &[2.0, 1.0]).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-12);
        assert!(x[1].abs() < 1e-12);
    }

    #[test]
    fn random_spd_round_trip() {
        let mut rng = Rng::seed_from_u64(17);
        for n in [1usize, 2, 5, 9] {
            let mut b = DenseMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    b.set(i, j, rng.normal());
                }
            }
            // G = B^T B + I is SPD.
            let mut g = b.transpose().matmul(&b);
            for i in 0..n {
                g.set(i, i, g.get(i, i) + 1.0);
            }
            let truth: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
            let rhs = g.vec_mul(&truth);
            let x = cholesky_solve(&g, &rhs).unwrap();
            for (a, b) in x.iter().zip(&truth) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rejects_singular_gram() {
        let g = DenseMatrix::from_row_major(2, 2, vec![1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(
            cholesky_solve(&g, &[1.0, 1.0]),
            Err(NumericsError::SingularSystem { .. })
        ));
    }

    #[test]
    fn power_iteration_bounds_spectral_norm() {
        let a = DenseMatrix::from_row_major(2, 2, vec![3.0, 0.0, 0.0, 1.0]);
        let est = spectral_norm_sq_estimate(&a, 60);
        assert!((est - 9.0).abs() < 1e-6, "est {est}");
    }
}
