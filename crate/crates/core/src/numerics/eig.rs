//! Symmetric eigendecomposition: Householder tridiagonalization followed by
//! implicit-shift QL, the classic EISPACK tred2/tql2 pair. O(n^3) with full
//! eigenvector accumulation, which keeps the spectral initializers fast at
//! desk scale (a 400x400 decomposition is a few hundredths of a second).

use super::matrix::DenseMatrix;
use super::NumericsError;

pub const DEFAULT_EIG_TOL: f64 = 1e-10;

/// Eigenvalues and eigenvectors of a symmetric matrix, sorted by descending
/// |lambda|, truncated to the leading `top_r` pairs. Eigenvectors are the
/// columns of the returned matrix.
///
/// `tol` is relative: the input must satisfy max|A_ij - A_ji| <= tol * (1 + ||A||_F),
/// and each returned pair satisfies ||A v - lambda v|| <= tol * ||A||_F.
pub fn sym_eig(
    a: &DenseMatrix,
    top_r: usize,
    tol: f64,
) -> Result<(Vec<f64>, DenseMatrix), NumericsError> {
    let n = a.rows();
    if a.cols() != n {
        return Err(NumericsError::NotSquare { rows: n, cols: a.cols() });
    }
    if top_r > n {
        return Err(NumericsError::RankTooLarge { requested: top_r, dim: n });
    }
    let norm = a.frobenius_norm();
    let asym = a.max_asymmetry();
    if asym > tol * (1.0 + norm) {
        return Err(NumericsError::NotSymmetric { max_asymmetry: asym });
    }
    if n == 0 {
        return Ok((vec![], DenseMatrix::zeros(0, 0)));
    }

    // Work on the symmetrized copy; row-major n x n.
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| 0.5 * (a.get(i, j) + a.get(j, i))).collect())
        .collect();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];

    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e)?;

    // Order by |lambda| descending; ties by value then index for determinism.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        d[j].abs()
            .partial_cmp(&d[i].abs())
            .unwrap()
            .then(d[j].partial_cmp(&d[i]).unwrap())
            .then(i.cmp(&j))
    });

    let values: Vec<f64> = order.iter().take(top_r).map(|&i| d[i]).collect();
    let mut vectors = DenseMatrix::zeros(n, top_r);
    for (c, &src) in order.iter().take(top_r).enumerate() {
        for r in 0..n {
            vectors.set(r, c, v[r][src]);
        }
    }

    #[cfg(debug_assertions)]
    for c in 0..top_r {
        let col = vectors.col_to_vec(c);
        let mut resid = 0.0;
        for i in 0..n {
            let mut av = 0.0;
            for j in 0..n {
                av += 0.5 * (a.get(i, j) + a.get(j, i)) * col[j];
            }
            resid += (av - values[c] * col[i]).powi(2);
        }
        debug_assert!(
            resid.sqrt() <= tol * (1.0 + norm),
            "eigenpair {c} residual {} exceeds {}",
            resid.sqrt(),
            tol * (1.0 + norm)
        );
    }

    Ok((values, vectors))
}

// Householder reduction to tridiagonal form; d gets the diagonal, e the
// subdiagonal, v the accumulated orthogonal transformation.
fn tred2(v: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    d.copy_from_slice(&v[n - 1].clone());

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for item in d.iter().take(i) {
            scale += item.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
                v[j][i] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[j][i] = f;
                g = e[j] + v[j][j] * f;
                for k in (j + 1)..i {
                    g += v[k][j] * d[k];
                    e[k] += v[k][j] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k][j] -= f * e[k] + g * d[k];
                }
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..(n - 1) {
        v[n - 1][i] = v[i][i];
        v[i][i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[k][i + 1] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k][i + 1] * v[k][j];
                }
                for k in 0..=i {
                    v[k][j] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[k][i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
        v[n - 1][j] = 0.0;
    }
    v[n - 1][n - 1] = 1.0;
    e[0] = 0.0;
}

const QL_MAX_ITER_PER_EIGENVALUE: usize = 60;

// Implicit-shift QL on the tridiagonal (d, e), rotations accumulated into v.
fn tql2(v: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) -> Result<(), NumericsError> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0f64;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m == n {
            m = n - 1;
        }

        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > QL_MAX_ITER_PER_EIGENVALUE {
                    return Err(NumericsError::NoConvergence {
                        context: "symmetric QL eigenvalue iteration",
                    });
                }

                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for row in v.iter_mut().take(n) {
                        h = row[i + 1];
                        row[i + 1] = s * row[i] + c * h;
                        row[i] = c * row[i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}
