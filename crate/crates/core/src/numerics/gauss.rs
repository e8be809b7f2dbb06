use super::matrix::DenseMatrix;
use super::rng::Rng;

/// Matrix with iid standard normal entries, filled in row-major stream order.
pub fn gaussian_matrix(rng: &mut Rng, rows: usize, cols: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, rng.normal());
        }
    }
    m
}

/// Symmetric matrix: upper triangle iid standard normal, mirrored below.
/// The diagonal is zeroed when `zero_diag`, otherwise drawn like any entry.
pub fn symmetric_gaussian(rng: &mut Rng, p: usize, zero_diag: bool) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(p, p);
    for i in 0..p {
        for j in i..p {
            if i == j {
                if !zero_diag {
                    m.set(i, i, rng.normal());
                }
            } else {
                let w = rng.normal();
                m.set(i, j, w);
                m.set(j, i, w);
            }
        }
    }
    m
}
