//! Brute-force certification of the engine's one-step map: enumerate every
//! labeling, recompute one fit + assign round by direct evaluation of the
//! per-coordinate surrogate objectives, and tabulate. The steppers here stay
//! textually separate from the model implementations; they assume the
//! instance conventions of the samplers (zero diagonals where applicable).

use crate::gmm::GmmModel;
use crate::groupsync::{PermSyncModel, Z2Model, ZkModel};
use crate::iterate::RecoveryModel;
use crate::mra::MraModel;
use crate::ranking::RankModel;
use crate::signrec::SignModel;
use crate::numerics::{all_permutations, DenseMatrix};

/// Largest enumerable label space, prod_j alphabet_size(j).
pub const BRUTE_FORCE_CAP: usize = 4096;

/// One fit + assign image for every labeling, in mixed-radix enumeration
/// order (last coordinate fastest). Failures carry the same short codes the
/// sweep driver records.
pub struct FixedPointTable<L> {
    pub rows: Vec<(Vec<L>, Result<Vec<L>, String>)>,
}

/// Models that admit a direct-evaluation reference step.
pub trait OracleStep: RecoveryModel {
    fn oracle_step(&self, labels: &[Self::Label]) -> Result<Vec<Self::Label>, String>;
}

/// Every labeling of the model's coordinates, mixed radix over the
/// per-coordinate alphabets. Panics past [`BRUTE_FORCE_CAP`].
pub fn enumerate_labelings<M: RecoveryModel + ?Sized>(model: &M) -> Vec<Vec<M::Label>> {
    let p = model.num_coords();
    let mut total = 1usize;
    for j in 0..p {
        total = total
            .checked_mul(model.alphabet_size(j))
            .filter(|&t| t <= BRUTE_FORCE_CAP)
            .unwrap_or_else(|| panic!("label space exceeds the brute-force cap {BRUTE_FORCE_CAP}"));
    }
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; p];
    loop {
        out.push((0..p).map(|j| model.label_at(j, idx[j])).collect());
        let mut j = p;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < model.alphabet_size(j) {
                break;
            }
            idx[j] = 0;
        }
    }
}

pub fn brute_force_map<M: OracleStep + ?Sized>(model: &M) -> FixedPointTable<M::Label> {
    let rows = enumerate_labelings(model)
        .into_iter()
        .map(|z| {
            let image = model.oracle_step(&z);
            (z, image)
        })
        .collect();
    FixedPointTable { rows }
}

impl OracleStep for GmmModel {
    fn oracle_step(&self, labels: &[usize]) -> Result<Vec<usize>, String> {
        let y = self.observations();
        let (d, p, k) = (y.rows(), y.cols(), self.k());
        let mut sums = vec![vec![0.0f64; d]; k];
        let mut counts = vec![0usize; k];
        for j in 0..p {
            counts[labels[j]] += 1;
            for i in 0..d {
                sums[labels[j]][i] += y.get(i, j);
            }
        }
        let mut global = vec![0.0f64; d];
        for j in 0..p {
            for i in 0..d {
                global[i] += y.get(i, j);
            }
        }
        for g in global.iter_mut() {
            *g /= p as f64;
        }
        let centers: Vec<Vec<f64>> = (0..k)
            .map(|a| {
                if counts[a] > 0 {
                    (0..d).map(|i| sums[a][i] / counts[a] as f64).collect()
                } else {
                    global.clone()
                }
            })
            .collect();
        Ok((0..p)
            .map(|j| {
                let mut best = 0usize;
                let mut best_d = f64::INFINITY;
                for (a, c) in centers.iter().enumerate() {
                    let mut dist = 0.0;
                    for i in 0..d {
                        let r = y.get(i, j) - c[i];
                        dist += r * r;
                    }
                    if dist < best_d {
                        best_d = dist;
                        best = a;
                    }
                }
                best
            })
            .collect())
    }
}

impl OracleStep for RankModel {
    fn oracle_step(&self, labels: &[usize]) -> Result<Vec<usize>, String> {
        let y = self.observations();
        let p = y.rows();
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..p {
            for j in 0..p {
                if i != j {
                    let diff = labels[i] as f64 - labels[j] as f64;
                    num += diff * y.get(i, j);
                    den += diff * diff;
                }
            }
        }
        if den == 0.0 {
            return Err("degenerate-labels".into());
        }
        let beta = num / den;
        let center = (p as f64 + 1.0) / 2.0;
        Ok((0..p)
            .map(|j| {
                let mut s = 0.0;
                for i in 0..p {
                    if i != j {
                        s += y.get(j, i) - y.get(i, j);
                    }
                }
                let mut best = 1usize;
                let mut best_d = f64::INFINITY;
                for a in 1..=p {
                    let nu = 2.0 * p as f64 * beta * (a as f64 - center);
                    let dist = (s - nu) * (s - nu);
                    if dist < best_d {
                        best_d = dist;
                        best = a;
                    }
                }
                best
            })
            .collect())
    }
}

impl OracleStep for MraModel {
    fn oracle_step(&self, labels: &[usize]) -> Result<Vec<usize>, String> {
        let y = self.observations();
        let (d, p) = (y.rows(), y.cols());
        let mut theta = vec![0.0f64; d];
        for (j, &t) in labels.iter().enumerate() {
            for i in 0..d {
                theta[i] += y.get((i + d - t) % d, j);
            }
        }
        for v in &mut theta {
            *v /= p as f64;
        }
        Ok((0..p)
            .map(|j| {
                let mut best = 0usize;
                let mut best_d = f64::INFINITY;
                for t in 0..d {
                    let mut dist = 0.0;
                    for i in 0..d {
                        let r = y.get(i, j) - theta[(i + t) % d];
                        dist += r * r;
                    }
                    if dist < best_d {
                        best_d = dist;
                        best = t;
                    }
                }
                best
            })
            .collect())
    }
}

impl OracleStep for Z2Model {
    fn oracle_step(&self, labels: &[i8]) -> Result<Vec<i8>, String> {
        let y = self.observations();
        let p = y.rows();
        let mut s = 0.0;
        for i in 0..p {
            for j in 0..p {
                s += labels[i] as f64 * y.get(i, j) * labels[j] as f64;
            }
        }
        let lambda = s / (p as f64 * p as f64);
        Ok((0..p)
            .map(|j| {
                let mut best = 1i8;
                let mut best_d = f64::INFINITY;
                for a in [1i8, -1] {
                    let mut dist = 0.0;
                    for i in 0..p {
                        let r = y.get(i, j) - lambda * a as f64 * labels[i] as f64;
                        dist += r * r;
                    }
                    if dist < best_d {
                        best_d = dist;
                        best = a;
                    }
                }
                best
            })
            .collect())
    }
}

impl OracleStep for ZkModel {
    fn oracle_step(&self, labels: &[usize]) -> Result<Vec<usize>, String> {
        let y = self.observations();
        let (p, k) = (y.rows(), self.k());
        let g = |a: usize, b: usize| ((a + k - b) % k) as f64;
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..p {
            for j in 0..p {
                if i != j {
                    num += y.get(i, j) * g(labels[i], labels[j]);
                    den += g(labels[i], labels[j]) * g(labels[i], labels[j]);
                }
            }
        }
        if den == 0.0 {
            return Err("degenerate-labels".into());
        }
        let lambda = num / den;
        Ok((0..p)
            .map(|j| {
                let mut best = 0usize;
                let mut best_d = f64::INFINITY;
                for a in 0..k {
                    let mut dist = 0.0;
                    for i in 0..p {
                        let r = y.get(i, j) - lambda * g(labels[i], a);
                        dist += r * r;
                    }
                    if dist < best_d {
                        best_d = dist;
                        best = a;
                    }
                }
                best
            })
            .collect())
    }
}

impl OracleStep for PermSyncModel {
    fn oracle_step(&self, labels: &[Vec<usize>]) -> Result<Vec<Vec<usize>>, String> {
        let y = self.observations();
        let (p, d) = (self.p(), self.d());
        let mut inner = 0.0;
        for i in 0..p {
            for j in 0..p {
                if i != j {
                    for m in 0..d {
                        inner += y.get(i * d + labels[i][m], j * d + labels[j][m]);
                    }
                }
            }
        }
        let lambda = inner / (p * p * d) as f64;
        let candidates = all_permutations(d);
        Ok((0..p)
            .map(|j| {
                let mut best = candidates[0].clone();
                let mut best_d = f64::INFINITY;
                for u in &candidates {
                    // sum_i ||Y_ij - lambda Z_i U'||^2 evaluated entrywise.
                    let mut dist = 0.0;
                    for i in 0..p {
                        for r in 0..d {
                            for c in 0..d {
                                let signal =
                                    if (0..d).any(|m| labels[i][m] == r && u[m] == c) { 1.0 } else { 0.0 };
                                let res = y.get(i * d + r, j * d + c) - lambda * signal;
                                dist += res * res;
                            }
                        }
                    }
                    if dist < best_d {
                        best_d = dist;
                        best = u.clone();
                    }
                }
                best
            })
            .collect())
    }
}

/// Solve `g x = b` by Gaussian elimination with partial pivoting; `None` on a
/// vanishing pivot. Kept separate from the Cholesky path used by the model.
fn solve_dense(g: &DenseMatrix, b: &[f64]) -> Option<Vec<f64>> {
    let m = b.len();
    let mut a = vec![vec![0.0f64; m + 1]; m];
    for r in 0..m {
        for c in 0..m {
            a[r][c] = g.get(r, c);
        }
        a[r][m] = b[r];
    }
    for col in 0..m {
        let pivot = (col..m).max_by(|&r1, &r2| a[r1][col].abs().partial_cmp(&a[r2][col].abs()).unwrap())?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        for r in (col + 1)..m {
            let f = a[r][col] / a[col][col];
            for c in col..=m {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    let mut x = vec![0.0f64; m];
    for col in (0..m).rev() {
        let mut v = a[col][m];
        for c in (col + 1)..m {
            v -= a[col][c] * x[c];
        }
        x[col] = v / a[col][col];
    }
    Some(x)
}

impl OracleStep for SignModel {
    fn oracle_step(&self, labels: &[i8]) -> Result<Vec<i8>, String> {
        let (x, yv) = (self.x(), self.y());
        let (n, p) = (x.rows(), x.cols());
        let support: Vec<usize> = (0..p).filter(|&j| labels[j] != 0).collect();
        let m = support.len();

        let solve_with = |ridge: f64| -> Option<Vec<f64>> {
            let mut gram = DenseMatrix::zeros(m, m);
            for a in 0..m {
                for b in 0..m {
                    let mut v = 0.0;
                    for r in 0..n {
                        v += x.get(r, support[a]) * x.get(r, support[b]);
                    }
                    if a == b {
                        v += ridge;
                    }
                    gram.set(a, b, v);
                }
            }
            let rhs: Vec<f64> = support
                .iter()
                .map(|&j| (0..n).map(|r| x.get(r, j) * yv[r]).sum())
                .collect();
            solve_dense(&gram, &rhs)
        };
        let coef = if m > n {
            solve_with(1e-10).ok_or("numerics")?
        } else {
            solve_with(0.0).or_else(|| solve_with(1e-10)).ok_or("numerics")?
        };
        let mut beta = vec![0.0f64; p];
        for (a, &j) in support.iter().enumerate() {
            beta[j] = coef[a];
        }

        let mut residual = vec![0.0f64; n];
        for r in 0..n {
            let mut fit = 0.0;
            for j in 0..p {
                fit += x.get(r, j) * beta[j];
            }
            residual[r] = yv[r] - fit;
        }
        let lambda = self.lambda();
        let prior = ((p - self.s()) as f64 / self.s() as f64).ln();
        Ok((0..p)
            .map(|j| {
                let mut nsq = 0.0;
                let mut corr = 0.0;
                for r in 0..n {
                    nsq += x.get(r, j) * x.get(r, j);
                    corr += x.get(r, j) * residual[r];
                }
                let u = beta[j] + corr / nsq;
                let t = lambda / 2.0 + prior / (lambda * nsq);
                if u.abs() > t {
                    if u > 0.0 {
                        1
                    } else {
                        -1
                    }
                } else {
                    0
                }
            })
            .collect())
    }
}
