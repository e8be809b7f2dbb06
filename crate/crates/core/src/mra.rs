//! Multireference alignment over cyclic shifts. Y_j is a shifted copy of a
//! common signal theta* plus noise; labels are shift offsets in [0, d) and
//! the block parameter is theta itself. Shifts stay integer offsets
//! throughout, so group algebra is index arithmetic.

use crate::iterate::{RecoveryError, RecoveryModel};
use crate::numerics::{dist_sq, DenseMatrix, Rng};

/// (U_t v)_i = v_{(i + t) mod d}.
pub fn apply_shift(offset: usize, v: &[f64]) -> Vec<f64> {
    let d = v.len();
    (0..d).map(|i| v[(i + offset) % d]).collect()
}

pub struct MraModel {
    /// d x p, one observation per column.
    y: DenseMatrix,
}

impl MraModel {
    pub fn new(y: DenseMatrix) -> Self {
        assert!(y.rows() >= 1 && y.cols() >= 1);
        MraModel { y }
    }

    pub fn d(&self) -> usize {
        self.y.rows()
    }

    pub fn p(&self) -> usize {
        self.y.cols()
    }

    pub fn observations(&self) -> &DenseMatrix {
        &self.y
    }

    fn col_shift_dist_sq(&self, j: usize, theta: &[f64], offset: usize) -> f64 {
        let d = self.d();
        let mut s = 0.0;
        for i in 0..d {
            let r = self.y.get(i, j) - theta[(i + offset) % d];
            s += r * r;
        }
        s
    }

    /// Align every observation to the first one: offset 0 for j = 1, and for
    /// the rest the shift whose inverse best matches Y_1.
    pub fn reference_init(&self) -> Vec<usize> {
        let d = self.d();
        let y1 = self.y.col_to_vec(0);
        let mut shifts = vec![0usize; self.p()];
        for j in 1..self.p() {
            let yj = self.y.col_to_vec(j);
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for t in 0..d {
                // || Y_1 - U_t^T Y_j ||^2 with U_t^T = U_{d-t}.
                let unshifted = apply_shift((d - t) % d, &yj);
                let dist = dist_sq(&y1, &unshifted);
                if dist < best_d {
                    best_d = dist;
                    best = t;
                }
            }
            shifts[j] = best;
        }
        shifts
    }
}

impl RecoveryModel for MraModel {
    type Label = usize;
    /// The common signal theta.
    type Block = Vec<f64>;

    fn num_coords(&self) -> usize {
        self.p()
    }

    fn alphabet_size(&self, _j: usize) -> usize {
        self.d()
    }

    fn label_at(&self, _j: usize, idx: usize) -> usize {
        idx
    }

    fn contains_label(&self, _j: usize, label: &usize) -> bool {
        *label < self.d()
    }

    fn fit_block(&self, labels: &[usize], _prev: Option<&Vec<f64>>) -> Result<Vec<f64>, RecoveryError> {
        // theta = (1/p) sum_j U_{t_j}^T Y_j; transposed shift is the inverse.
        let (d, p) = (self.d(), self.p());
        let mut theta = vec![0.0; d];
        for (j, &t) in labels.iter().enumerate() {
            for i in 0..d {
                theta[i] += self.y.get((i + d - t) % d, j);
            }
        }
        for v in &mut theta {
            *v /= p as f64;
        }
        Ok(theta)
    }

    fn assign_label(&self, j: usize, theta: &Vec<f64>) -> usize {
        let mut best = 0usize;
        let mut best_d = self.col_shift_dist_sq(j, theta, 0);
        for t in 1..self.d() {
            let dist = self.col_shift_dist_sq(j, theta, t);
            if dist < best_d {
                best_d = dist;
                best = t;
            }
        }
        best
    }

    fn block_summary(&self, theta: &Vec<f64>) -> Vec<f64> {
        vec![theta.iter().map(|v| v * v).sum::<f64>().sqrt()]
    }

    fn loss(&self, labels: &[usize], truth_labels: &[usize], theta_star: &Vec<f64>) -> f64 {
        // ||U_s theta - U_t theta||^2 depends only on (t - s) mod d.
        let d = self.d();
        let gap: Vec<f64> = (0..d)
            .map(|delta| dist_sq(theta_star, &apply_shift(delta, theta_star)))
            .collect();
        labels
            .iter()
            .zip(truth_labels)
            .map(|(&t, &t_star)| gap[(t + d - t_star) % d])
            .sum()
    }

    fn canonical_error(&self, labels: &[usize], truth_labels: &[usize]) -> f64 {
        let (d, p) = (self.d(), self.p());
        let mut best = p + 1;
        for u in 0..d {
            let miss = labels
                .iter()
                .zip(truth_labels)
                .filter(|(&t, &t_star)| (t + u) % d != t_star)
                .count();
            best = best.min(miss);
        }
        best as f64 / p as f64
    }
}

/// Smallest squared distance between theta and any nontrivial shift of
/// itself; zero iff theta has a nontrivial shift symmetry.
pub fn shift_separation_sq(theta: &[f64]) -> f64 {
    let d = theta.len();
    (1..d)
        .map(|delta| dist_sq(theta, &apply_shift(delta, theta)))
        .fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MraParams {
    pub d: usize,
    pub p: usize,
    /// Requested separation min_{U != I} ||(I - U) theta*||^2; the sampled
    /// signal is rescaled to hit it exactly.
    pub delta_min_sq: f64,
    pub noise_scale: f64,
}

pub struct MraInstance {
    pub model: MraModel,
    pub truth_labels: Vec<usize>,
    pub theta_star: Vec<f64>,
}

impl MraInstance {
    pub fn delta_min_sq(&self) -> f64 {
        shift_separation_sq(&self.theta_star)
    }
}

/// Gaussian draws below this separation (relative to dimension) are rejected
/// as effectively shift-symmetric before rescaling.
const SEPARATION_FLOOR_PER_DIM: f64 = 0.1;

pub fn sample(params: &MraParams, rng: &mut Rng) -> MraInstance {
    assert!(params.d >= 2, "shifts need at least two positions");
    assert!(params.delta_min_sq > 0.0);
    let mut theta = vec![0.0; params.d];
    loop {
        rng.fill_normal(&mut theta);
        let sep = shift_separation_sq(&theta);
        if sep >= SEPARATION_FLOOR_PER_DIM * params.d as f64 {
            let scale = (params.delta_min_sq / sep).sqrt();
            for v in &mut theta {
                *v *= scale;
            }
            break;
        }
    }

    let mut y = DenseMatrix::zeros(params.d, params.p);
    let mut truth = vec![0usize; params.p];
    for j in 0..params.p {
        let t = rng.uniform_below(params.d);
        truth[j] = t;
        for i in 0..params.d {
            y.set(i, j, theta[(i + t) % params.d] + params.noise_scale * rng.normal());
        }
    }
    MraInstance { model: MraModel::new(y), truth_labels: truth, theta_star: theta }
}
