//! Approximate ranking from pairwise comparisons. Y_ij is a noisy reading of
//! beta * (rank_i - rank_j); labels are positions 1..=p; the block parameter
//! is the scalar strength beta.

use crate::iterate::{RecoveryError, RecoveryModel};
use crate::numerics::{DenseMatrix, Rng};

// Below this, the per-coordinate argmin falls back to a full scan instead of
// the rounding shortcut; the shortcut's division is only trustworthy for
// solidly positive beta.
const ROUNDING_MIN_BETA: f64 = 1e-12;

pub struct RankModel {
    y: DenseMatrix,
    /// Normalized column statistics T_j = sum_{i != j} (Y_ji - Y_ij) / sqrt(2(p-1)).
    t_stats: Vec<f64>,
}

impl RankModel {
    pub fn new(y: DenseMatrix) -> Self {
        let p = y.rows();
        assert_eq!(y.cols(), p, "pairwise comparisons form a square matrix");
        assert!(p >= 2, "ranking needs at least two items");
        let norm = (2.0 * (p as f64 - 1.0)).sqrt();
        let t_stats = (0..p)
            .map(|j| {
                let mut s = 0.0;
                for i in 0..p {
                    if i != j {
                        s += y.get(j, i) - y.get(i, j);
                    }
                }
                s / norm
            })
            .collect();
        RankModel { y, t_stats }
    }

    pub fn p(&self) -> usize {
        self.y.rows()
    }

    pub fn t_stats(&self) -> &[f64] {
        &self.t_stats
    }

    pub fn observations(&self) -> &DenseMatrix {
        &self.y
    }

    /// Raw (unnormalized) statistic sum_{i != j} (Y_ji - Y_ij).
    fn raw_stat(&self, j: usize) -> f64 {
        self.t_stats[j] * (2.0 * (self.p() as f64 - 1.0)).sqrt()
    }

    /// Initial ranks: order the column statistics ascending, ties by index.
    pub fn rank_init(&self) -> Vec<usize> {
        let p = self.p();
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&i, &j| {
            self.t_stats[i]
                .partial_cmp(&self.t_stats[j])
                .unwrap()
                .then(i.cmp(&j))
        });
        let mut ranks = vec![0usize; p];
        for (r, &idx) in order.iter().enumerate() {
            ranks[idx] = r + 1;
        }
        ranks
    }

    fn assign(&self, j: usize, beta: f64) -> usize {
        let p = self.p();
        let s = self.raw_stat(j);
        let scale = 2.0 * p as f64 * beta;
        let center = (p as f64 + 1.0) / 2.0;
        let nu = |a: usize| scale * (a as f64 - center);
        if beta > ROUNDING_MIN_BETA {
            // Candidates are equally spaced and increasing in a, so the argmin
            // is one of the two integers bracketing the unconstrained solution;
            // the tie lands on the smaller label.
            let ideal = s / scale + center;
            let lo = (ideal.floor() as i64).clamp(1, p as i64) as usize;
            let hi = (lo + 1).min(p);
            let d_lo = (s - nu(lo)).abs();
            let d_hi = (s - nu(hi)).abs();
            if d_lo <= d_hi {
                lo
            } else {
                hi
            }
        } else {
            let mut best = 1usize;
            let mut best_d = (s - nu(1)).powi(2);
            for a in 2..=p {
                let d = (s - nu(a)).powi(2);
                if d < best_d {
                    best_d = d;
                    best = a;
                }
            }
            best
        }
    }
}

impl RecoveryModel for RankModel {
    type Label = usize;
    /// The comparison strength beta.
    type Block = f64;

    fn num_coords(&self) -> usize {
        self.p()
    }

    fn alphabet_size(&self, _j: usize) -> usize {
        self.p()
    }

    fn label_at(&self, _j: usize, idx: usize) -> usize {
        idx + 1
    }

    fn contains_label(&self, _j: usize, label: &usize) -> bool {
        (1..=self.p()).contains(label)
    }

    fn fit_block(&self, labels: &[usize], _prev: Option<&f64>) -> Result<f64, RecoveryError> {
        let p = self.p();
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..p {
            for j in 0..p {
                if i == j {
                    continue;
                }
                let diff = labels[i] as f64 - labels[j] as f64;
                num += diff * self.y.get(i, j);
                den += diff * diff;
            }
        }
        if den == 0.0 {
            return Err(RecoveryError::DegenerateLabels(
                "all ranks equal; comparison strength is unidentifiable".into(),
            ));
        }
        Ok(num / den)
    }

    fn assign_label(&self, j: usize, beta: &f64) -> usize {
        self.assign(j, *beta)
    }

    fn block_summary(&self, beta: &f64) -> Vec<f64> {
        vec![*beta]
    }

    fn loss(&self, labels: &[usize], truth_labels: &[usize], beta_star: &f64) -> f64 {
        let p = self.p() as f64;
        let coeff = 2.0 * p * p * beta_star * beta_star / (p - 1.0);
        let sq: f64 = labels
            .iter()
            .zip(truth_labels)
            .map(|(&a, &b)| {
                let d = a as f64 - b as f64;
                d * d
            })
            .sum();
        coeff * sq
    }

    fn canonical_error(&self, labels: &[usize], truth_labels: &[usize]) -> f64 {
        let miss = labels
            .iter()
            .zip(truth_labels)
            .filter(|(a, b)| a != b)
            .count();
        miss as f64 / labels.len() as f64
    }
}

/// Mean squared rank displacement; relates to the surrogate loss by
/// l2 = (p-1) / (2 p^3 beta*^2) * loss.
pub fn rank_l2(labels: &[usize], truth: &[usize]) -> f64 {
    assert_eq!(labels.len(), truth.len());
    let sq: f64 = labels
        .iter()
        .zip(truth)
        .map(|(&a, &b)| {
            let d = a as f64 - b as f64;
            d * d
        })
        .sum();
    sq / labels.len() as f64
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankingParams {
    pub p: usize,
    pub beta_star: f64,
    /// Squared-displacement budget for perturbing the true ranks away from a
    /// permutation; 0 keeps an exact permutation.
    pub c_p: f64,
}

pub struct RankingInstance {
    pub model: RankModel,
    pub truth_labels: Vec<usize>,
    pub beta_star: f64,
}

impl RankingInstance {
    pub fn delta_min_sq(&self) -> f64 {
        let p = self.model.p() as f64;
        2.0 * p * p * self.beta_star * self.beta_star / (p - 1.0)
    }
}

/// Truth is a uniform permutation of 1..=p, optionally jittered by +-1 at
/// floor(c_p) random coordinates (clamped to [1, p]), which keeps it within
/// squared distance c_p of a permutation. Observations get unit Gaussian noise.
pub fn sample(params: &RankingParams, rng: &mut Rng) -> RankingInstance {
    let p = params.p;
    let mut truth: Vec<usize> = (1..=p).collect();
    rng.shuffle(&mut truth);
    let jitters = (params.c_p.floor() as usize).min(p);
    for j in rng.sample_distinct(p, jitters) {
        let bump: i64 = if rng.uniform() < 0.5 { -1 } else { 1 };
        truth[j] = (truth[j] as i64 + bump).clamp(1, p as i64) as usize;
    }

    let mut y = DenseMatrix::zeros(p, p);
    for i in 0..p {
        for j in 0..p {
            if i == j {
                continue;
            }
            let mean = params.beta_star * (truth[i] as f64 - truth[j] as f64);
            y.set(i, j, mean + rng.normal());
        }
    }
    RankingInstance {
        model: RankModel::new(y),
        truth_labels: truth,
        beta_star: params.beta_star,
    }
}
