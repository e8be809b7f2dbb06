//! Z/kZ synchronization: Y_ij is a noisy reading of lambda* (z*_i - z*_j
//! mod k), observed in both orientations with a zero diagonal. The block
//! parameter factorizes into a scale plus the labels it was fitted from.

use crate::gmm::{kmeans_columns, DEFAULT_KMEANS_RESTARTS};
use crate::iterate::{RecoveryError, RecoveryModel};
use crate::numerics::{truncated_svd, DenseMatrix, Rng, DEFAULT_SVD_TOL};

/// g(a, b) = a o b^{-1} = (a - b) mod k, as a real number in [0, k).
fn gdiff(a: usize, b: usize, k: usize) -> f64 {
    ((a + k - b) % k) as f64
}

const INIT_CLUSTER_ATTEMPTS: usize = 3;

pub struct ZkModel {
    /// p x p, zero diagonal, both orientations observed.
    y: DenseMatrix,
    k: usize,
}

pub struct ZkBlock {
    pub lambda: f64,
    pub labels: Vec<usize>,
}

impl ZkModel {
    pub fn new(y: DenseMatrix, k: usize) -> Self {
        assert_eq!(y.rows(), y.cols());
        assert!(k >= 1);
        ZkModel { y, k }
    }

    pub fn p(&self) -> usize {
        self.y.rows()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn observations(&self) -> &DenseMatrix {
        &self.y
    }

    /// Spectral clustering plus block-mean sorting. Clusters come out with
    /// arbitrary ids; the means of Y over (cluster l, cluster 0) pairs grow
    /// with the group difference, so ranking |mean| recovers the relabeling.
    pub fn spectral_init(&self, rng: &mut Rng) -> Result<Vec<usize>, RecoveryError> {
        let (p, k) = (self.p(), self.k);
        if k == 1 {
            return Ok(vec![0; p]);
        }
        let svd = truncated_svd(&self.y, k, DEFAULT_SVD_TOL)?;
        let mut proj = DenseMatrix::zeros(k, p);
        for c in 0..k {
            let uc = svd.u.col_to_vec(c);
            for j in 0..p {
                let mut s = 0.0;
                for i in 0..p {
                    s += uc[i] * self.y.get(i, j);
                }
                proj.set(c, j, s);
            }
        }

        let mut clusters = Vec::new();
        let mut complete = false;
        for _ in 0..INIT_CLUSTER_ATTEMPTS {
            let (labels, _) = kmeans_columns(&proj, k, DEFAULT_KMEANS_RESTARTS, rng);
            let mut counts = vec![0usize; k];
            for &c in &labels {
                counts[c] += 1;
            }
            if counts.iter().all(|&c| c > 0) {
                clusters = labels;
                complete = true;
                break;
            }
        }
        if !complete {
            return Err(RecoveryError::InitFailed(format!(
                "spectral clustering left an empty cluster in {INIT_CLUSTER_ATTEMPTS} attempts"
            )));
        }

        // Mean of Y over ordered pairs (i in cluster l, j in cluster 0).
        let mut sums = vec![0.0; k];
        let mut counts = vec![0usize; k];
        for i in 0..p {
            for j in 0..p {
                if i != j && clusters[j] == 0 {
                    sums[clusters[i]] += self.y.get(i, j);
                    counts[clusters[i]] += 1;
                }
            }
        }
        let mut order: Vec<usize> = (1..k).collect();
        order.sort_by(|&a, &b| {
            let ma = (sums[a] / counts[a] as f64).abs();
            let mb = (sums[b] / counts[b] as f64).abs();
            ma.partial_cmp(&mb).unwrap().then(a.cmp(&b))
        });
        let mut relabel = vec![0usize; k];
        for (rank, &l) in order.iter().enumerate() {
            relabel[l] = rank + 1;
        }
        Ok(clusters.into_iter().map(|c| relabel[c]).collect())
    }
}

/// min over a of (1/p) sum_j 1{z_j != z*_j o a^{-1}}.
pub fn zk_metric(labels: &[usize], truth: &[usize], k: usize) -> f64 {
    assert_eq!(labels.len(), truth.len());
    let p = labels.len();
    let mut best = p + 1;
    for a in 0..k {
        let miss = labels
            .iter()
            .zip(truth)
            .filter(|(&z, &z_star)| z != (z_star + k - a) % k)
            .count();
        best = best.min(miss);
    }
    best as f64 / p as f64
}

impl RecoveryModel for ZkModel {
    type Label = usize;
    type Block = ZkBlock;

    fn num_coords(&self) -> usize {
        self.p()
    }

    fn alphabet_size(&self, _j: usize) -> usize {
        self.k
    }

    fn label_at(&self, _j: usize, idx: usize) -> usize {
        idx
    }

    fn contains_label(&self, _j: usize, label: &usize) -> bool {
        *label < self.k
    }

    fn fit_block(&self, labels: &[usize], _prev: Option<&ZkBlock>) -> Result<ZkBlock, RecoveryError> {
        let p = self.p();
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..p {
            for j in 0..p {
                if i != j {
                    let g = gdiff(labels[i], labels[j], self.k);
                    num += self.y.get(i, j) * g;
                    den += g * g;
                }
            }
        }
        if den == 0.0 {
            return Err(RecoveryError::DegenerateLabels(
                "all pairwise group differences vanish; scale is unidentifiable".into(),
            ));
        }
        Ok(ZkBlock { lambda: num / den, labels: labels.to_vec() })
    }

    fn assign_label(&self, j: usize, block: &ZkBlock) -> usize {
        // Candidate a scores the full column, diagonal included: the i = j
        // term (0 - lambda g(z_j, a))^2 nudges ties toward the previous label.
        let p = self.p();
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for a in 0..self.k {
            let mut dist = 0.0;
            for i in 0..p {
                let r = self.y.get(i, j) - block.lambda * gdiff(block.labels[i], a, self.k);
                dist += r * r;
            }
            if dist < best_d {
                best_d = dist;
                best = a;
            }
        }
        best
    }

    fn block_summary(&self, block: &ZkBlock) -> Vec<f64> {
        vec![block.lambda]
    }

    fn loss(&self, labels: &[usize], truth_labels: &[usize], truth_block: &ZkBlock) -> f64 {
        // mu_j(B*, a)_i = lambda* (z*_i o a^{-1}); group the sum over i by
        // the truth label value.
        let k = self.k;
        let mut counts = vec![0.0f64; k];
        for &c in truth_labels {
            counts[c] += 1.0;
        }
        let lam_sq = truth_block.lambda * truth_block.lambda;
        let mut total = 0.0;
        for (&z, &z_star) in labels.iter().zip(truth_labels) {
            if z == z_star {
                continue;
            }
            for c in 0..k {
                let diff = gdiff(c, z, k) - gdiff(c, z_star, k);
                total += counts[c] * lam_sq * diff * diff;
            }
        }
        total
    }

    fn canonical_error(&self, labels: &[usize], truth_labels: &[usize]) -> f64 {
        zk_metric(labels, truth_labels, self.k)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZkParams {
    pub p: usize,
    pub k: usize,
    pub lambda_star: f64,
}

pub struct ZkInstance {
    pub model: ZkModel,
    pub truth_labels: Vec<usize>,
    pub lambda_star: f64,
    pub truth_block: ZkBlock,
}

impl ZkInstance {
    pub fn delta_min_sq(&self) -> f64 {
        let k = self.model.k();
        let mut counts = vec![0.0f64; k];
        for &c in &self.truth_labels {
            counts[c] += 1.0;
        }
        let lam_sq = self.lambda_star * self.lambda_star;
        let mut best = f64::INFINITY;
        for a in 0..k {
            for b in 0..k {
                if a == b {
                    continue;
                }
                let mut sep = 0.0;
                for c in 0..k {
                    let diff = gdiff(c, a, k) - gdiff(c, b, k);
                    sep += counts[c] * lam_sq * diff * diff;
                }
                best = best.min(sep);
            }
        }
        best
    }
}

pub fn sample(params: &ZkParams, rng: &mut Rng) -> ZkInstance {
    let (p, k) = (params.p, params.k);
    let truth: Vec<usize> = (0..p).map(|_| rng.uniform_below(k)).collect();
    let mut y = DenseMatrix::zeros(p, p);
    for i in 0..p {
        for j in 0..p {
            if i != j {
                let mean = params.lambda_star * gdiff(truth[i], truth[j], k);
                y.set(i, j, mean + rng.normal());
            }
        }
    }
    let truth_block = ZkBlock { lambda: params.lambda_star, labels: truth.clone() };
    ZkInstance { model: ZkModel::new(y, k), truth_labels: truth, lambda_star: params.lambda_star, truth_block }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iterate::one_step;

    fn noiseless(truth: &[usize], k: usize, lambda: f64) -> ZkModel {
        let p = truth.len();
        let mut y = DenseMatrix::zeros(p, p);
        for i in 0..p {
            for j in 0..p {
                if i != j {
                    y.set(i, j, lambda * gdiff(truth[i], truth[j], k));
                }
            }
        }
        ZkModel::new(y, k)
    }

    #[test]
    fn group_difference_arithmetic() {
        assert_eq!(gdiff(1, 2, 3), 2.0);
        assert_eq!(gdiff(2, 2, 3), 0.0);
        assert_eq!(gdiff(0, 1, 4), 3.0);
    }

    #[test]
    fn noiseless_truth_is_a_fixed_point_with_exact_scale() {
        let truth = vec![0usize, 1, 2, 1, 0, 2];
        let model = noiseless(&truth, 3, 1.7);
        let block = model.fit_block(&truth, None).unwrap();
        assert!((block.lambda - 1.7).abs() < 1e-12);
        assert_eq!(one_step(&model, &truth).unwrap(), truth);
    }

    #[test]
    fn constant_labels_are_degenerate() {
        let model = noiseless(&[0, 1, 2], 3, 1.0);
        assert!(matches!(
            model.fit_block(&[1, 1, 1], None),
            Err(RecoveryError::DegenerateLabels(_))
        ));
    }

    #[test]
    fn assignment_matches_per_column_scan() {
        let mut rng = Rng::seed_from_u64(1);
        let inst = sample(&ZkParams { p: 6, k: 3, lambda_star: 0.9 }, &mut rng);
        let z: Vec<usize> = (0..6).map(|_| rng.uniform_below(3)).collect();
        let block = inst.model.fit_block(&z, None).unwrap();
        for j in 0..6 {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for a in 0..3 {
                let mut dist = 0.0;
                for i in 0..6 {
                    let r = inst.model.y.get(i, j) - block.lambda * gdiff(z[i], a, 3);
                    dist += r * r;
                }
                if dist < best_d {
                    best_d = dist;
                    best = a;
                }
            }
            assert_eq!(inst.model.assign_label(j, &block), best);
        }
    }

    #[test]
    fn metric_quotients_the_global_action() {
        let truth = vec![0usize, 1, 2, 0];
        for a in 0..3 {
            let acted: Vec<usize> = truth.iter().map(|&z| (z + 3 - a) % 3).collect();
            assert_eq!(zk_metric(&acted, &truth, 3), 0.0);
        }
        let mut off = truth.clone();
        off[2] = (off[2] + 1) % 3;
        assert_eq!(zk_metric(&off, &truth, 3), 0.25);
    }

    #[test]
    fn loss_dominates_p_lambda_sq_hamming() {
        let mut rng = Rng::seed_from_u64(2);
        let inst = sample(&ZkParams { p: 8, k: 4, lambda_star: 0.7 }, &mut rng);
        let p_lam = 8.0 * 0.49;
        for _ in 0..50 {
            let z: Vec<usize> = (0..8).map(|_| rng.uniform_below(4)).collect();
            let loss = inst.model.loss(&z, &inst.truth_labels, &inst.truth_block);
            let h = z.iter().zip(&inst.truth_labels).filter(|(a, b)| a != b).count() as f64;
            assert!(loss >= p_lam * h - 1e-9, "loss {loss} vs bound {}", p_lam * h);
            assert!(loss >= inst.delta_min_sq() * h - 1e-9);
        }
    }

    #[test]
    fn loss_matches_direct_mu_distance() {
        let mut rng = Rng::seed_from_u64(3);
        let inst = sample(&ZkParams { p: 7, k: 3, lambda_star: 1.2 }, &mut rng);
        for _ in 0..20 {
            let z: Vec<usize> = (0..7).map(|_| rng.uniform_below(3)).collect();
            let loss = inst.model.loss(&z, &inst.truth_labels, &inst.truth_block);
            let mut direct = 0.0;
            for j in 0..7 {
                for i in 0..7 {
                    let a = 1.2 * gdiff(inst.truth_labels[i], z[j], 3);
                    let b = 1.2 * gdiff(inst.truth_labels[i], inst.truth_labels[j], 3);
                    direct += (a - b) * (a - b);
                }
            }
            assert!((loss - direct).abs() < 1e-9 * (1.0 + direct));
        }
    }

    #[test]
    fn k_one_init_is_all_zeros() {
        let model = ZkModel::new(DenseMatrix::zeros(4, 4), 1);
        let mut rng = Rng::seed_from_u64(4);
        assert_eq!(model.spectral_init(&mut rng).unwrap(), vec![0, 0, 0, 0]);
    }

    #[test]
    fn noiseless_init_recovers_labels_up_to_global_action() {
        let mut truth = Vec::new();
        for c in 0..3 {
            truth.extend(std::iter::repeat(c).take(20));
        }
        let model = noiseless(&truth, 3, 2.0);
        let mut rng = Rng::seed_from_u64(5);
        let init = model.spectral_init(&mut rng).unwrap();
        assert_eq!(zk_metric(&init, &truth, 3), 0.0);
    }

    #[test]
    fn sorting_maps_cluster_means_to_ranks() {
        // Noiseless k=4 balanced instance: relabeled clusters must reproduce
        // the truth exactly up to the global action, which pins the sort.
        let mut truth = Vec::new();
        for c in 0..4 {
            truth.extend(std::iter::repeat(c).take(12));
        }
        let model = noiseless(&truth, 4, 1.0);
        let mut rng = Rng::seed_from_u64(6);
        let init = model.spectral_init(&mut rng).unwrap();
        assert_eq!(zk_metric(&init, &truth, 4), 0.0);
    }
}
