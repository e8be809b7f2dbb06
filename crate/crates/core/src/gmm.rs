//! Isotropic Gaussian mixture clustering. Observations are the columns of a
//! d x p matrix; the block parameter is the d x k matrix of cluster centers,
//! so the alternating iteration specializes to Lloyd's algorithm.

use crate::iterate::{RecoveryError, RecoveryModel};
use crate::numerics::{dist_sq, hungarian_min, truncated_svd, DenseMatrix, Rng, DEFAULT_SVD_TOL};

pub struct GmmModel {
    y: DenseMatrix,
    k: usize,
}

impl GmmModel {
    pub fn new(y: DenseMatrix, k: usize) -> Self {
        assert!(k >= 1, "need at least one cluster");
        assert!(y.cols() >= 1, "need at least one observation");
        GmmModel { y, k }
    }

    pub fn dim(&self) -> usize {
        self.y.rows()
    }

    pub fn num_points(&self) -> usize {
        self.y.cols()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn observations(&self) -> &DenseMatrix {
        &self.y
    }

    fn col_center_dist_sq(&self, j: usize, centers: &DenseMatrix, a: usize) -> f64 {
        (0..self.y.rows())
            .map(|i| (self.y.get(i, j) - centers.get(i, a)).powi(2))
            .sum()
    }

    /// Spectral initializer: project the observations onto the top-k left
    /// singular directions, then cluster the projections with k-means++
    /// seeding plus Lloyd refinement, keeping the best of `restarts` runs.
    pub fn spectral_init(&self, restarts: usize, rng: &mut Rng) -> Result<Vec<usize>, RecoveryError> {
        if self.k > self.y.rows().min(self.y.cols()) {
            return Err(RecoveryError::InitFailed(format!(
                "spectral initializer needs k <= min(d, p), got k = {} with d = {}, p = {}",
                self.k,
                self.y.rows(),
                self.y.cols()
            )));
        }
        let svd = truncated_svd(&self.y, self.k, DEFAULT_SVD_TOL)?;
        // Projected points live in R^k: proj[c][j] = <U_c, Y_j>.
        let mut proj = DenseMatrix::zeros(self.k, self.y.cols());
        for c in 0..self.k {
            let uc = svd.u.col_to_vec(c);
            for j in 0..self.y.cols() {
                let mut s = 0.0;
                for i in 0..self.y.rows() {
                    s += uc[i] * self.y.get(i, j);
                }
                proj.set(c, j, s);
            }
        }
        let (labels, _) = kmeans_columns(&proj, self.k, restarts, rng);
        Ok(labels)
    }
}

pub const DEFAULT_KMEANS_RESTARTS: usize = 5;

impl RecoveryModel for GmmModel {
    type Label = usize;
    /// d x k matrix of centers, one column per cluster.
    type Block = DenseMatrix;

    fn num_coords(&self) -> usize {
        self.y.cols()
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

    fn fit_block(
        &self,
        labels: &[usize],
        prev: Option<&DenseMatrix>,
    ) -> Result<DenseMatrix, RecoveryError> {
        let (d, p) = (self.y.rows(), self.y.cols());
        let mut sums = DenseMatrix::zeros(d, self.k);
        let mut counts = vec![0usize; self.k];
        for (j, &a) in labels.iter().enumerate() {
            counts[a] += 1;
            for i in 0..d {
                sums.add_assign_at(i, a, self.y.get(i, j));
            }
        }
        // Empty cluster: keep its previous center when there is one,
        // otherwise fall back to the global mean. Keeps the fit total.
        let mut global = vec![0.0; d];
        for j in 0..p {
            for i in 0..d {
                global[i] += self.y.get(i, j);
            }
        }
        for g in global.iter_mut() {
            *g /= p as f64;
        }
        let mut centers = DenseMatrix::zeros(d, self.k);
        for a in 0..self.k {
            for i in 0..d {
                let v = if counts[a] > 0 {
                    sums.get(i, a) / counts[a] as f64
                } else if let Some(pc) = prev {
                    pc.get(i, a)
                } else {
                    global[i]
                };
                centers.set(i, a, v);
            }
        }
        Ok(centers)
    }

    fn assign_label(&self, j: usize, centers: &DenseMatrix) -> usize {
        let mut best = 0usize;
        let mut best_d = self.col_center_dist_sq(j, centers, 0);
        for a in 1..self.k {
            let d = self.col_center_dist_sq(j, centers, a);
            if d < best_d {
                best_d = d;
                best = a;
            }
        }
        best
    }

    fn block_summary(&self, centers: &DenseMatrix) -> Vec<f64> {
        (0..self.k).map(|a| centers.col_norm_sq(a).sqrt()).collect()
    }

    fn loss(&self, labels: &[usize], truth_labels: &[usize], truth_centers: &DenseMatrix) -> f64 {
        let d = truth_centers.rows();
        labels
            .iter()
            .zip(truth_labels)
            .map(|(&a, &b)| {
                if a == b {
                    0.0
                } else {
                    (0..d)
                        .map(|i| (truth_centers.get(i, a) - truth_centers.get(i, b)).powi(2))
                        .sum()
                }
            })
            .sum()
    }

    fn canonical_error(&self, labels: &[usize], truth_labels: &[usize]) -> f64 {
        misclustering(labels, truth_labels, self.k)
    }
}

/// Fraction of points mislabeled after the best global relabeling of the
/// clusters, found exactly by maximum-agreement assignment on the k x k
/// confusion matrix.
pub fn misclustering(labels: &[usize], truth: &[usize], k: usize) -> f64 {
    assert_eq!(labels.len(), truth.len());
    let p = labels.len();
    if p == 0 {
        return 0.0;
    }
    let mut confusion = DenseMatrix::zeros(k, k);
    for (&a, &b) in labels.iter().zip(truth) {
        confusion.add_assign_at(a, b, 1.0);
    }
    // Maximize agreement = minimize negated counts.
    let mut neg = DenseMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            neg.set(i, j, -confusion.get(i, j));
        }
    }
    let assign = hungarian_min(&neg);
    let agree: f64 = assign
        .iter()
        .enumerate()
        .map(|(a, &b)| confusion.get(a, b))
        .sum();
    1.0 - agree / p as f64
}

// k-means over the columns of `points`: k-means++ seeding, Lloyd to a fixed
// point, best objective over `restarts` independent seedings.
pub(crate) fn kmeans_columns(
    points: &DenseMatrix,
    k: usize,
    restarts: usize,
    rng: &mut Rng,
) -> (Vec<usize>, f64) {
    let p = points.cols();
    let dim = points.rows();
    let col = |j: usize| -> Vec<f64> { points.col_to_vec(j) };

    let mut best_labels = vec![0usize; p];
    let mut best_obj = f64::INFINITY;

    for _ in 0..restarts.max(1) {
        // Seeding: first center uniform, then squared-distance weighted.
        let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
        centers.push(col(rng.uniform_below(p)));
        let mut d2: Vec<f64> = (0..p).map(|j| dist_sq(&col(j), &centers[0])).collect();
        while centers.len() < k {
            let total: f64 = d2.iter().sum();
            let next = if total > 0.0 {
                let mut target = rng.uniform() * total;
                let mut pick = p - 1;
                for (j, &w) in d2.iter().enumerate() {
                    if target < w {
                        pick = j;
                        break;
                    }
                    target -= w;
                }
                pick
            } else {
                rng.uniform_below(p)
            };
            centers.push(col(next));
            for j in 0..p {
                let d = dist_sq(&col(j), centers.last().unwrap());
                if d < d2[j] {
                    d2[j] = d;
                }
            }
        }

        // Lloyd refinement.
        let mut labels = vec![0usize; p];
        for _round in 0..200 {
            let mut changed = false;
            for j in 0..p {
                let pj = col(j);
                let mut best_a = 0usize;
                let mut best_d = dist_sq(&pj, &centers[0]);
                for (a, c) in centers.iter().enumerate().skip(1) {
                    let d = dist_sq(&pj, c);
                    if d < best_d {
                        best_d = d;
                        best_a = a;
                    }
                }
                if labels[j] != best_a {
                    labels[j] = best_a;
                    changed = true;
                }
            }
            if !changed && _round > 0 {
                break;
            }
            let mut sums = vec![vec![0.0; dim]; k];
            let mut counts = vec![0usize; k];
            for (j, &a) in labels.iter().enumerate() {
                counts[a] += 1;
                for i in 0..dim {
                    sums[a][i] += points.get(i, j);
                }
            }
            for a in 0..k {
                if counts[a] > 0 {
                    for i in 0..dim {
                        centers[a][i] = sums[a][i] / counts[a] as f64;
                    }
                }
                // Empty cluster keeps its seed center.
            }
        }

        let obj: f64 = (0..p).map(|j| dist_sq(&col(j), &centers[labels[j]])).sum();
        if obj < best_obj {
            best_obj = obj;
            best_labels = labels;
        }
    }
    (best_labels, best_obj)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GmmParams {
    pub p: usize,
    pub k: usize,
    pub d: usize,
    /// Minimum pairwise center separation; the sampled centers attain it
    /// exactly for every pair.
    pub delta_min: f64,
    pub noise_scale: f64,
}

pub struct GmmInstance {
    pub model: GmmModel,
    pub truth_labels: Vec<usize>,
    pub truth_centers: DenseMatrix,
    pub delta_min: f64,
}

impl GmmInstance {
    pub fn delta_min_sq(&self) -> f64 {
        self.delta_min * self.delta_min
    }
}

/// Balanced synthetic instance. Centers sit at (delta/sqrt(2)) e_a, so every
/// pair of centers is exactly delta apart; labels are a shuffled balanced
/// assignment; noise is isotropic Gaussian.
pub fn sample(params: &GmmParams, rng: &mut Rng) -> GmmInstance {
    assert!(params.k <= params.d, "simplex centers need k <= d");
    assert!(params.p >= params.k, "need at least one point per cluster");
    let scale = params.delta_min / std::f64::consts::SQRT_2;
    let mut centers = DenseMatrix::zeros(params.d, params.k);
    for a in 0..params.k {
        centers.set(a, a, scale);
    }
    let mut labels: Vec<usize> = (0..params.p).map(|j| j % params.k).collect();
    rng.shuffle(&mut labels);

    let mut y = DenseMatrix::zeros(params.d, params.p);
    for (j, &a) in labels.iter().enumerate() {
        for i in 0..params.d {
            y.set(i, j, centers.get(i, a) + params.noise_scale * rng.normal());
        }
    }
    GmmInstance {
        model: GmmModel::new(y, params.k),
        truth_labels: labels,
        truth_centers: centers,
        delta_min: params.delta_min,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iterate::{ideal_step, one_step, run_iterations, GroundTruth, IterationConfig};
    use proptest::prelude::*;

    use crate::numerics::Rng;

    fn tiny_model() -> GmmModel {
        // Two well-separated pairs on the line, d = 1.
        let y = DenseMatrix::from_row_major(1, 4, vec![0.0, 0.2, 4.0, 4.2]);
        GmmModel::new(y, 2)
    }

    #[test]
    fn fit_computes_cluster_means() {
        let m = tiny_model();
        let c = m.fit_block(&[0, 0, 1, 1], None).unwrap();
        assert!((c.get(0, 0) - 0.1).abs() < 1e-12);
        assert!((c.get(0, 1) - 4.1).abs() < 1e-12);
    }

    #[test]
    fn empty_cluster_falls_back_to_global_mean() {
        let m = tiny_model();
        let c = m.fit_block(&[0, 0, 0, 0], None).unwrap();
        assert!((c.get(0, 1) - 2.1).abs() < 1e-12, "global mean of the data");
    }

    #[test]
    fn empty_cluster_keeps_previous_center_when_available() {
        let m = tiny_model();
        let prev = m.fit_block(&[0, 0, 1, 1], None).unwrap();
        let c = m.fit_block(&[0, 0, 0, 0], Some(&prev)).unwrap();
        assert!((c.get(0, 1) - 4.1).abs() < 1e-12);
    }

    #[test]
    fn assign_breaks_ties_toward_smaller_label() {
        // Centers at -1 and +1; the point at 0 is equidistant.
        let y = DenseMatrix::from_row_major(1, 1, vec![0.0]);
        let m = GmmModel::new(y, 2);
        let centers = DenseMatrix::from_row_major(1, 2, vec![-1.0, 1.0]);
        assert_eq!(m.assign_label(0, &centers), 0);
    }

    #[test]
    fn misclustering_quotient_examples() {
        // Pure relabeling is free.
        assert_eq!(misclustering(&[0, 0, 1, 1], &[1, 1, 0, 0], 2), 0.0);
        // Alternating labels vs blocks: the best permutation still misses half.
        assert_eq!(misclustering(&[0, 1, 0, 1], &[0, 0, 1, 1], 2), 0.5);
        assert_eq!(misclustering(&[0, 1, 2], &[0, 1, 2], 3), 0.0);
    }

    #[test]
    fn zero_noise_truth_init_is_a_length_one_trace() {
        let mut rng = Rng::seed_from_u64(2);
        let params = GmmParams { p: 30, k: 3, d: 4, delta_min: 3.0, noise_scale: 0.0 };
        let inst = sample(&params, &mut rng);
        let gt = GroundTruth::<GmmModel> {
            labels: &inst.truth_labels,
            block: &inst.truth_centers,
        };
        let trace = run_iterations(
            &inst.model,
            &inst.truth_labels,
            &IterationConfig::for_coords(30),
            Some(gt),
        )
        .unwrap();
        assert!(trace.converged);
        assert_eq!(trace.entries.len(), 1);
        assert_eq!(trace.entries[0].loss_value, Some(0.0));
    }

    #[test]
    fn zero_noise_columns_equal_their_centers() {
        let mut rng = Rng::seed_from_u64(3);
        let params = GmmParams { p: 12, k: 2, d: 3, delta_min: 2.0, noise_scale: 0.0 };
        let inst = sample(&params, &mut rng);
        for (j, &a) in inst.truth_labels.iter().enumerate() {
            for i in 0..3 {
                assert_eq!(inst.model.y.get(i, j), inst.truth_centers.get(i, a));
            }
        }
    }

    #[test]
    fn spectral_init_recovers_noiseless_clusters() {
        let mut rng = Rng::seed_from_u64(4);
        let params = GmmParams { p: 40, k: 3, d: 6, delta_min: 4.0, noise_scale: 0.0 };
        let inst = sample(&params, &mut rng);
        // Exactly k distinct projected columns in the noiseless rank-k case:
        // identical inputs stay identical, distinct centers stay distinct.
        let init = inst.model.spectral_init(DEFAULT_KMEANS_RESTARTS, &mut rng).unwrap();
        assert_eq!(misclustering(&init, &inst.truth_labels, 3), 0.0);
    }

    #[test]
    fn spectral_init_rejects_k_above_dimension() {
        let y = DenseMatrix::zeros(2, 5);
        let m = GmmModel::new(y, 3);
        let mut rng = Rng::seed_from_u64(1);
        assert!(matches!(
            m.spectral_init(1, &mut rng),
            Err(RecoveryError::InitFailed(_))
        ));
    }

    #[test]
    fn lloyd_objective_is_non_increasing_along_the_trace() {
        let mut rng = Rng::seed_from_u64(11);
        let params = GmmParams { p: 80, k: 3, d: 5, delta_min: 2.5, noise_scale: 1.0 };
        let inst = sample(&params, &mut rng);
        let mut init = inst.truth_labels.clone();
        for j in 0..20 {
            init[j] = (init[j] + 1) % 3; // corrupt a quarter of the labels
        }
        let trace = run_iterations(
            &inst.model,
            &init,
            &IterationConfig::for_coords(80),
            None,
        )
        .unwrap();
        let objective = |labels: &[usize]| -> f64 {
            let centers = inst.model.fit_block(labels, None).unwrap();
            (0..80)
                .map(|j| inst.model.col_center_dist_sq(j, &centers, labels[j]))
                .sum()
        };
        let objs: Vec<f64> = trace.entries.iter().map(|e| objective(&e.labels)).collect();
        for w in objs.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "objective increased: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn ideal_step_beats_one_step_from_corrupted_labels() {
        // Monte Carlo sanity: the oracle baseline is at least as accurate on
        // average as a single step from 10%-corrupted labels.
        let mut rng = Rng::seed_from_u64(40);
        let params = GmmParams { p: 200, k: 2, d: 4, delta_min: 4.0, noise_scale: 1.0 };
        let mut ideal_sum = 0.0;
        let mut corrupted_sum = 0.0;
        for _ in 0..100 {
            let inst = sample(&params, &mut rng);
            let ideal = ideal_step(&inst.model, &inst.truth_labels).unwrap();
            ideal_sum += misclustering(&ideal, &inst.truth_labels, 2);
            let mut z = inst.truth_labels.clone();
            let flips = rng.sample_distinct(200, 20);
            for j in flips {
                z[j] = 1 - z[j];
            }
            let stepped = one_step(&inst.model, &z).unwrap();
            corrupted_sum += misclustering(&stepped, &inst.truth_labels, 2);
        }
        assert!(
            ideal_sum <= corrupted_sum + 1e-12,
            "ideal {ideal_sum} vs corrupted-init {corrupted_sum}"
        );
    }

    #[test]
    fn loss_dominates_separation_times_hamming() {
        let mut rng = Rng::seed_from_u64(13);
        let params = GmmParams { p: 50, k: 3, d: 5, delta_min: 3.0, noise_scale: 1.0 };
        let inst = sample(&params, &mut rng);
        for _ in 0..50 {
            let z: Vec<usize> = (0..50).map(|_| rng.uniform_below(3)).collect();
            let loss = inst.model.loss(&z, &inst.truth_labels, &inst.truth_centers);
            let hamming = z
                .iter()
                .zip(&inst.truth_labels)
                .filter(|(a, b)| a != b)
                .count() as f64;
            assert!(loss >= inst.delta_min_sq() * hamming - 1e-9);
        }
    }

    proptest! {
        #[test]
        fn misclustering_is_invariant_under_relabeling(
            seed in 0u64..1000,
            swap in 0usize..3,
        ) {
            let mut rng = Rng::seed_from_u64(seed);
            let truth: Vec<usize> = (0..20).map(|_| rng.uniform_below(3)).collect();
            let z: Vec<usize> = (0..20).map(|_| rng.uniform_below(3)).collect();
            // Apply a transposition to z's labels; the quotient must not move.
            let (a, b) = [(0usize, 1usize), (0, 2), (1, 2)][swap];
            let relabeled: Vec<usize> = z
                .iter()
                .map(|&l| if l == a { b } else if l == b { a } else { l })
                .collect();
            let e1 = misclustering(&z, &truth, 3);
            let e2 = misclustering(&relabeled, &truth, 3);
            prop_assert!((e1 - e2).abs() < 1e-12);
        }
    }
}
