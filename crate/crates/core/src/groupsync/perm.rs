//! Permutation synchronization: Y is a pd x pd block matrix whose (i, j)
//! block reads lambda* Z_i Z_j' plus symmetric noise, diagonal blocks zero.
//! Labels are permutations of [d] stored as index arrays pi with pi[c] = the
//! row carrying the 1 in column c; matrix algebra reduces to indexing.

use crate::iterate::{RecoveryError, RecoveryModel};
use crate::numerics::{
    all_permutations, hungarian_min, sym_eig, truncated_svd, DenseMatrix, Rng, DEFAULT_EIG_TOL,
    DEFAULT_SVD_TOL,
};

/// Largest block size the metric aligns by exhaustive search; 8! = 40320.
pub const EXACT_METRIC_MAX_D: usize = 8;

fn factorial(d: usize) -> usize {
    (1..=d).product()
}

/// idx-th permutation of [d] in lexicographic order (factorial number system).
fn perm_unrank(d: usize, mut idx: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..d).collect();
    let mut out = Vec::with_capacity(d);
    for pos in (0..d).rev() {
        let f = factorial(pos);
        let pick = idx / f;
        idx %= f;
        out.push(pool.remove(pick));
    }
    out
}

fn is_permutation(labels: &[usize], d: usize) -> bool {
    if labels.len() != d {
        return false;
    }
    let mut seen = vec![false; d];
    for &v in labels {
        if v >= d || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

/// Best permutation u (as pi[c] = r) maximizing sum_c score[u(c)][c].
fn best_assignment(score: &DenseMatrix) -> Vec<usize> {
    let d = score.rows();
    let mut cost = DenseMatrix::zeros(d, d);
    for c in 0..d {
        for r in 0..d {
            cost.set(c, r, -score.get(r, c));
        }
    }
    hungarian_min(&cost)
}

pub struct PermSyncModel {
    /// pd x pd block observation matrix.
    y: DenseMatrix,
    p: usize,
    d: usize,
}

pub struct PermBlock {
    pub lambda: f64,
    pub labels: Vec<Vec<usize>>,
}

impl PermSyncModel {
    pub fn new(y: DenseMatrix, p: usize, d: usize) -> Self {
        assert_eq!(y.rows(), p * d);
        assert_eq!(y.cols(), p * d);
        PermSyncModel { y, p, d }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn observations(&self) -> &DenseMatrix {
        &self.y
    }

    /// Whether the quotiented metric is the exact d!-minimum rather than the
    /// Hungarian alignment heuristic.
    pub fn metric_is_exact(&self) -> bool {
        self.d <= EXACT_METRIC_MAX_D
    }

    fn block_entry(&self, i: usize, j: usize, r: usize, c: usize) -> f64 {
        self.y.get(i * self.d + r, j * self.d + c)
    }

    /// Per-block projection of the top-d eigenvectors onto the nearest
    /// permutation. Eigenvalues are chosen algebraically largest: the signal
    /// spectrum sits at p lambda* with multiplicity d.
    pub fn spectral_init(&self) -> Result<Vec<Vec<usize>>, RecoveryError> {
        let n = self.p * self.d;
        let (values, vectors) = sym_eig(&self.y, n, DEFAULT_EIG_TOL)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap().then(a.cmp(&b)));
        let top: Vec<usize> = order[..self.d].to_vec();

        let block = |j: usize| -> DenseMatrix {
            let mut b = DenseMatrix::zeros(self.d, self.d);
            for r in 0..self.d {
                for (m, &col) in top.iter().enumerate() {
                    b.set(r, m, vectors.get(j * self.d + r, col));
                }
            }
            b
        };

        // The top eigenspace fixes the basis only up to a global d x d
        // rotation, so rounding raw block rows breaks the rotation tie
        // independently per block (and at zero noise every block is tied).
        // Anchoring on the polar factor of block 0 removes the rotation:
        // noiselessly block(j) * rot' = Z_j Z_0' / sqrt(p), a scaled
        // permutation matrix, so the projection is exact and consistent.
        let rot = match truncated_svd(&block(0), self.d, DEFAULT_SVD_TOL) {
            Ok(svd) => {
                let mut r = DenseMatrix::zeros(self.d, self.d);
                for a in 0..self.d {
                    for b in 0..self.d {
                        let mut acc = 0.0;
                        for m in 0..self.d {
                            acc += svd.u.get(a, m) * svd.v.get(b, m);
                        }
                        r.set(a, b, acc);
                    }
                }
                r
            }
            Err(_) => DenseMatrix::identity(self.d),
        };

        let mut labels = Vec::with_capacity(self.p);
        for j in 0..self.p {
            let b = block(j);
            let mut score = DenseMatrix::zeros(self.d, self.d);
            for r in 0..self.d {
                for c in 0..self.d {
                    let mut acc = 0.0;
                    for m in 0..self.d {
                        acc += b.get(r, m) * rot.get(c, m);
                    }
                    score.set(r, c, acc);
                }
            }
            labels.push(best_assignment(&score));
        }
        Ok(labels)
    }
}

/// min over global U of (1/p) sum_j 1{Z_j != Z*_j U'}: exact d!-scan for
/// d <= 8, Hungarian alignment on the agreement-count matrix above that.
/// The boolean reports whether the value is the exact minimum.
pub fn perm_metric(labels: &[Vec<usize>], truth: &[Vec<usize>], d: usize) -> (f64, bool) {
    assert_eq!(labels.len(), truth.len());
    let p = labels.len();
    let mismatches = |u: &[usize]| -> usize {
        labels
            .iter()
            .zip(truth)
            .filter(|(z, z_star)| (0..d).any(|c| z[c] != z_star[u[c]]))
            .count()
    };
    if d <= EXACT_METRIC_MAX_D {
        let best = all_permutations(d)
            .iter()
            .map(|u| mismatches(u))
            .min()
            .unwrap();
        (best as f64 / p as f64, true)
    } else {
        // agreement[a][c] = #{j: pi_j(c) = pi*_j(a)}; the aligning u(c) = a
        // maximizes total per-column agreement.
        let mut agreement = DenseMatrix::zeros(d, d);
        for (z, z_star) in labels.iter().zip(truth) {
            let mut inv_star = vec![0usize; d];
            for a in 0..d {
                inv_star[z_star[a]] = a;
            }
            for c in 0..d {
                agreement.add_assign_at(inv_star[z[c]], c, 1.0);
            }
        }
        let u = best_assignment(&agreement);
        (mismatches(&u) as f64 / p as f64, false)
    }
}

impl RecoveryModel for PermSyncModel {
    type Label = Vec<usize>;
    type Block = PermBlock;

    fn num_coords(&self) -> usize {
        self.p
    }

    fn alphabet_size(&self, _j: usize) -> usize {
        factorial(self.d)
    }

    fn label_at(&self, _j: usize, idx: usize) -> Vec<usize> {
        perm_unrank(self.d, idx)
    }

    fn contains_label(&self, _j: usize, label: &Vec<usize>) -> bool {
        is_permutation(label, self.d)
    }

    fn fit_block(&self, labels: &[Vec<usize>], _prev: Option<&PermBlock>) -> Result<PermBlock, RecoveryError> {
        // lambda = <Y, ZZ'> / (p^2 d); diagonal blocks are zero so the sum
        // skips i = j on its own.
        let mut num = 0.0;
        for i in 0..self.p {
            for j in 0..self.p {
                if i == j {
                    continue;
                }
                for m in 0..self.d {
                    num += self.block_entry(i, j, labels[i][m], labels[j][m]);
                }
            }
        }
        let denom = (self.p * self.p * self.d) as f64;
        Ok(PermBlock { lambda: num / denom, labels: labels.to_vec() })
    }

    fn assign_label(&self, j: usize, block: &PermBlock) -> Vec<usize> {
        // score[r][c] = lambda sum_i Y_ij[pi_i(c)][r], the (r, c) entry of
        // Y_j' B; maximize its permutation trace.
        let mut score = DenseMatrix::zeros(self.d, self.d);
        for i in 0..self.p {
            let pi = &block.labels[i];
            for c in 0..self.d {
                let row = i * self.d + pi[c];
                for r in 0..self.d {
                    score.add_assign_at(r, c, self.y.get(row, j * self.d + r));
                }
            }
        }
        for r in 0..self.d {
            for c in 0..self.d {
                score.set(r, c, block.lambda * score.get(r, c));
            }
        }
        best_assignment(&score)
    }

    fn block_summary(&self, block: &PermBlock) -> Vec<f64> {
        vec![block.lambda]
    }

    fn loss(&self, labels: &[Vec<usize>], truth_labels: &[Vec<usize>], truth_block: &PermBlock) -> f64 {
        // p lambda*^2 sum_j ||Z_j - Z*_j||_F^2; each differing column
        // contributes 2 to the squared Frobenius norm.
        let lam_sq = truth_block.lambda * truth_block.lambda;
        let mut cols = 0usize;
        for (z, z_star) in labels.iter().zip(truth_labels) {
            cols += (0..self.d).filter(|&c| z[c] != z_star[c]).count();
        }
        2.0 * self.p as f64 * lam_sq * cols as f64
    }

    fn canonical_error(&self, labels: &[Vec<usize>], truth_labels: &[Vec<usize>]) -> f64 {
        perm_metric(labels, truth_labels, self.d).0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PermSyncParams {
    pub p: usize,
    pub d: usize,
    pub lambda_star: f64,
}

pub struct PermSyncInstance {
    pub model: PermSyncModel,
    pub truth_labels: Vec<Vec<usize>>,
    pub lambda_star: f64,
    pub truth_block: PermBlock,
}

impl PermSyncInstance {
    pub fn delta_min_sq(&self) -> f64 {
        // Two distinct permutations differ in at least two columns.
        4.0 * self.model.p as f64 * self.lambda_star * self.lambda_star
    }
}

pub fn sample(params: &PermSyncParams, rng: &mut Rng) -> PermSyncInstance {
    let (p, d) = (params.p, params.d);
    let mut truth = Vec::with_capacity(p);
    for _ in 0..p {
        let mut pi: Vec<usize> = (0..d).collect();
        rng.shuffle(&mut pi);
        truth.push(pi);
    }
    let mut y = DenseMatrix::zeros(p * d, p * d);
    for i in 0..p {
        for j in (i + 1)..p {
            for r in 0..d {
                for c in 0..d {
                    let w = rng.normal();
                    let mut v = w;
                    // lambda* (Z_i Z_j')[r][c] = lambda* 1{exists m: r = pi_i(m), c = pi_j(m)}.
                    if truth[i].iter().zip(&truth[j]).any(|(&a, &b)| a == r && b == c) {
                        v += params.lambda_star;
                    }
                    y.set(i * d + r, j * d + c, v);
                    // Mirror block: Y_ji = Y_ij'.
                    y.set(j * d + c, i * d + r, v);
                }
            }
        }
    }
    let truth_block = PermBlock { lambda: params.lambda_star, labels: truth.clone() };
    PermSyncInstance { model: PermSyncModel::new(y, p, d), truth_labels: truth, lambda_star: params.lambda_star, truth_block }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iterate::one_step;

    #[test]
    fn unranking_is_lexicographic_and_complete() {
        let perms: Vec<Vec<usize>> = (0..6).map(|i| perm_unrank(3, i)).collect();
        assert_eq!(
            perms,
            vec![
                vec![0, 1, 2],
                vec![0, 2, 1],
                vec![1, 0, 2],
                vec![1, 2, 0],
                vec![2, 0, 1],
                vec![2, 1, 0]
            ]
        );
        let model_perms = all_permutations(3);
        assert_eq!(perms, model_perms);
    }

    #[test]
    fn noiseless_fit_shrinks_by_the_zero_diagonal() {
        let inst = sample(&PermSyncParams { p: 4, d: 3, lambda_star: 2.0 }, &mut Rng::seed_from_u64(1));
        // Strip the noise: rebuild Y from the truth alone.
        let mut y = DenseMatrix::zeros(12, 12);
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    for m in 0..3 {
                        y.set(i * 3 + inst.truth_labels[i][m], j * 3 + inst.truth_labels[j][m], 2.0);
                    }
                }
            }
        }
        let model = PermSyncModel::new(y, 4, 3);
        let block = model.fit_block(&inst.truth_labels, None).unwrap();
        assert!((block.lambda - 2.0 * (1.0 - 0.25)).abs() < 1e-12);
        assert_eq!(one_step(&model, &inst.truth_labels).unwrap(), inst.truth_labels);
    }

    #[test]
    fn assignment_matches_exhaustive_maximization() {
        for seed in 0..10 {
            let inst = sample(&PermSyncParams { p: 4, d: 3, lambda_star: 0.8 }, &mut Rng::seed_from_u64(seed));
            let z: Vec<Vec<usize>> = {
                let mut rng = Rng::seed_from_u64(seed + 100);
                (0..4)
                    .map(|_| {
                        let mut pi: Vec<usize> = (0..3).collect();
                        rng.shuffle(&mut pi);
                        pi
                    })
                    .collect()
            };
            let block = inst.model.fit_block(&z, None).unwrap();
            for j in 0..4 {
                let got = inst.model.assign_label(j, &block);
                // Exhaustive: maximize <Y_j' B, U> over all 6 permutations.
                let mut best = Vec::new();
                let mut best_s = f64::NEG_INFINITY;
                for u in all_permutations(3) {
                    let mut s = 0.0;
                    for c in 0..3 {
                        for i in 0..4 {
                            s += block.lambda
                                * inst.model.block_entry(i, j, z[i][c], u[c]);
                        }
                    }
                    if s > best_s {
                        best_s = s;
                        best = u;
                    }
                }
                assert_eq!(got, best, "seed {seed} coord {j}");
            }
        }
    }

    #[test]
    fn d_one_is_trivially_exact() {
        let inst = sample(&PermSyncParams { p: 3, d: 1, lambda_star: 1.0 }, &mut Rng::seed_from_u64(2));
        let block = inst.model.fit_block(&inst.truth_labels, None).unwrap();
        for j in 0..3 {
            assert_eq!(inst.model.assign_label(j, &block), vec![0]);
        }
    }

    #[test]
    fn metric_quotients_global_right_multiplication() {
        let mut rng = Rng::seed_from_u64(3);
        let inst = sample(&PermSyncParams { p: 5, d: 4, lambda_star: 1.0 }, &mut rng);
        for u in all_permutations(4).into_iter().take(6) {
            // Candidate Z_j = Z*_j U': pi_j(c) = pi*_j(u(c)).
            let acted: Vec<Vec<usize>> = inst
                .truth_labels
                .iter()
                .map(|pi| (0..4).map(|c| pi[u[c]]).collect())
                .collect();
            let (err, exact) = perm_metric(&acted, &inst.truth_labels, 4);
            assert!(exact);
            assert_eq!(err, 0.0);
        }
    }

    #[test]
    fn heuristic_alignment_matches_brute_force_below_the_cap() {
        let mut rng = Rng::seed_from_u64(4);
        for _ in 0..30 {
            let d = 4;
            let random_perm = |rng: &mut Rng| {
                let mut pi: Vec<usize> = (0..d).collect();
                rng.shuffle(&mut pi);
                pi
            };
            let labels: Vec<Vec<usize>> = (0..6).map(|_| random_perm(&mut rng)).collect();
            let truth: Vec<Vec<usize>> = (0..6).map(|_| random_perm(&mut rng)).collect();
            let (exact, flag) = perm_metric(&labels, &truth, d);
            assert!(flag);
            // Recompute through the heuristic path by faking a large d bound:
            // align via the agreement matrix and verify it never beats the
            // exhaustive minimum.
            let mut agreement = DenseMatrix::zeros(d, d);
            for (z, z_star) in labels.iter().zip(&truth) {
                let mut inv_star = vec![0usize; d];
                for a in 0..d {
                    inv_star[z_star[a]] = a;
                }
                for c in 0..d {
                    agreement.add_assign_at(inv_star[z[c]], c, 1.0);
                }
            }
            let u = best_assignment(&agreement);
            let heur = labels
                .iter()
                .zip(&truth)
                .filter(|(z, z_star)| (0..d).any(|c| z[c] != z_star[u[c]]))
                .count() as f64
                / 6.0;
            assert!(heur + 1e-12 >= exact);
        }
    }

    #[test]
    fn zero_noise_spectral_init_is_exact() {
        for seed in 0..5 {
            let inst = sample(&PermSyncParams { p: 6, d: 3, lambda_star: 1.0 }, &mut Rng::seed_from_u64(seed));
            // Rebuild noiseless observations.
            let mut y = DenseMatrix::zeros(18, 18);
            for i in 0..6 {
                for j in 0..6 {
                    if i != j {
                        for m in 0..3 {
                            y.set(i * 3 + inst.truth_labels[i][m], j * 3 + inst.truth_labels[j][m], 1.0);
                        }
                    }
                }
            }
            let model = PermSyncModel::new(y, 6, 3);
            let init = model.spectral_init().unwrap();
            let (err, exact) = perm_metric(&init, &inst.truth_labels, 3);
            assert!(exact);
            assert_eq!(err, 0.0, "seed {seed}");
        }
    }

    #[test]
    fn spectral_init_is_exact_at_moderate_snr() {
        for seed in 0..10 {
            let inst = sample(
                &PermSyncParams { p: 16, d: 3, lambda_star: 3.0 },
                &mut Rng::seed_from_u64(seed),
            );
            let init = inst.model.spectral_init().unwrap();
            let (err, _) = perm_metric(&init, &inst.truth_labels, 3);
            assert_eq!(err, 0.0, "seed {seed}");
        }
    }

    #[test]
    fn loss_counts_differing_columns() {
        let inst = sample(&PermSyncParams { p: 3, d: 3, lambda_star: 1.5 }, &mut Rng::seed_from_u64(5));
        let mut z = inst.truth_labels.clone();
        z[1] = vec![z[1][1], z[1][0], z[1][2]];
        let loss = inst.model.loss(&z, &inst.truth_labels, &inst.truth_block);
        // One coordinate with two differing columns.
        assert!((loss - 2.0 * 3.0 * 2.25 * 2.0).abs() < 1e-12);
        assert!(loss >= inst.delta_min_sq() - 1e-12);
    }
}

