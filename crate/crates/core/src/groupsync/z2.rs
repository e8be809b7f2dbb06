//! Z2 synchronization: Y = lambda* z*z*' + W off the diagonal, labels are
//! signs. One iteration is a sign-corrected power-method step.

use crate::iterate::{RecoveryError, RecoveryModel};
use crate::numerics::{sym_eig, symmetric_gaussian, DenseMatrix, Rng, DEFAULT_EIG_TOL};

fn sign_pm(x: f64) -> i8 {
    if x >= 0.0 {
        1
    } else {
        -1
    }
}

pub struct Z2Model {
    /// p x p, symmetric, zero diagonal.
    y: DenseMatrix,
}

pub struct Z2Block {
    /// Fitted scale <Y, zz'> / p^2; only its sign steers the assignment.
    pub lambda: f64,
    pub labels: Vec<i8>,
}

impl Z2Model {
    pub fn new(y: DenseMatrix) -> Self {
        assert_eq!(y.rows(), y.cols());
        Z2Model { y }
    }

    pub fn p(&self) -> usize {
        self.y.rows()
    }

    pub fn observations(&self) -> &DenseMatrix {
        &self.y
    }

    fn column_correlation(&self, j: usize, labels: &[i8]) -> f64 {
        (0..self.p()).map(|i| self.y.get(i, j) * labels[i] as f64).sum()
    }

    /// Signs of the leading eigenvector, taking the algebraically largest
    /// eigenvalue (not the largest magnitude: a deep negative outlier must
    /// not steal the signal direction).
    pub fn eigenvector_init(&self) -> Result<Vec<i8>, RecoveryError> {
        let p = self.p();
        let (values, vectors) = sym_eig(&self.y, p, DEFAULT_EIG_TOL)?;
        let top = (0..p)
            .max_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap())
            .unwrap();
        Ok((0..p).map(|j| sign_pm(vectors.get(j, top))).collect())
    }
}

/// One synchronized update: s = z'Yz picks the global orientation, then every
/// coordinate takes the (possibly flipped) sign of its column correlation.
pub fn z2_step(y: &DenseMatrix, labels: &[i8]) -> Vec<i8> {
    let p = y.rows();
    let mut s = 0.0;
    for i in 0..p {
        for j in 0..p {
            s += labels[i] as f64 * y.get(i, j) * labels[j] as f64;
        }
    }
    let flip = if s >= 0.0 { 1 } else { -1 };
    (0..p)
        .map(|j| {
            let corr: f64 = (0..p).map(|i| y.get(i, j) * labels[i] as f64).sum();
            flip * sign_pm(corr)
        })
        .collect()
}

/// min(h(z, z*), h(z, -z*)) / p.
pub fn z2_metric(labels: &[i8], truth: &[i8]) -> f64 {
    assert_eq!(labels.len(), truth.len());
    let p = labels.len();
    let miss = labels.iter().zip(truth).filter(|(a, b)| a != b).count();
    miss.min(p - miss) as f64 / p as f64
}

impl RecoveryModel for Z2Model {
    type Label = i8;
    type Block = Z2Block;

    fn num_coords(&self) -> usize {
        self.p()
    }

    fn alphabet_size(&self, _j: usize) -> usize {
        2
    }

    fn label_at(&self, _j: usize, idx: usize) -> i8 {
        [1, -1][idx]
    }

    fn contains_label(&self, _j: usize, label: &i8) -> bool {
        matches!(label, 1 | -1)
    }

    fn fit_block(&self, labels: &[i8], _prev: Option<&Z2Block>) -> Result<Z2Block, RecoveryError> {
        let p = self.p() as f64;
        let mut s = 0.0;
        for i in 0..self.p() {
            for j in 0..self.p() {
                s += labels[i] as f64 * self.y.get(i, j) * labels[j] as f64;
            }
        }
        Ok(Z2Block { lambda: s / (p * p), labels: labels.to_vec() })
    }

    fn assign_label(&self, j: usize, block: &Z2Block) -> i8 {
        let corr = self.column_correlation(j, &block.labels);
        if block.lambda >= 0.0 {
            sign_pm(corr)
        } else {
            -sign_pm(corr)
        }
    }

    fn block_summary(&self, block: &Z2Block) -> Vec<f64> {
        vec![block.lambda]
    }

    fn loss(&self, labels: &[i8], truth_labels: &[i8], truth_block: &Z2Block) -> f64 {
        // ||(z_j - z*_j) lambda* z*||^2 summed: 4 p lambda*^2 per mismatch.
        let p = self.p() as f64;
        let miss = labels.iter().zip(truth_labels).filter(|(a, b)| a != b).count();
        4.0 * p * truth_block.lambda * truth_block.lambda * miss as f64
    }

    fn canonical_error(&self, labels: &[i8], truth_labels: &[i8]) -> f64 {
        z2_metric(labels, truth_labels)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Z2Params {
    pub p: usize,
    pub lambda_star: f64,
}

pub struct Z2Instance {
    pub model: Z2Model,
    pub truth_labels: Vec<i8>,
    pub lambda_star: f64,
    pub truth_block: Z2Block,
}

impl Z2Instance {
    pub fn delta_min_sq(&self) -> f64 {
        4.0 * self.model.p() as f64 * self.lambda_star * self.lambda_star
    }
}

pub fn sample(params: &Z2Params, rng: &mut Rng) -> Z2Instance {
    let p = params.p;
    let truth: Vec<i8> = (0..p).map(|_| if rng.uniform() < 0.5 { 1 } else { -1 }).collect();
    let mut y = symmetric_gaussian(rng, p, true);
    for i in 0..p {
        for j in 0..p {
            if i != j {
                y.add_assign_at(i, j, params.lambda_star * truth[i] as f64 * truth[j] as f64);
            }
        }
    }
    let truth_block = Z2Block { lambda: params.lambda_star, labels: truth.clone() };
    Z2Instance { model: Z2Model::new(y), truth_labels: truth, lambda_star: params.lambda_star, truth_block }
}
