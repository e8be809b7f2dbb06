//! Sign recovery in compressed sensing. Y = X beta* + noise with beta* =
//! lambda * z* for a sign vector z* in {-1,0,1}^p carrying s nonzeros; the
//! block parameter is the least-squares coefficient vector restricted to the
//! support of the current signs, and assignment is a per-coordinate
//! threshold at t(X_j).

use crate::iterate::{RecoveryError, RecoveryModel};
use crate::numerics::{
    cholesky_solve, dot, gaussian_matrix, slope_prox, spectral_norm_sq_estimate, DenseMatrix,
    NumericsError, Rng,
};

/// Ridge added to the support Gram matrix when plain Cholesky fails or the
/// support is larger than the sample count.
const RIDGE_EPS: f64 = 1e-10;

pub const DEFAULT_SLOPE_PENALTY: f64 = 1.5;

const SLOPE_REL_TOL: f64 = 1e-8;
const SLOPE_MAX_INNER: usize = 2_000;
const SLOPE_MAX_OUTER: usize = 25;
const SIGMA_FLOOR: f64 = 1e-12;

/// t(X_j) = lambda/2 + log((p-s)/s) / (lambda ||X_j||^2).
pub fn threshold_t(col_norm_sq: f64, lambda: f64, p: usize, s: usize) -> f64 {
    lambda / 2.0 + ((p - s) as f64 / s as f64).ln() / (lambda * col_norm_sq)
}

/// lambda sqrt(n)/2 - log((p-s)/s) / (lambda sqrt(n)).
pub fn snr_value(lambda: f64, n: usize, p: usize, s: usize) -> f64 {
    let x = lambda * (n as f64).sqrt();
    x / 2.0 - ((p - s) as f64 / s as f64).ln() / x
}

/// Inverts `snr_value` in lambda: the positive root of x/2 - c/x = snr with
/// x = lambda sqrt(n).
pub fn lambda_for_snr(snr: f64, n: usize, p: usize, s: usize) -> f64 {
    let c = ((p - s) as f64 / s as f64).ln();
    let disc = snr * snr + 2.0 * c;
    assert!(disc >= 0.0, "no positive lambda reaches this snr");
    (snr + disc.sqrt()) / (n as f64).sqrt()
}

/// h(z, z*) / s.
pub fn hamming_s(labels: &[i8], truth: &[i8], s: usize) -> f64 {
    assert_eq!(labels.len(), truth.len());
    let h = labels.iter().zip(truth).filter(|(a, b)| a != b).count();
    h as f64 / s as f64
}

fn col_vec_dot(m: &DenseMatrix, j: usize, v: &[f64]) -> f64 {
    (0..m.rows()).map(|i| m.get(i, j) * v[i]).sum()
}

pub struct SignModel {
    x: DenseMatrix,
    y: Vec<f64>,
    lambda: f64,
    s: usize,
    xty: Vec<f64>,
    col_norms_sq: Vec<f64>,
    thresholds: Vec<f64>,
}

pub struct SignBlock {
    /// Length p; zero off the fitted support.
    pub beta: Vec<f64>,
    /// y - X beta, cached so assignment is one column dot per coordinate.
    pub residual: Vec<f64>,
    pub ridge_fallback: bool,
}

impl SignModel {
    pub fn new(x: DenseMatrix, y: Vec<f64>, lambda: f64, s: usize) -> Self {
        let (n, p) = (x.rows(), x.cols());
        assert_eq!(y.len(), n);
        assert!(lambda > 0.0, "minimum signal must be positive");
        assert!(s > 0 && s < p, "sparsity must satisfy 0 < s < p");
        let xty = x.transpose_vec_mul(&y);
        let col_norms_sq: Vec<f64> = (0..p).map(|j| x.col_norm_sq(j)).collect();
        let thresholds = col_norms_sq
            .iter()
            .map(|&nsq| threshold_t(nsq, lambda, p, s))
            .collect();
        SignModel { x, y, lambda, s, xty, col_norms_sq, thresholds }
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn p(&self) -> usize {
        self.x.cols()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn x(&self) -> &DenseMatrix {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn threshold(&self, j: usize) -> f64 {
        self.thresholds[j]
    }

    /// Least squares on `support`, optionally ridge-stabilized. Returns the
    /// full-length coefficient vector.
    fn solve_support(&self, support: &[usize], ridge: f64) -> Result<Vec<f64>, NumericsError> {
        let p = self.p();
        let mut beta = vec![0.0; p];
        if support.is_empty() {
            return Ok(beta);
        }
        let m = support.len();
        let mut gram = DenseMatrix::zeros(m, m);
        for a in 0..m {
            for b in a..m {
                let g = self.x.col_dot(support[a], support[b]);
                gram.set(a, b, g);
                gram.set(b, a, g);
            }
            gram.add_assign_at(a, a, ridge);
        }
        let rhs: Vec<f64> = support.iter().map(|&j| self.xty[j]).collect();
        let coef = cholesky_solve(&gram, &rhs)?;
        for (a, &j) in support.iter().enumerate() {
            beta[j] = coef[a];
        }
        Ok(beta)
    }

    fn make_block(&self, beta: Vec<f64>, ridge_fallback: bool) -> SignBlock {
        let fitted = self.x.vec_mul(&beta);
        let residual: Vec<f64> = self.y.iter().zip(&fitted).map(|(yi, fi)| yi - fi).collect();
        SignBlock { beta, residual, ridge_fallback }
    }

    /// Square-root SLOPE initializer: threshold the solver output at
    /// lambda/2, keeping the sign.
    pub fn sqrt_slope_init(&self, penalty_a: f64) -> Result<Vec<i8>, RecoveryError> {
        let beta = sqrt_slope_solve(&self.x, &self.y, penalty_a)?;
        Ok(beta
            .iter()
            .map(|&b| {
                if b.abs() >= self.lambda / 2.0 {
                    if b > 0.0 {
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

/// Least squares restricted to the support of `signs`, zeros elsewhere.
/// Rejects supports larger than the sample count; the in-loop fit instead
/// falls back to a ridge solve in that situation (see `fit_block`).
pub fn restricted_lsq(model: &SignModel, signs: &[i8]) -> Result<Vec<f64>, RecoveryError> {
    let support: Vec<usize> = (0..signs.len()).filter(|&j| signs[j] != 0).collect();
    if support.len() > model.n() {
        return Err(RecoveryError::SupportTooLarge { support: support.len(), n: model.n() });
    }
    match model.solve_support(&support, 0.0) {
        Ok(beta) => Ok(beta),
        Err(NumericsError::SingularSystem { .. }) => {
            Ok(model.solve_support(&support, RIDGE_EPS)?)
        }
        Err(e) => Err(e.into()),
    }
}

impl RecoveryModel for SignModel {
    type Label = i8;
    type Block = SignBlock;

    fn num_coords(&self) -> usize {
        self.p()
    }

    fn alphabet_size(&self, _j: usize) -> usize {
        3
    }

    fn label_at(&self, _j: usize, idx: usize) -> i8 {
        [0, 1, -1][idx]
    }

    fn contains_label(&self, _j: usize, label: &i8) -> bool {
        matches!(label, -1 | 0 | 1)
    }

    fn fit_block(&self, labels: &[i8], _prev: Option<&SignBlock>) -> Result<SignBlock, RecoveryError> {
        let support: Vec<usize> = (0..labels.len()).filter(|&j| labels[j] != 0).collect();
        if support.len() > self.n() {
            // Oversized support: the plain normal equations are singular by
            // construction, so go straight to the ridge solve and record it.
            let beta = self.solve_support(&support, RIDGE_EPS)?;
            return Ok(self.make_block(beta, true));
        }
        match self.solve_support(&support, 0.0) {
            Ok(beta) => Ok(self.make_block(beta, false)),
            Err(NumericsError::SingularSystem { .. }) => {
                let beta = self.solve_support(&support, RIDGE_EPS)?;
                Ok(self.make_block(beta, true))
            }
            Err(e) => Err(e.into()),
        }
    }

    fn assign_label(&self, j: usize, block: &SignBlock) -> i8 {
        // u_j = (X_j'Y - sum_{l != j} beta_l X_j'X_l) / ||X_j||^2, which is
        // beta_j plus the residual correlation; the boundary |u| = t maps to 0.
        let u = block.beta[j] + col_vec_dot(&self.x, j, &block.residual) / self.col_norms_sq[j];
        if u.abs() > self.thresholds[j] {
            if u > 0.0 {
                1
            } else {
                -1
            }
        } else {
            0
        }
    }

    fn block_summary(&self, block: &SignBlock) -> Vec<f64> {
        let nnz = block.beta.iter().filter(|b| **b != 0.0).count();
        vec![nnz as f64, dot(&block.beta, &block.beta).sqrt(), dot(&block.residual, &block.residual).sqrt()]
    }

    fn block_note(&self, block: &SignBlock) -> Option<String> {
        if block.ridge_fallback {
            Some("ridge-stabilized support solve".to_string())
        } else {
            None
        }
    }

    fn loss(&self, labels: &[i8], truth_labels: &[i8], truth_block: &SignBlock) -> f64 {
        let lam_sq = self.lambda * self.lambda;
        let mut total = 0.0;
        for j in 0..labels.len() {
            let (z, z_star) = (labels[j], truth_labels[j]);
            if z == z_star {
                continue;
            }
            let nsq = self.col_norms_sq[j];
            let b_star = truth_block.beta[j];
            if z_star == 0 {
                total += lam_sq * nsq;
            } else if z == 0 {
                total += b_star * b_star * nsq;
            } else {
                total += 4.0 * b_star * b_star * nsq;
            }
        }
        total
    }

    fn canonical_error(&self, labels: &[i8], truth_labels: &[i8]) -> f64 {
        hamming_s(labels, truth_labels, self.s)
    }
}

fn slope_norm(beta: &[f64], base_weights: &[f64]) -> f64 {
    let mut mags: Vec<f64> = beta.iter().map(|b| b.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    dot(&mags, base_weights)
}

/// ||y - X beta|| + A * sum_j sqrt(log(2p/j)) |beta|_(j).
pub fn sqrt_slope_objective(x: &DenseMatrix, y: &[f64], penalty_a: f64, beta: &[f64]) -> f64 {
    let p = x.cols();
    let w: Vec<f64> = (1..=p).map(|j| (2.0 * p as f64 / j as f64).ln().sqrt()).collect();
    let fitted = x.vec_mul(beta);
    let rss: f64 = y.iter().zip(&fitted).map(|(a, b)| (a - b) * (a - b)).sum();
    rss.sqrt() + penalty_a * slope_norm(beta, &w)
}

/// Minimizes the square-root SLOPE objective by alternating the scale
/// sigma = ||y - X beta|| with FISTA on the scaled quadratic; with
/// lip = ||X||^2 / sigma the gradient step is scale-free and sigma only
/// rescales the proximal weights.
pub fn sqrt_slope_solve(
    x: &DenseMatrix,
    y: &[f64],
    penalty_a: f64,
) -> Result<Vec<f64>, RecoveryError> {
    assert!(penalty_a > 0.0, "penalty must be positive");
    let p = x.cols();
    let w: Vec<f64> = (1..=p).map(|j| (2.0 * p as f64 / j as f64).ln().sqrt()).collect();
    // Safety factor absorbs power-iteration underestimation of the top
    // singular value.
    let lip_base = spectral_norm_sq_estimate(x, 60) * 1.02;
    if lip_base == 0.0 {
        return Ok(vec![0.0; p]);
    }

    let objective = |beta: &[f64], resid_norm: f64| resid_norm + penalty_a * slope_norm(beta, &w);
    let residual_of = |img: &[f64]| -> Vec<f64> { y.iter().zip(img).map(|(a, b)| a - b).collect() };

    let mut beta = vec![0.0; p];
    let mut beta_img = x.vec_mul(&beta);
    let mut resid = residual_of(&beta_img);
    let mut outer_obj = objective(&beta, dot(&resid, &resid).sqrt());

    for _round in 0..SLOPE_MAX_OUTER {
        let sigma = dot(&resid, &resid).sqrt().max(SIGMA_FLOOR);
        let step_w: Vec<f64> = w.iter().map(|wi| penalty_a * wi * sigma / lip_base).collect();

        let mut xk = beta.clone();
        let mut xk_img = beta_img.clone();
        let mut x_prev = xk.clone();
        let mut x_prev_img = xk_img.clone();
        let mut t_prev = 1.0f64;
        let mut f_cur = objective(&xk, {
            let r = residual_of(&xk_img);
            dot(&r, &r).sqrt()
        });

        for it in 0..SLOPE_MAX_INNER {
            let t_cur = (1.0 + (1.0 + 4.0 * t_prev * t_prev).sqrt()) / 2.0;
            let mom = (t_prev - 1.0) / t_cur;
            // Extrapolated point and its image, reusing cached images so each
            // iteration costs one forward and one transposed matvec.
            let yk: Vec<f64> = xk
                .iter()
                .zip(&x_prev)
                .map(|(a, b)| a + mom * (a - b))
                .collect();
            let yk_img: Vec<f64> = xk_img
                .iter()
                .zip(&x_prev_img)
                .map(|(a, b)| a + mom * (a - b))
                .collect();
            let err: Vec<f64> = yk_img.iter().zip(y).map(|(a, b)| a - b).collect();
            let grad = x.transpose_vec_mul(&err);
            let v: Vec<f64> = yk
                .iter()
                .zip(&grad)
                .map(|(a, g)| a - g / lip_base)
                .collect();
            let x_new = slope_prox(&v, &step_w)?;
            let x_new_img = x.vec_mul(&x_new);
            let r = residual_of(&x_new_img);
            let f_new = objective(&x_new, dot(&r, &r).sqrt());

            x_prev = std::mem::replace(&mut xk, x_new);
            x_prev_img = std::mem::replace(&mut xk_img, x_new_img);
            // Function-value restart keeps the momentum sequence stable.
            t_prev = if f_new > f_cur { 1.0 } else { t_cur };
            let done = (f_cur - f_new).abs() <= SLOPE_REL_TOL * f_cur.max(1.0);
            f_cur = f_new;
            if done && it > 0 {
                break;
            }
        }

        beta = xk;
        beta_img = xk_img;
        resid = residual_of(&beta_img);
        let new_obj = objective(&beta, dot(&resid, &resid).sqrt());
        let settled = (outer_obj - new_obj).abs() <= SLOPE_REL_TOL * outer_obj.max(1.0);
        outer_obj = new_obj;
        if settled {
            return Ok(beta);
        }
    }
    let nnz = beta.iter().filter(|b| b.abs() > 0.0).count();
    Err(RecoveryError::InitFailed(format!(
        "square-root SLOPE stalled after {SLOPE_MAX_OUTER} scale rounds (objective {outer_obj:.6e}, {nnz} nonzeros)"
    )))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignParams {
    pub n: usize,
    pub p: usize,
    pub s: usize,
    pub lambda: f64,
}

pub struct SignInstance {
    pub model: SignModel,
    pub truth_labels: Vec<i8>,
    pub beta_star: Vec<f64>,
    pub truth_block: SignBlock,
}

impl SignInstance {
    pub fn delta_min_sq(&self) -> f64 {
        let min_nsq = (0..self.model.p())
            .map(|j| self.model.col_norms_sq[j])
            .fold(f64::INFINITY, f64::min);
        self.model.lambda * self.model.lambda * min_nsq
    }
}

/// Design is iid standard normal; truth has s random coordinates with
/// uniform signs at magnitude exactly lambda (the hardest admissible signal).
pub fn sample(params: &SignParams, rng: &mut Rng) -> SignInstance {
    let x = gaussian_matrix(rng, params.n, params.p);
    let mut truth = vec![0i8; params.p];
    for j in rng.sample_distinct(params.p, params.s) {
        truth[j] = if rng.uniform() < 0.5 { 1 } else { -1 };
    }
    let beta_star: Vec<f64> = truth.iter().map(|&z| params.lambda * z as f64).collect();
    let signal = x.vec_mul(&beta_star);
    let y: Vec<f64> = signal.iter().map(|m| m + rng.normal()).collect();

    let residual: Vec<f64> = y.iter().zip(&signal).map(|(a, b)| a - b).collect();
    let truth_block = SignBlock { beta: beta_star.clone(), residual, ridge_fallback: false };
    let model = SignModel::new(x, y, params.lambda, params.s);
    SignInstance { model, truth_labels: truth, beta_star, truth_block }
}
