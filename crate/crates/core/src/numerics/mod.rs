//! Self-contained numeric kernels: dense matrices, a portable seeded RNG,
//! symmetric eigendecomposition, truncated SVD, assignment, the sorted-L1
//! proximal operator, and small Cholesky solves. No external linear-algebra
//! dependencies, so results are bit-reproducible across platforms.

pub mod eig;
pub mod gauss;
pub mod hungarian;
pub mod linsys;
pub mod matrix;
pub mod rng;
pub mod slope;
pub mod svd;

pub use eig::{sym_eig, DEFAULT_EIG_TOL};
pub use gauss::{gaussian_matrix, symmetric_gaussian};
pub use hungarian::{all_permutations, assignment_cost, hungarian_min};
pub use linsys::{cholesky_solve, spectral_norm_sq_estimate};
pub use matrix::{dist_sq, dot, norm_sq, DenseMatrix};
pub use rng::Rng;
pub use slope::slope_prox;
pub use svd::{truncated_svd, Svd, DEFAULT_SVD_TOL};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (max |A_ij - A_ji| = {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },
    #[error("requested rank {requested} exceeds dimension {dim}")]
    RankTooLarge { requested: usize, dim: usize },
    #[error("{context} failed to converge within the iteration cap")]
    NoConvergence { context: &'static str },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("weight {index} is negative")]
    NegativeWeight { index: usize },
    #[error("weights must be non-increasing (violated at index {index})")]
    WeightsNotSorted { index: usize },
    #[error("linear system is singular or indefinite at pivot {pivot}")]
    SingularSystem { pivot: usize },
}
