//! Iterative recovery of discrete structure from pairwise or linear
//! observations: a shared fit-then-reassign engine, five model instantiations
//! (Gaussian clustering, rank aggregation, sign recovery, cyclic alignment,
//! and group synchronization over Z2, Z/kZ, and permutations), their
//! initializers, and a deterministic Monte Carlo harness.

pub mod bench;
pub mod gmm;
pub mod groupsync;
pub mod iterate;
pub mod mra;
pub mod numerics;
pub mod ranking;
pub mod signrec;

pub use iterate::{
    ideal_step, one_step, run_iterations, GroundTruth, IterationConfig, RecoveryError,
    RecoveryModel, Trace, TraceEntry,
};
