//! Group synchronization engines: Z2 (signs), Z/kZ (cyclic), and permutation
//! synchronization. Each observes pairwise group differences corrupted by
//! Gaussian noise and recovers per-coordinate group elements up to one global
//! group action, which every metric here quotients out.

pub mod perm;
pub mod z2;
pub mod zk;

pub use perm::{perm_metric, PermBlock, PermSyncInstance, PermSyncModel, PermSyncParams};
pub use z2::{z2_metric, z2_step, Z2Block, Z2Instance, Z2Model, Z2Params};
pub use zk::{zk_metric, ZkBlock, ZkInstance, ZkModel, ZkParams};
