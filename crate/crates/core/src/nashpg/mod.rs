//! Nash policy gradient on tree games with tabular softmax policies.
//!
//! Trajectories are sampled under the joint policy; each player follows the
//! REINFORCE estimate of its payoff gradient minus `α` times the gradient of
//! the visit-weighted KL divergence to a reference policy. The reference is
//! refreshed to the current policy every `inner_iters` steps.

pub mod checkpoint;
mod grad;
mod policy;
mod sample;
mod train;

pub use grad::{estimate_kl_gradient, estimate_policy_gradient, Gradient, KlWeighting};
pub use policy::{kl_divergence, kl_gradient, log_softmax, to_profile, SoftmaxPolicy};
pub use sample::{rollout, sample_trajectories, Step, Trajectory};
pub use train::{
    train_anneal, train_nashpg, Checkpoint, TrainConfig, TrainRecord, DEFAULT_CHECKPOINTS,
};
