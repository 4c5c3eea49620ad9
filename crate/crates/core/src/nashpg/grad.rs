//! Sampled gradient estimators for the regularized objective.

use super::policy::kl_gradient;
use super::{SoftmaxPolicy, Trajectory};
use crate::efg::Player;

/// Per-information-set gradient, shaped like [`SoftmaxPolicy::logits`].
pub type Gradient = Vec<Vec<f64>>;

fn zeros_like(policy: &SoftmaxPolicy) -> Gradient {
    policy.logits.iter().map(|l| vec![0.0; l.len()]).collect()
}

/// How [`estimate_kl_gradient`] weights the visited information sets.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum KlWeighting {
    /// Weight each set by its visit count divided by the batch size, i.e. a
    /// Monte-Carlo estimate of `E_{o∼π}`.
    #[default]
    VisitFrequency,
    /// Equal weight `1 / |visited|` for every distinct visited set.
    UniformOverVisited,
}

/// REINFORCE estimate of `∇_θ E[R_i]` with the batch-mean return as baseline:
/// `(1/n) Σ_τ (R_i(τ) − b) Σ_{steps of i} (e_a − π(·|I))`.
pub fn estimate_policy_gradient(
    trajectories: &[Trajectory],
    player: Player,
    policy: &SoftmaxPolicy,
) -> Gradient {
    let mut grad = zeros_like(policy);
    if trajectories.is_empty() {
        return grad;
    }
    let n = trajectories.len() as f64;
    let baseline = trajectories
        .iter()
        .map(|t| t.return_for(player))
        .sum::<f64>()
        / n;
    let probs = policy.prob_table();
    for t in trajectories {
        let adv = t.return_for(player) - baseline;
        if adv == 0.0 {
            continue;
        }
        for s in t.steps.iter().filter(|s| s.player == player) {
            let g = &mut grad[s.infoset];
            for (b, (gb, pb)) in g.iter_mut().zip(&probs[s.infoset]).enumerate() {
                let indicator = if b == s.action { 1.0 } else { 0.0 };
                *gb += adv * (indicator - pb);
            }
        }
    }
    grad.iter_mut().flatten().for_each(|v| *v /= n);
    grad
}

/// Estimate of `∇_θ E_{o∼π}[KL(π_θ(·|o) ‖ ρ(·|o))]`: the analytic KL
/// gradient at each information set of `player` visited in the batch,
/// weighted per `weighting`. Unvisited sets get zero.
pub fn estimate_kl_gradient(
    trajectories: &[Trajectory],
    player: Player,
    policy: &SoftmaxPolicy,
    reference: &SoftmaxPolicy,
    weighting: KlWeighting,
) -> Gradient {
    let mut grad = zeros_like(policy);
    if trajectories.is_empty() {
        return grad;
    }
    let mut visits = vec![0usize; policy.num_infosets()];
    for t in trajectories {
        for s in t.steps.iter().filter(|s| s.player == player) {
            visits[s.infoset] += 1;
        }
    }
    let distinct = visits.iter().filter(|&&v| v > 0).count() as f64;
    let n = trajectories.len() as f64;
    for (i, &count) in visits.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let weight = match weighting {
            KlWeighting::VisitFrequency => count as f64 / n,
            KlWeighting::UniformOverVisited => 1.0 / distinct,
        };
        let g = kl_gradient(&policy.logits[i], &reference.logits[i]);
        for (out, gi) in grad[i].iter_mut().zip(g) {
            *out = weight * gi;
        }
    }
    grad
}
