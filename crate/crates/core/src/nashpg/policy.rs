use crate::efg::{BehavioralProfile, BehavioralStrategy, ExtensiveFormGame, Player};

/// Tabular softmax policy of one player: a logit vector per information set.
#[derive(Clone, Debug, PartialEq)]
pub struct SoftmaxPolicy {
    pub logits: Vec<Vec<f64>>,
}

impl SoftmaxPolicy {
    /// All-zero logits, i.e. the uniform policy.
    pub fn uniform(game: &ExtensiveFormGame, player: Player) -> Self {
        Self {
            logits: game
                .infosets(player)
                .iter()
                .map(|i| vec![0.0; i.num_actions()])
                .collect(),
        }
    }

    pub fn num_infosets(&self) -> usize {
        self.logits.len()
    }

    pub fn log_probs(&self, infoset: usize) -> Vec<f64> {
        log_softmax(&self.logits[infoset])
    }

    pub fn probs(&self, infoset: usize) -> Vec<f64> {
        self.log_probs(infoset).into_iter().map(f64::exp).collect()
    }

    /// Probability table for every information set.
    pub fn prob_table(&self) -> Vec<Vec<f64>> {
        (0..self.logits.len()).map(|i| self.probs(i)).collect()
    }

    pub fn to_behavioral(&self) -> BehavioralStrategy {
        BehavioralStrategy {
            probs: self.prob_table(),
        }
    }

    /// `true` when the shape matches the information sets of `player`.
    pub fn fits(&self, game: &ExtensiveFormGame, player: Player) -> bool {
        let sets = game.infosets(player);
        self.logits.len() == sets.len()
            && self
                .logits
                .iter()
                .zip(sets)
                .all(|(l, s)| l.len() == s.num_actions())
    }

    /// `θ += scale · g` elementwise.
    pub fn add_scaled(&mut self, g: &[Vec<f64>], scale: f64) {
        for (theta, grad) in self.logits.iter_mut().zip(g) {
            for (t, d) in theta.iter_mut().zip(grad) {
                *t += scale * d;
            }
        }
    }
}

/// Both players' policies as a behavioral profile.
pub fn to_profile(policies: &[SoftmaxPolicy; 2]) -> BehavioralProfile {
    BehavioralProfile::new(policies[0].to_behavioral(), policies[1].to_behavioral())
}

/// Numerically stable `log softmax`.
pub fn log_softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + logits.iter().map(|l| (l - max).exp()).sum::<f64>().ln();
    logits.iter().map(|l| l - lse).collect()
}

/// `KL(softmax(θ) ‖ softmax(θ_ref))`.
pub fn kl_divergence(logits: &[f64], reference: &[f64]) -> f64 {
    let lp = log_softmax(logits);
    let lq = log_softmax(reference);
    lp.iter().zip(&lq).map(|(p, q)| p.exp() * (p - q)).sum()
}

/// `∇_θ KL(softmax(θ) ‖ softmax(θ_ref))`, component `a` equal to
/// `p_a (log p_a − log q_a − KL)`.
pub fn kl_gradient(logits: &[f64], reference: &[f64]) -> Vec<f64> {
    let lp = log_softmax(logits);
    let lq = log_softmax(reference);
    let diff: Vec<f64> = lp.iter().zip(&lq).map(|(p, q)| p - q).collect();
    let kl: f64 = lp.iter().zip(&diff).map(|(p, d)| p.exp() * d).sum();
    lp.iter()
        .zip(&diff)
        .map(|(p, d)| p.exp() * (d - kl))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softmax_is_interior_even_for_extreme_logits() {
        let p = SoftmaxPolicy {
            logits: vec![vec![500.0, -500.0, 0.0]],
        };
        let lp = p.log_probs(0);
        assert!(lp.iter().all(|v| v.is_finite()));
        assert!((lp.iter().map(|v| v.exp()).sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kl_gradient_vanishes_on_the_diagonal() {
        let theta = [0.3, -1.2, 2.0];
        assert_eq!(kl_gradient(&theta, &theta), vec![0.0; 3]);
        assert_eq!(kl_divergence(&theta, &theta), 0.0);
    }
}
