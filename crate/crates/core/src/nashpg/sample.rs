use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SoftmaxPolicy;
use crate::efg::{ExtensiveFormGame, Node, Player};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Step {
    pub player: Player,
    pub infoset: usize,
    pub action: usize,
    pub log_prob: f64,
}

/// A root-to-terminal rollout.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub steps: Vec<Step>,
    /// Terminal payoff to player one.
    pub payoff: f64,
}

impl Trajectory {
    /// `R_i(τ)`.
    pub fn return_for(&self, player: Player) -> f64 {
        player.sign() * self.payoff
    }
}

/// `n` independent rollouts under chance and both policies, reproducible
/// from `seed`.
pub fn sample_trajectories(
    game: &ExtensiveFormGame,
    policies: &[SoftmaxPolicy; 2],
    n: usize,
    seed: u64,
) -> Vec<Trajectory> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tables = [policies[0].prob_table(), policies[1].prob_table()];
    (0..n).map(|_| rollout(game, &tables, &mut rng)).collect()
}

/// Samples one trajectory with per-player probability tables.
pub fn rollout<R: Rng + ?Sized>(
    game: &ExtensiveFormGame,
    tables: &[Vec<Vec<f64>>; 2],
    rng: &mut R,
) -> Trajectory {
    let mut steps = Vec::new();
    let mut id = game.root();
    loop {
        match game.node(id) {
            Node::Terminal { payoff } => {
                return Trajectory {
                    steps,
                    payoff: *payoff,
                }
            }
            Node::Chance { outcomes } => {
                let u: f64 = rng.random();
                let k = pick(outcomes.iter().map(|(p, _)| *p), u);
                id = outcomes[k].1;
            }
            Node::Decision {
                player,
                infoset,
                children,
            } => {
                let probs = &tables[player.index()][*infoset];
                let u: f64 = rng.random();
                let a = pick(probs.iter().copied(), u);
                steps.push(Step {
                    player: *player,
                    infoset: *infoset,
                    action: a,
                    log_prob: probs[a].ln(),
                });
                id = children[a];
            }
        }
    }
}

/// Inverse-CDF draw; falls back to the last index with positive weight
/// when rounding leaves `u` above the cumulative sum.
fn pick(weights: impl Iterator<Item = f64>, u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (k, w) in weights.enumerate() {
        if w > 0.0 {
            acc += w;
            last = k;
            if u < acc {
                return k;
            }
        }
    }
    last
}
