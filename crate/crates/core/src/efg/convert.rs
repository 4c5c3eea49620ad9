//! Reduction of a tree game to its normal form over pure strategies.

use super::{
    BehavioralProfile, BehavioralStrategy, ExtensiveFormGame, Node, NodeId, Player, PureStrategy,
};
use crate::error::{Error, Result};
use crate::nfg::{MixedProfile, NormalFormGame};

/// Default bound on `rows * cols` of a converted game.
pub const DEFAULT_ENTRY_CAP: u128 = 10_000_000;

/// A tree game's normal form together with the pure strategy behind each
/// row and column.
#[derive(Clone, Debug)]
pub struct NormalFormConversion {
    pub game: NormalFormGame,
    /// `strategies[p][k]` is the pure strategy of row/column `k`.
    pub strategies: [Vec<PureStrategy>; 2],
}

/// Enumerates pure strategies (information set 0 is the fastest-varying
/// digit) and fills `A[i][j]` with the exact chance expectation of player
/// one's payoff.
pub fn efg_to_nfg(game: &ExtensiveFormGame, entry_cap: u128) -> Result<NormalFormConversion> {
    let rows = game.num_pure_strategies(Player::One);
    let cols = game.num_pure_strategies(Player::Two);
    let entries = rows.saturating_mul(cols);
    if entries > entry_cap {
        return Err(Error::TooLarge {
            entries,
            cap: entry_cap,
        });
    }
    let strategies = [enumerate(game, Player::One), enumerate(game, Player::Two)];
    let mut matrix = Vec::with_capacity(entries as usize);
    for s1 in &strategies[0] {
        for s2 in &strategies[1] {
            matrix.push(pure_value(game, [s1, s2], game.root()));
        }
    }
    let game = NormalFormGame::new(rows as usize, cols as usize, matrix)?;
    Ok(NormalFormConversion { game, strategies })
}

fn enumerate(game: &ExtensiveFormGame, player: Player) -> Vec<PureStrategy> {
    let radices: Vec<usize> = game
        .infosets(player)
        .iter()
        .map(|i| i.num_actions())
        .collect();
    let total: usize = radices.iter().product();
    (0..total)
        .map(|mut k| {
            let actions = radices
                .iter()
                .map(|&r| {
                    let a = k % r;
                    k /= r;
                    a
                })
                .collect();
            PureStrategy { actions }
        })
        .collect()
}

fn pure_value(game: &ExtensiveFormGame, pure: [&PureStrategy; 2], id: NodeId) -> f64 {
    match game.node(id) {
        Node::Terminal { payoff } => *payoff,
        Node::Chance { outcomes } => outcomes
            .iter()
            .map(|&(p, c)| p * pure_value(game, pure, c))
            .sum(),
        Node::Decision {
            player,
            infoset,
            children,
        } => pure_value(game, pure, children[pure[player.index()].actions[*infoset]]),
    }
}

impl NormalFormConversion {
    /// Row/column index of a pure strategy.
    pub fn index_of(&self, game: &ExtensiveFormGame, player: Player, pure: &PureStrategy) -> usize {
        let mut idx = 0;
        let mut scale = 1;
        for (set, &a) in game.infosets(player).iter().zip(&pure.actions) {
            idx += a * scale;
            scale *= set.num_actions();
        }
        idx
    }

    /// Realization-equivalent mixed profile: each pure strategy gets the
    /// product of the behavioral probabilities of its actions.
    pub fn lift(
        &self,
        game: &ExtensiveFormGame,
        profile: &BehavioralProfile,
    ) -> Result<MixedProfile> {
        profile.check(game)?;
        let weights = |p: Player| -> Vec<f64> {
            let probs = &profile.strategy(p).probs;
            self.strategies[p.index()]
                .iter()
                .map(|s| {
                    s.actions
                        .iter()
                        .enumerate()
                        .map(|(i, &a)| probs[i][a])
                        .product()
                })
                .collect()
        };
        MixedProfile::interior(weights(Player::One), weights(Player::Two))
    }

    /// Inverse direction of [`NormalFormConversion::lift`]; see
    /// [`mixed_to_behavioral`].
    pub fn to_behavioral(&self, game: &ExtensiveFormGame, z: &MixedProfile) -> BehavioralProfile {
        BehavioralProfile::new(
            mixed_to_behavioral(game, Player::One, &self.strategies[0], &z.x),
            mixed_to_behavioral(game, Player::Two, &self.strategies[1], &z.y),
        )
    }
}

/// Behavioral strategy realization-equivalent to the mixed strategy
/// `weights` over `pures`: at each set, the conditional action frequencies
/// among pure strategies consistent with the owner's history there. Sets no
/// weighted strategy reaches get the uniform distribution.
pub fn mixed_to_behavioral(
    game: &ExtensiveFormGame,
    player: Player,
    pures: &[PureStrategy],
    weights: &[f64],
) -> BehavioralStrategy {
    let probs = game
        .infosets(player)
        .iter()
        .enumerate()
        .map(|(i, set)| {
            let mut dist = vec![0.0; set.num_actions()];
            for (s, &w) in pures.iter().zip(weights) {
                if set.own_history.iter().all(|&(j, a)| s.actions[j] == a) {
                    dist[s.actions[i]] += w;
                }
            }
            let total: f64 = dist.iter().sum();
            if total > 0.0 {
                dist.iter_mut().for_each(|d| *d /= total);
            } else {
                dist.fill(1.0 / set.num_actions() as f64);
            }
            dist
        })
        .collect();
    BehavioralStrategy { probs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efg::expected_payoff;

    #[test]
    fn kuhn_is_64_by_64() {
        let g = ExtensiveFormGame::kuhn();
        let conv = efg_to_nfg(&g, DEFAULT_ENTRY_CAP).unwrap();
        assert_eq!((conv.game.rows(), conv.game.cols()), (64, 64));
        for (k, s) in conv.strategies[0].iter().enumerate() {
            assert_eq!(conv.index_of(&g, Player::One, s), k);
        }
    }

    #[test]
    fn entries_match_deterministic_profiles() {
        let g = ExtensiveFormGame::kuhn();
        let conv = efg_to_nfg(&g, DEFAULT_ENTRY_CAP).unwrap();
        for (i, s1) in conv.strategies[0].iter().enumerate() {
            for (j, s2) in conv.strategies[1].iter().enumerate() {
                let profile = BehavioralProfile::new(
                    BehavioralStrategy::from_pure(&g, Player::One, s1),
                    BehavioralStrategy::from_pure(&g, Player::Two, s2),
                );
                assert_eq!(
                    conv.game.entry(i, j),
                    expected_payoff(&g, &profile).unwrap()
                );
            }
        }
    }

    #[test]
    fn leduc_exceeds_the_cap() {
        let g = ExtensiveFormGame::leduc();
        assert!(matches!(
            efg_to_nfg(&g, DEFAULT_ENTRY_CAP),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn small_cap_is_enforced() {
        let g = ExtensiveFormGame::kuhn();
        assert!(efg_to_nfg(&g, 64 * 64 - 1).is_err());
        assert!(efg_to_nfg(&g, 64 * 64).is_ok());
    }
}
