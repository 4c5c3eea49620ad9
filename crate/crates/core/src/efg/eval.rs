//! Exact tree evaluation: expected payoff, best response and exploitability.

use super::{
    BehavioralProfile, BehavioralStrategy, ExtensiveFormGame, Node, NodeId, Player, PureStrategy,
};
use crate::error::Result;

/// Player one's expected terminal payoff under `profile`.
pub fn expected_payoff(game: &ExtensiveFormGame, profile: &BehavioralProfile) -> Result<f64> {
    profile.check(game)?;
    Ok(node_value(game, profile, game.root()))
}

fn node_value(game: &ExtensiveFormGame, profile: &BehavioralProfile, id: NodeId) -> f64 {
    match game.node(id) {
        Node::Terminal { payoff } => *payoff,
        Node::Chance { outcomes } => outcomes
            .iter()
            .map(|&(p, c)| p * node_value(game, profile, c))
            .sum(),
        Node::Decision {
            player,
            infoset,
            children,
        } => {
            let probs = &profile.strategy(*player).probs[*infoset];
            children
                .iter()
                .zip(probs)
                .filter(|(_, &p)| p > 0.0)
                .map(|(&c, &p)| p * node_value(game, profile, c))
                .sum()
        }
    }
}

/// Exact best response of `responder` against the fixed `opponent` strategy.
///
/// Returns a pure strategy covering every information set of the responder
/// (ties go to the lowest action index) and the responder's expected payoff.
pub fn best_response(
    game: &ExtensiveFormGame,
    opponent: &BehavioralStrategy,
    responder: Player,
) -> Result<(PureStrategy, f64)> {
    opponent.check(game, responder.opponent())?;
    let mut solver = BestResponse {
        game,
        opponent,
        responder,
        reach: vec![0.0; game.nodes().len()],
        value: vec![None; game.nodes().len()],
        choice: vec![None; game.num_infosets(responder)],
    };
    solver.accumulate_reach(game.root(), 1.0);
    let value = solver.value(game.root());
    for i in 0..solver.choice.len() {
        solver.choose(i);
    }
    let actions = solver.choice.into_iter().map(|c| c.unwrap_or(0)).collect();
    Ok((PureStrategy { actions }, value))
}

struct BestResponse<'a> {
    game: &'a ExtensiveFormGame,
    opponent: &'a BehavioralStrategy,
    responder: Player,
    /// Chance-and-opponent reach probability of each node.
    reach: Vec<f64>,
    value: Vec<Option<f64>>,
    choice: Vec<Option<usize>>,
}

impl BestResponse<'_> {
    fn accumulate_reach(&mut self, id: NodeId, reach: f64) {
        self.reach[id] = reach;
        match self.game.node(id) {
            Node::Terminal { .. } => {}
            Node::Chance { outcomes } => {
                for &(p, c) in outcomes {
                    self.accumulate_reach(c, reach * p);
                }
            }
            Node::Decision {
                player,
                infoset,
                children,
            } => {
                for (a, &c) in children.iter().enumerate() {
                    let p = if *player == self.responder {
                        1.0
                    } else {
                        self.opponent.probs[*infoset][a]
                    };
                    self.accumulate_reach(c, reach * p);
                }
            }
        }
    }

    /// Responder's value at `id`, conditional on reaching it, when the
    /// responder plays the best response below.
    fn value(&mut self, id: NodeId) -> f64 {
        if let Some(v) = self.value[id] {
            return v;
        }
        let v = match self.game.node(id) {
            Node::Terminal { payoff } => self.responder.sign() * payoff,
            Node::Chance { outcomes } => outcomes.iter().map(|&(p, c)| p * self.value(c)).sum(),
            Node::Decision {
                player,
                infoset,
                children,
            } => {
                if *player == self.responder {
                    let a = self.choose(*infoset);
                    self.value(children[a])
                } else {
                    let probs = &self.opponent.probs[*infoset];
                    children
                        .iter()
                        .zip(probs)
                        .filter(|(_, &p)| p > 0.0)
                        .map(|(&c, &p)| p * self.value(c))
                        .sum()
                }
            }
        };
        self.value[id] = Some(v);
        v
    }

    fn choose(&mut self, infoset: usize) -> usize {
        if let Some(a) = self.choice[infoset] {
            return a;
        }
        let set = &self.game.infosets(self.responder)[infoset];
        let mut q = vec![0.0; set.num_actions()];
        for &h in &set.nodes {
            let w = self.reach[h];
            if w == 0.0 {
                continue;
            }
            let Node::Decision { children, .. } = self.game.node(h) else {
                unreachable!("information sets only hold decision nodes")
            };
            for (a, &c) in children.iter().enumerate() {
                q[a] += w * self.value(c);
            }
        }
        let mut best = 0;
        for a in 1..q.len() {
            if q[a] > q[best] {
                best = a;
            }
        }
        self.choice[infoset] = Some(best);
        best
    }
}

/// The deviation incentives `(δ₁, δ₂)` of both players.
pub fn exploitability_deltas(
    game: &ExtensiveFormGame,
    profile: &BehavioralProfile,
) -> Result<[f64; 2]> {
    let v1 = expected_payoff(game, profile)?;
    let (_, br1) = best_response(game, profile.strategy(Player::Two), Player::One)?;
    let (_, br2) = best_response(game, profile.strategy(Player::One), Player::Two)?;
    Ok([br1 - v1, br2 + v1])
}

/// `(δ₁ + δ₂) / 2` with exact best responses.
pub fn exploitability(game: &ExtensiveFormGame, profile: &BehavioralProfile) -> Result<f64> {
    let [d1, d2] = exploitability_deltas(game, profile)?;
    Ok((d1 + d2) / 2.0)
}
