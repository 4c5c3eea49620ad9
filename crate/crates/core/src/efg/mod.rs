//! Finite two-player zero-sum extensive-form games with perfect recall.
//!
//! A game is an arena of [`Node`]s. Terminal payoffs are stored once, from
//! player one's point of view. Information sets are interned per player and
//! remember their legal action labels and the acting player's own
//! `(infoset, action)` history, which is validated to be identical for every
//! node of the set.

mod convert;
mod eval;
mod games;
pub use games::{build_kuhn, build_leduc, LEDUC_REWARD_SCALE};

pub use convert::{efg_to_nfg, mixed_to_behavioral, NormalFormConversion, DEFAULT_ENTRY_CAP};
pub use eval::{best_response, expected_payoff, exploitability, exploitability_deltas};

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

pub type NodeId = usize;

/// Tolerance on chance distributions summing to one.
pub const CHANCE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::One, Player::Two];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Player::One => 0,
            Player::Two => 1,
        }
    }

    pub fn from_index(i: usize) -> Option<Player> {
        match i {
            0 => Some(Player::One),
            1 => Some(Player::Two),
            _ => None,
        }
    }

    #[inline]
    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    /// `+1` for player one, `-1` for player two: converts a player-one payoff
    /// into this player's payoff.
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Player::One => 1.0,
            Player::Two => -1.0,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index() + 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Decision {
        player: Player,
        infoset: usize,
        children: Vec<NodeId>,
    },
    Chance {
        outcomes: Vec<(f64, NodeId)>,
    },
    /// Payoff to player one.
    Terminal {
        payoff: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Infoset {
    pub key: String,
    pub actions: Vec<String>,
    /// Nodes belonging to this set, in construction order.
    pub nodes: Vec<NodeId>,
    /// The owner's earlier `(infoset, action)` decisions on every path here.
    pub own_history: Vec<(usize, usize)>,
}

impl Infoset {
    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }
}

#[derive(Clone, Debug)]
pub struct ExtensiveFormGame {
    name: String,
    nodes: Vec<Node>,
    root: NodeId,
    infosets: [Vec<Infoset>; 2],
}

impl ExtensiveFormGame {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    #[inline]
    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn infosets(&self, player: Player) -> &[Infoset] {
        &self.infosets[player.index()]
    }

    pub fn num_infosets(&self, player: Player) -> usize {
        self.infosets[player.index()].len()
    }

    pub fn infoset_index(&self, player: Player, key: &str) -> Option<usize> {
        self.infosets[player.index()]
            .iter()
            .position(|i| i.key == key)
    }

    /// Number of non-terminal histories (decision and chance nodes).
    pub fn num_nonterminal(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| !matches!(n, Node::Terminal { .. }))
            .count()
    }

    pub fn num_terminal(&self) -> usize {
        self.nodes.len() - self.num_nonterminal()
    }

    /// Number of pure strategies of `player`, saturating at `u128::MAX`.
    pub fn num_pure_strategies(&self, player: Player) -> u128 {
        self.infosets(player)
            .iter()
            .fold(1u128, |acc, i| acc.saturating_mul(i.num_actions() as u128))
    }

    /// Terminal payoffs to player one in tree order.
    pub fn terminal_payoffs(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            Node::Terminal { payoff } => Some(*payoff),
            _ => None,
        })
    }

    /// Wraps a matrix game as a one-shot tree: player one picks a row, then
    /// player two picks a column without observing it.
    pub fn from_matrix(game: &crate::nfg::NormalFormGame) -> Self {
        let mut b = GameBuilder::new("matrix");
        let row_labels: Vec<String> = (0..game.rows()).map(|i| format!("r{i}")).collect();
        let col_labels: Vec<String> = (0..game.cols()).map(|j| format!("c{j}")).collect();
        let mut rows = Vec::with_capacity(game.rows());
        for i in 0..game.rows() {
            let cols = (0..game.cols())
                .map(|j| b.terminal(game.entry(i, j)))
                .collect();
            rows.push(b.decision(Player::Two, "col", &col_labels, cols));
        }
        let root = b.decision(Player::One, "row", &row_labels, rows);
        b.build(root).expect("matrix wrapper is well formed")
    }
}

/// Incremental constructor. Children are added before their parents; the
/// root is the node passed to [`GameBuilder::build`].
#[derive(Debug)]
pub struct GameBuilder {
    name: String,
    nodes: Vec<Node>,
    infosets: [Vec<Infoset>; 2],
    lookup: [HashMap<String, usize>; 2],
    error: Option<Error>,
}

impl GameBuilder {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            nodes: Vec::new(),
            infosets: [Vec::new(), Vec::new()],
            lookup: [HashMap::new(), HashMap::new()],
            error: None,
        }
    }

    pub fn terminal(&mut self, payoff: f64) -> NodeId {
        if !payoff.is_finite() && self.error.is_none() {
            self.error = Some(Error::InvalidGame(format!("non-finite payoff {payoff}")));
        }
        self.push(Node::Terminal { payoff })
    }

    pub fn chance(&mut self, outcomes: Vec<(f64, NodeId)>) -> NodeId {
        self.push(Node::Chance { outcomes })
    }

    /// Adds a decision node in the information set `key` of `player`. The
    /// action labels must agree with every other node of the same set.
    pub fn decision<S: AsRef<str>>(
        &mut self,
        player: Player,
        key: &str,
        actions: &[S],
        children: Vec<NodeId>,
    ) -> NodeId {
        let labels: Vec<String> = actions.iter().map(|a| a.as_ref().to_string()).collect();
        let p = player.index();
        let id = self.nodes.len();
        let infoset = match self.lookup[p].get(key) {
            Some(&i) => {
                if self.infosets[p][i].actions != labels && self.error.is_none() {
                    self.error = Some(Error::InvalidGame(format!(
                        "information set {key:?} of player {player} has inconsistent actions"
                    )));
                }
                self.infosets[p][i].nodes.push(id);
                i
            }
            None => {
                let i = self.infosets[p].len();
                self.lookup[p].insert(key.to_string(), i);
                self.infosets[p].push(Infoset {
                    key: key.to_string(),
                    actions: labels.clone(),
                    nodes: vec![id],
                    own_history: Vec::new(),
                });
                i
            }
        };
        if children.len() != labels.len() && self.error.is_none() {
            self.error = Some(Error::InvalidGame(format!(
                "decision node in {key:?} has {} children for {} actions",
                children.len(),
                labels.len()
            )));
        }
        self.push(Node::Decision {
            player,
            infoset,
            children,
        })
    }

    fn push(&mut self, node: Node) -> NodeId {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    /// Validates the tree and freezes it.
    pub fn build(self, root: NodeId) -> Result<ExtensiveFormGame> {
        if let Some(e) = self.error {
            return Err(e);
        }
        let mut game = ExtensiveFormGame {
            name: self.name,
            nodes: self.nodes,
            root,
            infosets: self.infosets,
        };
        validate(&mut game)?;
        Ok(game)
    }
}

fn validate(game: &mut ExtensiveFormGame) -> Result<()> {
    let n = game.nodes.len();
    if game.root >= n {
        return Err(Error::InvalidGame("root out of range".into()));
    }
    for p in Player::BOTH {
        if let Some(i) = game.infosets[p.index()]
            .iter()
            .find(|i| i.actions.is_empty())
        {
            return Err(Error::InvalidGame(format!(
                "information set {:?} of player {p} has no actions",
                i.key
            )));
        }
    }

    // Walk from the root, checking the tree shape, chance distributions and
    // that every node of an information set shares the owner's history.
    let mut seen = vec![false; n];
    let mut history: [Vec<Option<Vec<(usize, usize)>>>; 2] = [
        vec![None; game.infosets[0].len()],
        vec![None; game.infosets[1].len()],
    ];
    let mut stack: Vec<(NodeId, [Vec<(usize, usize)>; 2])> =
        vec![(game.root, [Vec::new(), Vec::new()])];
    while let Some((id, own)) = stack.pop() {
        if id >= n {
            return Err(Error::InvalidGame(format!("child {id} out of range")));
        }
        if std::mem::replace(&mut seen[id], true) {
            return Err(Error::InvalidGame(format!("node {id} has two parents")));
        }
        match &game.nodes[id] {
            Node::Terminal { .. } => {}
            Node::Chance { outcomes } => {
                if outcomes.is_empty() {
                    return Err(Error::InvalidGame(format!(
                        "chance node {id} has no outcomes"
                    )));
                }
                if outcomes.iter().any(|(p, _)| !(*p >= 0.0)) {
                    return Err(Error::InvalidGame(format!(
                        "chance node {id} has a negative probability"
                    )));
                }
                let total: f64 = outcomes.iter().map(|(p, _)| p).sum();
                if (total - 1.0).abs() > CHANCE_TOL {
                    return Err(Error::InvalidGame(format!(
                        "chance node {id} probabilities sum to {total}"
                    )));
                }
                for &(_, c) in outcomes {
                    stack.push((c, own.clone()));
                }
            }
            Node::Decision {
                player,
                infoset,
                children,
            } => {
                let p = player.index();
                match &history[p][*infoset] {
                    None => history[p][*infoset] = Some(own[p].clone()),
                    Some(h) if *h != own[p] => {
                        return Err(Error::InvalidGame(format!(
                            "perfect recall violated in information set {:?} of player {player}",
                            game.infosets[p][*infoset].key
                        )));
                    }
                    Some(_) => {}
                }
                for (a, &c) in children.iter().enumerate() {
                    let mut next = own.clone();
                    next[p].push((*infoset, a));
                    stack.push((c, next));
                }
            }
        }
    }
    if let Some(orphan) = seen.iter().position(|s| !s) {
        return Err(Error::InvalidGame(format!(
            "node {orphan} is unreachable from the root"
        )));
    }
    for p in 0..2 {
        for (i, h) in history[p].iter_mut().enumerate() {
            game.infosets[p][i].own_history = h.take().unwrap_or_default();
        }
    }
    Ok(())
}

/// One player's behavioral strategy: an action distribution per information set.
#[derive(Clone, Debug, PartialEq)]
pub struct BehavioralStrategy {
    pub probs: Vec<Vec<f64>>,
}

impl BehavioralStrategy {
    pub fn uniform(game: &ExtensiveFormGame, player: Player) -> Self {
        Self {
            probs: game
                .infosets(player)
                .iter()
                .map(|i| vec![1.0 / i.num_actions() as f64; i.num_actions()])
                .collect(),
        }
    }

    /// Deterministic strategy playing `pure.actions[I]` at every set `I`.
    pub fn from_pure(game: &ExtensiveFormGame, player: Player, pure: &PureStrategy) -> Self {
        Self {
            probs: game
                .infosets(player)
                .iter()
                .zip(&pure.actions)
                .map(|(i, &a)| {
                    let mut v = vec![0.0; i.num_actions()];
                    v[a] = 1.0;
                    v
                })
                .collect(),
        }
    }

    /// Checks that the strategy covers every set of `player` with a
    /// distribution of the right length.
    pub fn check(&self, game: &ExtensiveFormGame, player: Player) -> Result<()> {
        let sets = game.infosets(player);
        for (i, set) in sets.iter().enumerate() {
            match self.probs.get(i) {
                Some(p) if p.len() == set.num_actions() => {
                    let s: f64 = p.iter().sum();
                    if p.iter().any(|v| !(*v >= 0.0)) || (s - 1.0).abs() > 1e-9 {
                        return Err(Error::InvalidArgument(format!(
                            "distribution at information set {:?} of player {player} is not a probability vector",
                            set.key
                        )));
                    }
                }
                _ => {
                    return Err(Error::MissingInfoset {
                        player: player.index() + 1,
                        infoset: i,
                    })
                }
            }
        }
        if self.probs.len() != sets.len() {
            return Err(Error::InvalidArgument(format!(
                "strategy has {} information sets, player {player} has {}",
                self.probs.len(),
                sets.len()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BehavioralProfile {
    pub strategies: [BehavioralStrategy; 2],
}

impl BehavioralProfile {
    pub fn new(p1: BehavioralStrategy, p2: BehavioralStrategy) -> Self {
        Self {
            strategies: [p1, p2],
        }
    }

    pub fn uniform(game: &ExtensiveFormGame) -> Self {
        Self::new(
            BehavioralStrategy::uniform(game, Player::One),
            BehavioralStrategy::uniform(game, Player::Two),
        )
    }

    pub fn strategy(&self, player: Player) -> &BehavioralStrategy {
        &self.strategies[player.index()]
    }

    pub fn check(&self, game: &ExtensiveFormGame) -> Result<()> {
        for p in Player::BOTH {
            self.strategy(p).check(game, p)?;
        }
        Ok(())
    }
}

/// One action per information set of a single player.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PureStrategy {
    pub actions: Vec<usize>,
}
