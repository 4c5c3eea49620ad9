//! Kuhn and Leduc poker.

use super::{ExtensiveFormGame, GameBuilder, NodeId, Player};

const RANKS: [char; 3] = ['J', 'Q', 'K'];

/// Leduc payoffs are chip deltas divided by this.
pub const LEDUC_REWARD_SCALE: f64 = 20.0;
pub const LEDUC_ANTE: u32 = 1;
pub const LEDUC_RAISES: [u32; 2] = [2, 4];
pub const LEDUC_MAX_RAISES: u32 = 2;

impl ExtensiveFormGame {
    /// Three-card Kuhn poker. Both players ante one chip; actions are
    /// pass (0) and bet (1). Payoffs are raw chip deltas.
    pub fn kuhn() -> Self {
        let mut b = GameBuilder::new("kuhn");
        let actions = ["p", "b"];
        let mut deals = Vec::with_capacity(6);
        for c1 in 0..3usize {
            for c2 in (0..3usize).filter(|&c| c != c1) {
                let showdown = if c1 > c2 { 1.0 } else { -1.0 };
                let k1 = |h: &str| format!("{}:{h}", RANKS[c1]);
                let k2 = |h: &str| format!("{}:{h}", RANKS[c2]);

                // p1 passes
                let pp = b.terminal(showdown);
                let pbp = b.terminal(-1.0);
                let pbb = b.terminal(2.0 * showdown);
                let pb = b.decision(Player::One, &k1("pb"), &actions, vec![pbp, pbb]);
                let p = b.decision(Player::Two, &k2("p"), &actions, vec![pp, pb]);
                // p1 bets
                let bp = b.terminal(1.0);
                let bb = b.terminal(2.0 * showdown);
                let bet = b.decision(Player::Two, &k2("b"), &actions, vec![bp, bb]);

                let root = b.decision(Player::One, &k1(""), &actions, vec![p, bet]);
                deals.push((1.0 / 6.0, root));
            }
        }
        let root = b.chance(deals);
        b.build(root).expect("kuhn poker is well formed")
    }

    /// Leduc poker: six cards (two suits of J, Q, K), ante 1, a betting round
    /// with raise size 2, a public card, then a round with raise size 4. At
    /// most two raises per round; fold is only legal when facing a bet.
    /// Payoffs are chip deltas divided by 20.
    ///
    /// Information sets key on card ranks only. Suits never affect payoffs,
    /// so this merges strategically identical histories.
    pub fn leduc() -> Self {
        let mut b = GameBuilder::new("leduc");
        let mut first = Vec::with_capacity(6);
        for c1 in 0..6usize {
            let mut second = Vec::with_capacity(5);
            for c2 in (0..6usize).filter(|&c| c != c1) {
                let deal = Deal {
                    private: [c1, c2],
                    public: None,
                };
                let node = leduc_round(
                    &mut b,
                    deal,
                    Betting::start(0, [LEDUC_ANTE; 2]),
                    String::new(),
                );
                second.push((1.0 / 5.0, node));
            }
            let node = b.chance(second);
            first.push((1.0 / 6.0, node));
        }
        let root = b.chance(first);
        b.build(root).expect("leduc poker is well formed")
    }
}

/// Free-function forms used by the registry and CLI.
pub fn build_kuhn() -> ExtensiveFormGame {
    ExtensiveFormGame::kuhn()
}

pub fn build_leduc() -> ExtensiveFormGame {
    ExtensiveFormGame::leduc()
}

#[derive(Clone, Copy)]
struct Deal {
    private: [usize; 2],
    public: Option<usize>,
}

impl Deal {
    fn key(&self, player: Player, history: &str) -> String {
        let own = RANKS[self.private[player.index()] / 2];
        let public = self.public.map_or('-', |c| RANKS[c / 2]);
        format!("{own}{public}:{history}")
    }

    /// Player one's chip result at showdown given equal contributions.
    fn showdown(&self, pot_each: u32) -> f64 {
        let public = self.public.expect("showdown after the public card") / 2;
        let strength = |c: usize| {
            let r = c / 2;
            if r == public {
                10 + r
            } else {
                r
            }
        };
        let (s1, s2) = (strength(self.private[0]), strength(self.private[1]));
        let chips = match s1.cmp(&s2) {
            std::cmp::Ordering::Greater => pot_each as f64,
            std::cmp::Ordering::Less => -(pot_each as f64),
            std::cmp::Ordering::Equal => 0.0,
        };
        chips / LEDUC_REWARD_SCALE
    }
}

#[derive(Clone, Copy)]
struct Betting {
    round: usize,
    contrib: [u32; 2],
    raises: u32,
    to_act: Player,
    /// Actions taken so far this round.
    taken: u32,
}

impl Betting {
    fn start(round: usize, contrib: [u32; 2]) -> Self {
        Self {
            round,
            contrib,
            raises: 0,
            to_act: Player::One,
            taken: 0,
        }
    }
}

/// Builds the subtree at a decision point of the current betting round.
/// `history` is the full public action string, rounds separated by `/`.
fn leduc_round(b: &mut GameBuilder, deal: Deal, s: Betting, history: String) -> NodeId {
    let me = s.to_act.index();
    let opp = 1 - me;
    let facing = s.contrib[me] < s.contrib[opp];

    let mut labels: Vec<&str> = Vec::with_capacity(3);
    let mut children = Vec::with_capacity(3);

    if facing {
        // fold: the folder forfeits what they put in
        let chips = s.contrib[me] as f64 / LEDUC_REWARD_SCALE;
        labels.push("f");
        children.push(b.terminal(if me == 0 { -chips } else { chips }));
    }

    // check or call
    {
        let mut next = s;
        next.contrib[me] = s.contrib[opp];
        next.taken += 1;
        let round_over = facing || s.taken >= 1;
        let h = format!("{history}c");
        let child = if !round_over {
            next.to_act = s.to_act.opponent();
            leduc_round(b, deal, next, h)
        } else if s.round == 0 {
            leduc_public_card(b, deal, next.contrib, h)
        } else {
            b.terminal(deal.showdown(next.contrib[0]))
        };
        labels.push("c");
        children.push(child);
    }

    if s.raises < LEDUC_MAX_RAISES {
        let mut next = s;
        next.contrib[me] = s.contrib[opp] + LEDUC_RAISES[s.round];
        next.raises += 1;
        next.taken += 1;
        next.to_act = s.to_act.opponent();
        labels.push("r");
        children.push(leduc_round(b, deal, next, format!("{history}r")));
    }

    let key = deal.key(s.to_act, &history);
    b.decision(s.to_act, &key, &labels, children)
}

fn leduc_public_card(
    b: &mut GameBuilder,
    deal: Deal,
    contrib: [u32; 2],
    history: String,
) -> NodeId {
    let remaining: Vec<usize> = (0..6).filter(|c| !deal.private.contains(c)).collect();
    let p = 1.0 / remaining.len() as f64;
    let outcomes = remaining
        .into_iter()
        .map(|c| {
            let d = Deal {
                public: Some(c),
                ..deal
            };
            (
                p,
                leduc_round(b, d, Betting::start(1, contrib), format!("{history}/")),
            )
        })
        .collect();
    b.chance(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efg::Node;

    #[test]
    fn kuhn_shape() {
        let g = ExtensiveFormGame::kuhn();
        match g.node(g.root()) {
            Node::Chance { outcomes } => assert_eq!(outcomes.len(), 6),
            other => panic!("root is {other:?}"),
        }
        assert_eq!(g.num_infosets(Player::One), 6);
        assert_eq!(g.num_infosets(Player::Two), 6);
        assert_eq!(g.num_pure_strategies(Player::One), 64);
        assert_eq!(g.num_pure_strategies(Player::Two), 64);
        assert_eq!(g.num_nonterminal(), 25);
        assert_eq!(g.num_terminal(), 30);
    }

    #[test]
    fn leduc_histories() {
        let g = ExtensiveFormGame::leduc();
        // 1 + 6 dealing nodes, then 131 non-terminal nodes under each of the
        // 30 private deals; 184 terminals per private deal.
        assert_eq!(g.num_nonterminal(), 3937);
        assert_eq!(g.num_terminal(), 5520);
        let total = g.num_nonterminal() + g.num_terminal();
        assert!((9_000..10_000).contains(&total), "{total}");
    }

    #[test]
    fn leduc_payoff_bounds() {
        let g = ExtensiveFormGame::leduc();
        let max = g.terminal_payoffs().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!((max - 13.0 / 20.0).abs() < 1e-15, "{max}");
        assert!(g.terminal_payoffs().all(|v| v.abs() <= 13.0 / 20.0 + 1e-15));
    }

    #[test]
    fn leduc_raise_cap() {
        let g = ExtensiveFormGame::leduc();
        for p in Player::BOTH {
            for set in g.infosets(p) {
                let history = set.key.split(':').nth(1).unwrap();
                let round = history.rsplit('/').next().unwrap();
                let raises = round.matches('r').count();
                assert_eq!(
                    set.actions.contains(&"r".to_string()),
                    raises < 2,
                    "{}",
                    set.key
                );
                let facing = round.ends_with('r');
                assert_eq!(
                    set.actions.contains(&"f".to_string()),
                    facing,
                    "{}",
                    set.key
                );
            }
        }
    }

    #[test]
    fn leduc_infoset_counts() {
        let g = ExtensiveFormGame::leduc();
        // Round one: 3 private ranks; round two: 3 private x 3 public ranks
        // x 5 ways to reach it. Player one acts at "", "cr", "rr" per round;
        // player two at "c", "r", "crr".
        assert_eq!(g.num_infosets(Player::One), 3 * 3 + 9 * 5 * 3);
        assert_eq!(g.num_infosets(Player::Two), 3 * 3 + 9 * 5 * 3);
    }
}
