//! Reference computations used by the integration tests. They only rely on
//! the public game structure, never on the solver or estimator code paths
//! they are compared against.

#![allow(dead_code)]

use nashpg::efg::{BehavioralProfile, BehavioralStrategy, ExtensiveFormGame, Node, Player};
use nashpg::nashpg::SoftmaxPolicy;
use nashpg::nfg::{MixedProfile, NormalFormGame};
use rand::{Rng, RngExt};

pub fn random_game<R: Rng>(rng: &mut R, m: usize, n: usize) -> NormalFormGame {
    let entries = (0..m * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    NormalFormGame::new(m, n, entries).unwrap()
}

/// Uniform draw from the open simplex.
pub fn random_simplex<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n)
        .map(|_| -(1.0 - rng.random::<f64>()).ln() + 1e-9)
        .collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|v| v / s).collect()
}

pub fn random_profile<R: Rng>(rng: &mut R, m: usize, n: usize) -> MixedProfile {
    MixedProfile::new(random_simplex(rng, m), random_simplex(rng, n)).unwrap()
}

pub fn entropy_divergence(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .filter(|(p, _)| **p > 0.0)
        .map(|(p, q)| p * (p / q).ln())
        .sum()
}

pub fn profile_divergence(a: &MixedProfile, b: &MixedProfile) -> f64 {
    entropy_divergence(&a.x, &b.x) + entropy_divergence(&a.y, &b.y)
}

/// `max_i Σ_j a_ij y_j − min_j Σ_i a_ij x_i`, halved, by explicit loops.
pub fn brute_exploitability(game: &NormalFormGame, z: &MixedProfile) -> f64 {
    let (m, n) = (game.rows(), game.cols());
    let mut best_row = f64::NEG_INFINITY;
    for i in 0..m {
        let v: f64 = (0..n).map(|j| game.entry(i, j) * z.y[j]).sum();
        best_row = best_row.max(v);
    }
    let mut best_col = f64::INFINITY;
    for j in 0..n {
        let v: f64 = (0..m).map(|i| game.entry(i, j) * z.x[i]).sum();
        best_col = best_col.min(v);
    }
    (best_row - best_col) / 2.0
}

pub fn brute_payoff(game: &NormalFormGame, z: &MixedProfile) -> f64 {
    let mut v = 0.0;
    for i in 0..game.rows() {
        for j in 0..game.cols() {
            v += z.x[i] * game.entry(i, j) * z.y[j];
        }
    }
    v
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).abs()).sum()
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(p, q)| p * q).sum();
    let na: f64 = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    dot / (na * nb)
}

fn probs_of(profile: &BehavioralProfile, player: Player, infoset: usize) -> &[f64] {
    &profile.strategy(player).probs[infoset]
}

/// Expected payoff to player one by plain recursion.
pub fn tree_value(game: &ExtensiveFormGame, profile: &BehavioralProfile) -> f64 {
    fn go(game: &ExtensiveFormGame, profile: &BehavioralProfile, id: usize) -> f64 {
        match game.node(id) {
            Node::Terminal { payoff } => *payoff,
            Node::Chance { outcomes } => outcomes
                .iter()
                .map(|(p, c)| p * go(game, profile, *c))
                .sum(),
            Node::Decision {
                player,
                infoset,
                children,
            } => probs_of(profile, *player, *infoset)
                .iter()
                .zip(children)
                .map(|(p, c)| p * go(game, profile, *c))
                .sum(),
        }
    }
    go(game, profile, game.root())
}

/// Every pure strategy of `player` as a behavioral strategy.
pub fn all_pure(game: &ExtensiveFormGame, player: Player) -> Vec<BehavioralStrategy> {
    let sets = game.infosets(player);
    let mut out = vec![Vec::<usize>::new()];
    for set in sets {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..set.num_actions()).map(move |a| {
                    let mut v = prefix.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
    }
    out.into_iter()
        .map(|choice| BehavioralStrategy {
            probs: sets
                .iter()
                .zip(choice)
                .map(|(set, a)| {
                    (0..set.num_actions())
                        .map(|b| if a == b { 1.0 } else { 0.0 })
                        .collect()
                })
                .collect(),
        })
        .collect()
}

/// Exploitability by trying every pure deviation of each player.
pub fn enumerated_exploitability(game: &ExtensiveFormGame, profile: &BehavioralProfile) -> f64 {
    let v = tree_value(game, profile);
    let p1 = profile.strategy(Player::One).clone();
    let p2 = profile.strategy(Player::Two).clone();
    let br1 = all_pure(game, Player::One)
        .into_iter()
        .map(|s| tree_value(game, &BehavioralProfile::new(s, p2.clone())))
        .fold(f64::NEG_INFINITY, f64::max);
    let br2 = all_pure(game, Player::Two)
        .into_iter()
        .map(|s| tree_value(game, &BehavioralProfile::new(p1.clone(), s)))
        .fold(f64::INFINITY, f64::min);
    ((br1 - v) + (v - br2)) / 2.0
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|l| (l - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|v| v / s).collect()
}

pub fn policy_profile(policies: &[SoftmaxPolicy; 2]) -> BehavioralProfile {
    let conv = |p: &SoftmaxPolicy| BehavioralStrategy {
        probs: p.logits.iter().map(|l| softmax(l)).collect(),
    };
    BehavioralProfile::new(conv(&policies[0]), conv(&policies[1]))
}

/// Exact `∇_θ E[R_player]` for tabular softmax policies:
/// `Σ_{h∈I} P(h) π(b|I) (Q(h,b) − V(h))` per information set and action.
pub fn exact_policy_gradient(
    game: &ExtensiveFormGame,
    policies: &[SoftmaxPolicy; 2],
    player: Player,
) -> Vec<Vec<f64>> {
    let profile = policy_profile(policies);
    let mut grad: Vec<Vec<f64>> = policies[player.index()]
        .logits
        .iter()
        .map(|l| vec![0.0; l.len()])
        .collect();
    fn go(
        game: &ExtensiveFormGame,
        profile: &BehavioralProfile,
        player: Player,
        id: usize,
        reach: f64,
        grad: &mut Vec<Vec<f64>>,
    ) -> f64 {
        match game.node(id) {
            Node::Terminal { payoff } => player.sign() * payoff,
            Node::Chance { outcomes } => outcomes
                .iter()
                .map(|(p, c)| p * go(game, profile, player, *c, reach * p, grad))
                .sum(),
            Node::Decision {
                player: actor,
                infoset,
                children,
            } => {
                let probs = probs_of(profile, *actor, *infoset).to_vec();
                let q: Vec<f64> = probs
                    .iter()
                    .zip(children)
                    .map(|(p, c)| go(game, profile, player, *c, reach * p, grad))
                    .collect();
                let v: f64 = probs.iter().zip(&q).map(|(p, q)| p * q).sum();
                if *actor == player {
                    for (b, (p, qb)) in probs.iter().zip(&q).enumerate() {
                        grad[*infoset][b] += reach * p * (qb - v);
                    }
                }
                v
            }
        }
    }
    go(game, &profile, player, game.root(), 1.0, &mut grad);
    grad
}

/// Probability that play under the joint policy reaches each information
/// set of `player`.
pub fn infoset_reach(
    game: &ExtensiveFormGame,
    policies: &[SoftmaxPolicy; 2],
    player: Player,
) -> Vec<f64> {
    let profile = policy_profile(policies);
    let mut reach = vec![0.0; game.infosets(player).len()];
    let mut stack = vec![(game.root(), 1.0)];
    while let Some((id, r)) = stack.pop() {
        match game.node(id) {
            Node::Terminal { .. } => {}
            Node::Chance { outcomes } => stack.extend(outcomes.iter().map(|(p, c)| (*c, r * p))),
            Node::Decision {
                player: actor,
                infoset,
                children,
            } => {
                if *actor == player {
                    reach[*infoset] += r;
                }
                let probs = probs_of(&profile, *actor, *infoset);
                stack.extend(children.iter().zip(probs).map(|(c, p)| (*c, r * p)));
            }
        }
    }
    reach
}

pub fn kl(logits: &[f64], reference: &[f64]) -> f64 {
    entropy_divergence(&softmax(logits), &softmax(reference))
}

/// Central-difference gradient of `KL(softmax(θ) ‖ softmax(ref))`.
pub fn kl_gradient_fd(logits: &[f64], reference: &[f64], h: f64) -> Vec<f64> {
    (0..logits.len())
        .map(|i| {
            let mut up = logits.to_vec();
            let mut down = logits.to_vec();
            up[i] += h;
            down[i] -= h;
            (kl(&up, reference) - kl(&down, reference)) / (2.0 * h)
        })
        .collect()
}

/// `E_{o∼π}[∇ KL]` with each information set weighted by its reach, using
/// finite-difference KL gradients.
pub fn expected_kl_gradient(
    game: &ExtensiveFormGame,
    policies: &[SoftmaxPolicy; 2],
    reference: &SoftmaxPolicy,
    player: Player,
) -> Vec<Vec<f64>> {
    let reach = infoset_reach(game, policies, player);
    policies[player.index()]
        .logits
        .iter()
        .zip(&reference.logits)
        .zip(reach)
        .map(|((l, r), w)| {
            kl_gradient_fd(l, r, 1e-5)
                .into_iter()
                .map(|g| w * g)
                .collect()
        })
        .collect()
}

pub fn random_policy<R: Rng>(
    rng: &mut R,
    game: &ExtensiveFormGame,
    player: Player,
    scale: f64,
) -> SoftmaxPolicy {
    let mut p = SoftmaxPolicy::uniform(game, player);
    for l in p.logits.iter_mut().flatten() {
        *l = rng.random_range(-scale..scale);
    }
    p
}

/// Policies reproducing a behavioral profile with interior probabilities.
pub fn policies_from(profile: &BehavioralProfile) -> [SoftmaxPolicy; 2] {
    Player::BOTH.map(|p| SoftmaxPolicy {
        logits: profile
            .strategy(p)
            .probs
            .iter()
            .map(|row| row.iter().map(|v| v.max(1e-300).ln()).collect())
            .collect(),
    })
}

pub fn spearman_oracle(x: &[f64], y: &[f64]) -> f64 {
    // Distinct values only: 1 − 6 Σ d² / (n (n² − 1)).
    let rank = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .map(|a| v.iter().filter(|b| *b < a).count() as f64)
            .collect()
    };
    let (rx, ry) = (rank(x), rank(y));
    let n = x.len() as f64;
    let d2: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - b).powi(2)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

/// The closed-form Kuhn equilibrium in which player one never bets first.
pub fn kuhn_equilibrium(game: &ExtensiveFormGame) -> BehavioralProfile {
    let bet = |p: f64| vec![1.0 - p, p];
    let table = [
        vec![
            ("J:", 0.0),
            ("Q:", 0.0),
            ("K:", 0.0),
            ("J:pb", 0.0),
            ("Q:pb", 1.0 / 3.0),
            ("K:pb", 1.0),
        ],
        vec![
            ("J:p", 1.0 / 3.0),
            ("Q:p", 0.0),
            ("K:p", 1.0),
            ("J:b", 0.0),
            ("Q:b", 1.0 / 3.0),
            ("K:b", 1.0),
        ],
    ];
    let [s1, s2] = Player::BOTH.map(|p| {
        let mut probs = vec![Vec::new(); game.num_infosets(p)];
        for (key, b) in &table[p.index()] {
            probs[game.infoset_index(p, key).expect("kuhn key")] = bet(*b);
        }
        BehavioralStrategy { probs }
    });
    BehavioralProfile::new(s1, s2)
}

/// Policies that always pass in Kuhn poker, folding whenever bet into.
pub fn always_pass(game: &ExtensiveFormGame) -> [SoftmaxPolicy; 2] {
    Player::BOTH.map(|p| SoftmaxPolicy {
        logits: game.infosets(p).iter().map(|_| vec![0.0, -800.0]).collect(),
    })
}

/// Solves `M v = b` by Gaussian elimination with partial pivoting.
fn solve_linear(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut v = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * v[c]).sum();
        v[r] = (b[r] - s) / m[r][r];
    }
    Some(v)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|mask| mask.count_ones() as usize == k)
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect()
}

/// Equalizing strategy over `support`: weights `w` on the columns of
/// `payoff(i, j)` (rows `others`) making every row in `others` worth `v`.
fn equalize(
    payoff: &dyn Fn(usize, usize) -> f64,
    others: &[usize],
    support: &[usize],
) -> Option<(Vec<f64>, f64)> {
    let k = support.len();
    let mut m = vec![vec![0.0; k + 1]; k + 1];
    let mut b = vec![0.0; k + 1];
    for (r, &i) in others.iter().enumerate() {
        for (c, &j) in support.iter().enumerate() {
            m[r][c] = payoff(i, j);
        }
        m[r][k] = -1.0;
    }
    for c in 0..k {
        m[k][c] = 1.0;
    }
    b[k] = 1.0;
    let sol = solve_linear(m, b)?;
    Some((sol[..k].to_vec(), sol[k]))
}

/// An exact equilibrium of a small nondegenerate matrix game found by
/// support enumeration.
pub fn support_enumeration(game: &NormalFormGame) -> Option<MixedProfile> {
    let (m, n) = (game.rows(), game.cols());
    for k in 1..=m.min(n) {
        for rows in subsets(m, k) {
            for cols in subsets(n, k) {
                let Some((ys, v)) = equalize(&|i, j| game.entry(i, j), &rows, &cols) else {
                    continue;
                };
                let Some((xs, w)) = equalize(&|j, i| game.entry(i, j), &cols, &rows) else {
                    continue;
                };
                if ys.iter().chain(&xs).any(|p| *p < -1e-12) || (v - w).abs() > 1e-9 {
                    continue;
                }
                let mut x = vec![0.0; m];
                let mut y = vec![0.0; n];
                rows.iter().zip(&xs).for_each(|(&i, &p)| x[i] = p.max(0.0));
                cols.iter().zip(&ys).for_each(|(&j, &p)| y[j] = p.max(0.0));
                let z = MixedProfile::new(x, y).ok()?;
                if brute_exploitability(game, &z) < 1e-10 {
                    return Some(z);
                }
            }
        }
    }
    None
}
