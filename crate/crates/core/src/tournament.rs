//! Elo ratings and Swiss-style tournaments between policy checkpoints.

use std::io::Write;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::efg::{ExtensiveFormGame, Player};
use crate::error::{Error, Result};
use crate::nashpg::{rollout, SoftmaxPolicy};

pub const INITIAL_RATING: f64 = 1500.0;

#[derive(Clone, Debug, PartialEq)]
pub struct EloEntry {
    pub id: String,
    pub rating: f64,
}

impl EloEntry {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            rating: INITIAL_RATING,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TournamentConfig {
    pub rounds: usize,
    pub games_per_match: usize,
    pub k_factor: f64,
    pub seed: u64,
}

impl Default for TournamentConfig {
    fn default() -> Self {
        Self {
            rounds: 100,
            games_per_match: 100,
            k_factor: 32.0,
            seed: 0,
        }
    }
}

impl TournamentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 || self.games_per_match == 0 {
            return Err(Error::Config(
                "rounds and games_per_match must be >= 1".into(),
            ));
        }
        if !(self.k_factor > 0.0 && self.k_factor.is_finite()) {
            return Err(Error::Config(format!(
                "k_factor must be > 0, got {}",
                self.k_factor
            )));
        }
        Ok(())
    }
}

/// A tournament entrant: one policy per seat.
#[derive(Clone, Debug, PartialEq)]
pub struct Entrant {
    pub id: String,
    pub policies: [SoftmaxPolicy; 2],
}

/// `E_A = 1 / (1 + 10^((R_B − R_A)/400))`.
pub fn expected_score(rating_a: f64, rating_b: f64) -> f64 {
    1.0 / (1.0 + 10f64.powf((rating_b - rating_a) / 400.0))
}

/// Applies `R ← R + K (S − E)` to both sides; `outcome` is A's score.
pub fn elo_update(
    a: &EloEntry,
    b: &EloEntry,
    outcome: f64,
    k: f64,
) -> Result<(EloEntry, EloEntry)> {
    if ![0.0, 0.5, 1.0].contains(&outcome) {
        return Err(Error::InvalidArgument(format!(
            "match outcome must be 0, 0.5 or 1, got {outcome}"
        )));
    }
    let ea = expected_score(a.rating, b.rating);
    let eb = expected_score(b.rating, a.rating);
    Ok((
        EloEntry {
            id: a.id.clone(),
            rating: a.rating + k * (outcome - ea),
        },
        EloEntry {
            id: b.id.clone(),
            rating: b.rating + k * ((1.0 - outcome) - eb),
        },
    ))
}

fn check_fits(game: &ExtensiveFormGame, policies: &[SoftmaxPolicy; 2]) -> Result<()> {
    for p in Player::BOTH {
        if !policies[p.index()].fits(game, p) {
            return Err(Error::InvalidArgument(format!(
                "policy for player {p} does not match the game's information sets"
            )));
        }
    }
    Ok(())
}

/// Plays `games` games and scores A by the sign of its cumulative return.
///
/// Games come in pairs sharing one random stream: A takes seat one in the
/// first game of a pair and seat two in the second.
pub fn play_match(
    game: &ExtensiveFormGame,
    a: &[SoftmaxPolicy; 2],
    b: &[SoftmaxPolicy; 2],
    games: usize,
    seed: u64,
) -> Result<f64> {
    check_fits(game, a)?;
    check_fits(game, b)?;
    let ta = [a[0].prob_table(), a[1].prob_table()];
    let tb = [b[0].prob_table(), b[1].prob_table()];
    let a_first = [ta[0].clone(), tb[1].clone()];
    let b_first = [tb[0].clone(), ta[1].clone()];
    let mut seeder = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for g in 0..games {
        if g % 2 == 0 {
            let pair_seed: u64 = seeder.random();
            let mut rng = ChaCha8Rng::seed_from_u64(pair_seed);
            total += rollout(game, &a_first, &mut rng).payoff;
            if g + 1 < games {
                let mut rng = ChaCha8Rng::seed_from_u64(pair_seed);
                total -= rollout(game, &b_first, &mut rng).payoff;
            }
        }
    }
    Ok(if total > 0.0 {
        1.0
    } else if total < 0.0 {
        0.0
    } else {
        0.5
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchRecord {
    pub round: usize,
    pub id_a: String,
    pub id_b: String,
    pub outcome: f64,
    pub rating_a_after: f64,
    pub rating_b_after: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TournamentResult {
    /// Final ratings, best first.
    pub standings: Vec<EloEntry>,
    pub history: Vec<MatchRecord>,
    /// Sum of all ratings after each round.
    pub rating_sums: Vec<f64>,
}

impl TournamentResult {
    pub const HISTORY_HEADER: &'static str =
        "round,id_a,id_b,outcome,rating_a_after,rating_b_after";
    pub const STANDINGS_HEADER: &'static str = "rank,id,rating";

    pub fn rating(&self, id: &str) -> Option<f64> {
        self.standings.iter().find(|e| e.id == id).map(|e| e.rating)
    }

    pub fn write_history_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", Self::HISTORY_HEADER)?;
        for m in &self.history {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                m.round, m.id_a, m.id_b, m.outcome, m.rating_a_after, m.rating_b_after
            )?;
        }
        Ok(())
    }

    pub fn write_standings_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", Self::STANDINGS_HEADER)?;
        for (rank, e) in self.standings.iter().enumerate() {
            writeln!(w, "{},{},{}", rank + 1, e.id, e.rating)?;
        }
        Ok(())
    }
}

fn sort_by_rating(order: &mut [usize], ratings: &[EloEntry]) {
    order.sort_by(|&i, &j| {
        ratings[j]
            .rating
            .total_cmp(&ratings[i].rating)
            .then_with(|| ratings[i].id.cmp(&ratings[j].id))
    });
}

/// Swiss tournament: each round sorts by rating (ties by id), pairs
/// neighbours, gives the odd one out a bye and applies all rating changes
/// once the round is over.
pub fn swiss_tournament(
    game: &ExtensiveFormGame,
    entrants: &[Entrant],
    cfg: &TournamentConfig,
) -> Result<TournamentResult> {
    cfg.validate()?;
    if entrants.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "a tournament needs at least 2 entrants, got {}",
            entrants.len()
        )));
    }
    for e in entrants {
        check_fits(game, &e.policies)?;
    }
    let mut ids: Vec<&str> = entrants.iter().map(|e| e.id.as_str()).collect();
    ids.sort_unstable();
    if ids.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument("entrant ids must be unique".into()));
    }

    let mut ratings: Vec<EloEntry> = entrants
        .iter()
        .map(|e| EloEntry::new(e.id.clone()))
        .collect();
    let mut seeder = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut history = Vec::new();
    let mut rating_sums = Vec::with_capacity(cfg.rounds);
    let mut order: Vec<usize> = (0..entrants.len()).collect();

    for round in 1..=cfg.rounds {
        sort_by_rating(&mut order, &ratings);
        let pairs: Vec<(usize, usize, u64)> = order
            .chunks_exact(2)
            .map(|c| (c[0], c[1], seeder.random()))
            .collect();
        let outcomes: Vec<f64> = pairs
            .par_iter()
            .map(|&(i, j, seed)| {
                play_match(
                    game,
                    &entrants[i].policies,
                    &entrants[j].policies,
                    cfg.games_per_match,
                    seed,
                )
            })
            .collect::<Result<_>>()?;
        let mut next = ratings.clone();
        for (&(i, j, _), &outcome) in pairs.iter().zip(&outcomes) {
            let (a, b) = elo_update(&ratings[i], &ratings[j], outcome, cfg.k_factor)?;
            history.push(MatchRecord {
                round,
                id_a: a.id.clone(),
                id_b: b.id.clone(),
                outcome,
                rating_a_after: a.rating,
                rating_b_after: b.rating,
            });
            next[i] = a;
            next[j] = b;
        }
        ratings = next;
        rating_sums.push(ratings.iter().map(|e| e.rating).sum());
    }

    sort_by_rating(&mut order, &ratings);
    Ok(TournamentResult {
        standings: order.iter().map(|&i| ratings[i].clone()).collect(),
        history,
        rating_sums,
    })
}

fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && v[idx[end]] == v[idx[start]] {
            end += 1;
        }
        let rank = (start + end - 1) as f64 / 2.0 + 1.0;
        for &i in &idx[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties; zero when either
/// side is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "spearman needs paired samples");
    let (rx, ry) = (average_ranks(x), average_ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}
