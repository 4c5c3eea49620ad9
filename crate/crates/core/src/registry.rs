//! Game lookup by name.
//!
//! | name                  | game                                     |
//! |-----------------------|------------------------------------------|
//! | `kuhn`                | Kuhn poker tree                          |
//! | `leduc`               | Leduc hold'em tree                       |
//! | `kuhn_nfg`            | Kuhn poker as a 64×64 matrix game        |
//! | `matching_pennies`    | 2×2 matching pennies                     |
//! | `rps`                 | rock-paper-scissors                      |
//! | `matrix:<path>`       | matrix game read from a text file        |
//!
//! `matrix:` paths that do not exist on disk fall back to the bundled files
//! `matching_pennies.txt` and `rps.txt`.

use std::path::Path;

use crate::efg::{efg_to_nfg, ExtensiveFormGame, DEFAULT_ENTRY_CAP};
use crate::error::{Error, Result};
use crate::nfg::NormalFormGame;

pub const GAME_NAMES: [&str; 6] = [
    "kuhn",
    "leduc",
    "kuhn_nfg",
    "matching_pennies",
    "rps",
    "matrix:<path>",
];

const BUNDLED: [(&str, &str); 2] = [
    (
        "matching_pennies.txt",
        include_str!("../data/matching_pennies.txt"),
    ),
    ("rps.txt", include_str!("../data/rps.txt")),
];

#[derive(Clone, Debug)]
pub enum Game {
    Normal(NormalFormGame),
    Extensive(ExtensiveFormGame),
}

impl Game {
    /// The matrix form; trees are converted by pure-strategy enumeration.
    pub fn to_normal(&self) -> Result<NormalFormGame> {
        match self {
            Game::Normal(g) => Ok(g.clone()),
            Game::Extensive(g) => Ok(efg_to_nfg(g, DEFAULT_ENTRY_CAP)?.game),
        }
    }

    /// Bound on `max |a_ij|` of the matrix form: the largest entry, or the
    /// largest terminal payoff of a tree.
    pub fn payoff_bound(&self) -> f64 {
        match self {
            Game::Normal(g) => g.lipschitz(),
            Game::Extensive(g) => g.terminal_payoffs().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    /// The tree form; matrix games become a one-shot simultaneous move.
    pub fn to_extensive(&self) -> ExtensiveFormGame {
        match self {
            Game::Normal(g) => ExtensiveFormGame::from_matrix(g),
            Game::Extensive(g) => g.clone(),
        }
    }
}

/// Default NashPG step size for a registered game.
pub fn default_train_eta(name: &str) -> f64 {
    match name {
        "leduc" => 2.0,
        _ => 0.1,
    }
}

pub fn load_game(name: &str) -> Result<Game> {
    match name {
        "kuhn" => Ok(Game::Extensive(ExtensiveFormGame::kuhn())),
        "leduc" => Ok(Game::Extensive(ExtensiveFormGame::leduc())),
        "kuhn_nfg" => Ok(Game::Normal(
            efg_to_nfg(&ExtensiveFormGame::kuhn(), DEFAULT_ENTRY_CAP)?.game,
        )),
        "matching_pennies" => Ok(Game::Normal(NormalFormGame::matching_pennies())),
        "rps" => Ok(Game::Normal(NormalFormGame::rock_paper_scissors())),
        _ => match name.strip_prefix("matrix:") {
            Some(path) => load_matrix(path).map(Game::Normal),
            None => Err(Error::InvalidArgument(format!(
                "unknown game {name:?}; expected one of {}",
                GAME_NAMES.join(", ")
            ))),
        },
    }
}

fn load_matrix(path: &str) -> Result<NormalFormGame> {
    if Path::new(path).exists() {
        return NormalFormGame::load(path);
    }
    match BUNDLED.iter().find(|(file, _)| *file == path) {
        Some((_, text)) => NormalFormGame::parse(text),
        None => Err(Error::InvalidArgument(format!(
            "matrix file {path:?} not found"
        ))),
    }
}
