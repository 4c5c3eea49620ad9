//! Flat `key=value` configuration.
//!
//! | key               | default                   | meaning                                 |
//! |-------------------|---------------------------|-----------------------------------------|
//! | `kind`            | (required)                | experiment kind                         |
//! | `game`            | (required)                | registry name                           |
//! | `alpha`           | 0.2                       | magnet strength                         |
//! | `eta`             | α/L² or per game          | step size; `L` is the largest payoff    |
//! | `inner`           | 1000                      | inner iterations `K`                    |
//! | `outer`           | 50                        | outer iterations `T`                    |
//! | `inner_tol`       | 1e-9                      | exact-solver inner stopping tolerance   |
//! | `batch`           | 256                       | trajectories per NashPG step            |
//! | `seeds`           | 0,1,2,3                   | comma-separated seeds                   |
//! | `out`             | runs                      | output directory                        |
//! | `alpha_final`     | 0.001                     | anneal target for `α`                   |
//! | `eta_final`       | unset                     | anneal target for `η`                   |
//! | `alphas`          | 0.1,0.2,0.4               | sweep grid                              |
//! | `eval_every`      | K·T/50                    | steps between checkpoints               |
//! | `kl_weighting`    | visit                     | `visit` or `uniform`                    |
//! | `rounds`          | 100                       | tournament rounds                       |
//! | `games_per_match` | 100                       | games per tournament match              |
//! | `k_factor`        | 32                        | Elo K                                   |
//!
//! Blank lines and lines starting with `#` are ignored.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use super::{ExperimentKind, ExperimentSpec};
use crate::error::{Error, Result};
use crate::nashpg::{KlWeighting, TrainConfig};
use crate::registry::{default_train_eta, load_game};
use crate::solvers::{stable_eta, AnnealSchedule, SolverConfig};
use crate::tournament::TournamentConfig;

pub const KEYS: [&str; 18] = [
    "kind",
    "game",
    "alpha",
    "eta",
    "inner",
    "outer",
    "inner_tol",
    "batch",
    "seeds",
    "out",
    "alpha_final",
    "eta_final",
    "alphas",
    "eval_every",
    "kl_weighting",
    "rounds",
    "games_per_match",
    "k_factor",
];

pub type RawConfig = BTreeMap<String, String>;

fn check_key(key: &str) -> Result<()> {
    if KEYS.contains(&key) {
        Ok(())
    } else {
        Err(Error::Config(format!("unknown key {key:?}")))
    }
}

/// Parses `key=value` lines; later duplicates win.
pub fn parse_config(text: &str) -> Result<RawConfig> {
    let mut out = RawConfig::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: idx + 1,
            msg: format!("expected key=value, found {line:?}"),
        })?;
        let key = k.trim();
        check_key(key).map_err(|_| Error::Parse {
            line: idx + 1,
            msg: format!("unknown key {key:?}"),
        })?;
        out.insert(key.to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Applies `overrides` on top of `base`.
pub fn merge(mut base: RawConfig, overrides: &RawConfig) -> Result<RawConfig> {
    for (k, v) in overrides {
        check_key(k)?;
        base.insert(k.clone(), v.clone());
    }
    Ok(base)
}

fn value<T: FromStr>(raw: &RawConfig, key: &str) -> Result<Option<T>> {
    raw.get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|_| Error::Config(format!("{key}: cannot parse {v:?}")))
        })
        .transpose()
}

fn list<T: FromStr>(raw: &RawConfig, key: &str) -> Result<Option<Vec<T>>> {
    raw.get(key)
        .map(|v| {
            let items: Vec<T> = v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<T>()
                        .map_err(|_| Error::Config(format!("{key}: cannot parse {s:?}")))
                })
                .collect::<Result<_>>()?;
            if items.is_empty() {
                return Err(Error::Config(format!("{key}: empty list")));
            }
            Ok(items)
        })
        .transpose()
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

impl ExperimentSpec {
    /// Resolves a raw configuration, filling defaults and validating.
    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        for k in raw.keys() {
            check_key(k)?;
        }
        let kind: ExperimentKind = raw
            .get("kind")
            .ok_or_else(|| Error::Config("missing key \"kind\"".into()))?
            .parse()?;
        let game = raw
            .get("game")
            .ok_or_else(|| Error::Config("missing key \"game\"".into()))?
            .clone();
        let loaded = load_game(&game)?;

        let alpha = value(raw, "alpha")?.unwrap_or(0.2);
        if !(alpha > 0.0 && f64::is_finite(alpha)) {
            return Err(Error::Config(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        let eta: Option<f64> = value(raw, "eta")?;
        let inner = value(raw, "inner")?.unwrap_or(1000);
        let outer = value(raw, "outer")?.unwrap_or(50);
        let alpha_final = value(raw, "alpha_final")?.unwrap_or(0.001);
        let eta_final = value(raw, "eta_final")?;
        let anneal = Some(AnnealSchedule {
            alpha_final,
            eta_final,
        });
        let kl_weighting = match raw.get("kl_weighting").map(String::as_str) {
            None | Some("visit") => KlWeighting::VisitFrequency,
            Some("uniform") => KlWeighting::UniformOverVisited,
            Some(other) => {
                return Err(Error::Config(format!(
                    "kl_weighting must be visit or uniform, got {other:?}"
                )))
            }
        };

        let solver = SolverConfig {
            alpha,
            eta: eta.unwrap_or_else(|| stable_eta(alpha, 1.0, loaded.payoff_bound())),
            inner_tol: value(raw, "inner_tol")?.unwrap_or(SolverConfig::default().inner_tol),
            inner_max_iters: inner,
            outer_iters: outer,
            anneal: None,
        };
        let train = TrainConfig {
            alpha,
            eta: eta.unwrap_or_else(|| default_train_eta(&game)),
            inner_iters: inner,
            outer_iters: outer,
            batch_size: value(raw, "batch")?.unwrap_or(TrainConfig::default().batch_size),
            seed: 0,
            anneal: (kind == ExperimentKind::Anneal).then_some(anneal).flatten(),
            eval_every: value(raw, "eval_every")?,
            kl_weighting,
        };
        let defaults = TournamentConfig::default();
        let tournament = TournamentConfig {
            rounds: value(raw, "rounds")?.unwrap_or(defaults.rounds),
            games_per_match: value(raw, "games_per_match")?.unwrap_or(defaults.games_per_match),
            k_factor: value(raw, "k_factor")?.unwrap_or(defaults.k_factor),
            seed: 0,
        };
        let alphas: Vec<f64> = list(raw, "alphas")?.unwrap_or_else(|| vec![0.1, 0.2, 0.4]);
        if let Some(a) = alphas.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
            return Err(Error::Config(format!("alphas must be positive, got {a}")));
        }
        let seeds = list(raw, "seeds")?.unwrap_or_else(|| vec![0, 1, 2, 3]);
        let out = raw
            .get("out")
            .map_or_else(|| PathBuf::from("runs"), PathBuf::from);

        let spec = Self {
            kind,
            game,
            solver,
            train,
            tournament,
            alpha_final,
            alphas,
            seeds,
            out,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_config_str(text: &str, overrides: &RawConfig) -> Result<Self> {
        Self::from_raw(&merge(parse_config(text)?, overrides)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        let mut train = self.train.clone();
        if train.anneal.is_none() {
            train.anneal = Some(AnnealSchedule {
                alpha_final: self.alpha_final,
                eta_final: None,
            });
        }
        train.validate()?;
        self.tournament.validate()?;
        if self.seeds.is_empty() {
            return Err(Error::Config("at least one seed is required".into()));
        }
        Ok(())
    }

    /// The fully resolved configuration in the input format.
    pub fn to_config_string(&self) -> String {
        let mut lines = vec![
            format!("kind={}", self.kind),
            format!("game={}", self.game),
            format!("alpha={}", self.train.alpha),
            format!("eta={}", self.eta()),
            format!("inner={}", self.train.inner_iters),
            format!("outer={}", self.train.outer_iters),
            format!("inner_tol={}", self.solver.inner_tol),
            format!("batch={}", self.train.batch_size),
            format!("seeds={}", join(&self.seeds)),
            format!("out={}", self.out.display()),
            format!("alpha_final={}", self.alpha_final),
        ];
        if let Some(e) = self.train.anneal.and_then(|a| a.eta_final) {
            lines.push(format!("eta_final={e}"));
        }
        lines.push(format!("alphas={}", join(&self.alphas)));
        if let Some(e) = self.train.eval_every {
            lines.push(format!("eval_every={e}"));
        }
        lines.push(format!(
            "kl_weighting={}",
            match self.train.kl_weighting {
                KlWeighting::VisitFrequency => "visit",
                KlWeighting::UniformOverVisited => "uniform",
            }
        ));
        lines.push(format!("rounds={}", self.tournament.rounds));
        lines.push(format!(
            "games_per_match={}",
            self.tournament.games_per_match
        ));
        lines.push(format!("k_factor={}", self.tournament.k_factor));
        lines.join("\n") + "\n"
    }

    fn eta(&self) -> f64 {
        match self.kind {
            ExperimentKind::SolveNfg | ExperimentKind::SolveEfgExact => self.solver.eta,
            _ => self.train.eta,
        }
    }
}
