//! Experiment orchestration: resolved specs, per-seed runs and CSV output.
//!
//! Every run writes `manifest.txt`, the resolved configuration in the input
//! format, next to its CSV files.

mod config;

use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

pub use config::{merge, parse_config, RawConfig, KEYS};

use crate::efg::{
    self, efg_to_nfg, BehavioralProfile, ExtensiveFormGame, Player, DEFAULT_ENTRY_CAP,
};
use crate::error::{Error, Result};
use crate::nashpg::{checkpoint, train_anneal, train_nashpg, TrainConfig, TrainRecord};
use crate::nfg::{self, BregmanGeometry, MixedProfile};
use crate::registry::{load_game, Game};
use crate::solvers::{iterative_m, SolverConfig};
use crate::tournament::{spearman, swiss_tournament, Entrant, TournamentConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    SolveNfg,
    SolveEfgExact,
    Nashpg,
    Anneal,
    AlphaSweep,
    Tournament,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::SolveNfg,
        ExperimentKind::SolveEfgExact,
        ExperimentKind::Nashpg,
        ExperimentKind::Anneal,
        ExperimentKind::AlphaSweep,
        ExperimentKind::Tournament,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::SolveNfg => "solve_nfg",
            ExperimentKind::SolveEfgExact => "solve_efg_exact",
            ExperimentKind::Nashpg => "nashpg",
            ExperimentKind::Anneal => "anneal",
            ExperimentKind::AlphaSweep => "alpha_sweep",
            ExperimentKind::Tournament => "tournament",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment kind {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub game: String,
    pub solver: SolverConfig,
    /// `seed` is replaced per run.
    pub train: TrainConfig,
    /// `seed` is replaced per run.
    pub tournament: TournamentConfig,
    pub alpha_final: f64,
    pub alphas: Vec<f64>,
    pub seeds: Vec<u64>,
    pub out: PathBuf,
}

/// Per-checkpoint statistics across seeds.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRow {
    pub step: usize,
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
}

/// Mean and sample standard deviation; `sd` is zero for a single value.
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn aggregate(records: &[TrainRecord]) -> Result<Vec<AggregateRow>> {
    let first = records
        .first()
        .ok_or_else(|| Error::InvalidArgument("no records to aggregate".into()))?;
    let mut rows = Vec::with_capacity(first.checkpoints.len());
    for (i, c) in first.checkpoints.iter().enumerate() {
        let values: Vec<f64> = records
            .iter()
            .map(|r| match r.checkpoints.get(i) {
                Some(o) if o.step == c.step => Ok(o.exploitability),
                _ => Err(Error::InvalidArgument(
                    "records have different checkpoints".into(),
                )),
            })
            .collect::<Result<_>>()?;
        let (mean, sd) = mean_sd(&values);
        rows.push(AggregateRow {
            step: c.step,
            mean,
            sd,
            n: values.len(),
        });
    }
    Ok(rows)
}

pub const AGGREGATE_HEADER: &str = "step,mean,sd,n";

fn write_aggregate(path: &Path, rows: &[AggregateRow]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{AGGREGATE_HEADER}")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.step, r.mean, r.sd, r.n)?;
    }
    w.flush()?;
    Ok(())
}

fn write_with<F>(path: &Path, f: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let mut w = BufWriter::new(File::create(path)?);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

/// What a run produced.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    /// Human-readable summary lines.
    pub lines: Vec<String>,
    pub files: Vec<PathBuf>,
}

impl Report {
    fn file(&mut self, path: PathBuf) -> &Path {
        self.files.push(path);
        self.files.last().unwrap()
    }
}

/// Runs `spec`, writing all artifacts under `spec.out`.
pub fn run(spec: &ExperimentSpec) -> Result<Report> {
    spec.validate()?;
    fs::create_dir_all(&spec.out)?;
    let mut report = Report::default();
    let manifest = spec.out.join("manifest.txt");
    fs::write(report.file(manifest), spec.to_config_string())?;
    let game = load_game(&spec.game)?;
    log::info!("running {} on {}", spec.kind, spec.game);
    match spec.kind {
        ExperimentKind::SolveNfg => solve_nfg(spec, &game, &mut report)?,
        ExperimentKind::SolveEfgExact => solve_efg_exact(spec, &game, &mut report)?,
        ExperimentKind::Nashpg | ExperimentKind::Anneal => {
            train_seeds(
                spec,
                &game.to_extensive(),
                &spec.train,
                &spec.out,
                &mut report,
            )?;
        }
        ExperimentKind::AlphaSweep => alpha_sweep(spec, &game.to_extensive(), &mut report)?,
        ExperimentKind::Tournament => tournament(spec, &game.to_extensive(), &mut report)?,
    }
    Ok(report)
}

fn solve_nfg(spec: &ExperimentSpec, game: &Game, report: &mut Report) -> Result<()> {
    let nfg = game.to_normal()?;
    let z0 = MixedProfile::uniform(nfg.rows(), nfg.cols());
    let rec = iterative_m(
        &nfg,
        BregmanGeometry::NegativeEntropy,
        &z0,
        &spec.solver,
        None,
    )?;
    write_with(report.file(spec.out.join("solve.csv")), |w| {
        rec.write_csv(w)
    })?;
    let last = rec.last().expect("at least the initial row");
    report
        .lines
        .push(format!("final exploitability {:e}", last.exploitability));
    report
        .lines
        .push(format!("game value {}", nfg::payoff(&nfg, &last.profile)?));
    Ok(())
}

fn solve_efg_exact(spec: &ExperimentSpec, game: &Game, report: &mut Report) -> Result<()> {
    let Game::Extensive(tree) = game else {
        return Err(Error::Config(format!("{} is not a tree game", spec.game)));
    };
    let conv = efg_to_nfg(tree, DEFAULT_ENTRY_CAP)?;
    let z0 = MixedProfile::uniform(conv.game.rows(), conv.game.cols());
    let rec = iterative_m(
        &conv.game,
        BregmanGeometry::NegativeEntropy,
        &z0,
        &spec.solver,
        None,
    )?;
    write_with(report.file(spec.out.join("solve.csv")), |w| {
        rec.write_csv(w)
    })?;
    let last = rec.last().expect("at least the initial row");
    let behavioral = conv.to_behavioral(tree, &last.profile);
    write_with(report.file(spec.out.join("strategy.csv")), |w| {
        write_behavioral(w, tree, &behavioral)
    })?;
    report.lines.push(format!(
        "normal-form exploitability {:e}",
        last.exploitability
    ));
    report.lines.push(format!(
        "tree exploitability {:e}",
        efg::exploitability(tree, &behavioral)?
    ));
    report.lines.push(format!(
        "game value {}",
        efg::expected_payoff(tree, &behavioral)?
    ));
    Ok(())
}

pub const STRATEGY_HEADER: &str = "player,infoset,action,probability";

fn write_behavioral<W: Write>(
    w: &mut W,
    game: &ExtensiveFormGame,
    profile: &BehavioralProfile,
) -> std::io::Result<()> {
    writeln!(w, "{STRATEGY_HEADER}")?;
    for p in Player::BOTH {
        for (info, probs) in game.infosets(p).iter().zip(&profile.strategy(p).probs) {
            for (action, prob) in info.actions.iter().zip(probs) {
                writeln!(w, "{p},{},{action},{prob}", info.key)?;
            }
        }
    }
    Ok(())
}

fn train_one(game: &ExtensiveFormGame, cfg: &TrainConfig) -> Result<TrainRecord> {
    if cfg.anneal.is_some() {
        train_anneal(game, cfg)
    } else {
        train_nashpg(game, cfg)
    }
}

/// Trains one run per seed; writes `seed_<s>.csv`, `seed_<s>.policy` and
/// `aggregate.csv` into `dir`.
fn train_seeds(
    spec: &ExperimentSpec,
    game: &ExtensiveFormGame,
    cfg: &TrainConfig,
    dir: &Path,
    report: &mut Report,
) -> Result<Vec<TrainRecord>> {
    fs::create_dir_all(dir)?;
    let records: Vec<TrainRecord> = spec
        .seeds
        .par_iter()
        .map(|&seed| {
            log::info!("training seed {seed}");
            train_one(
                game,
                &TrainConfig {
                    seed,
                    ..cfg.clone()
                },
            )
        })
        .collect::<Result<_>>()?;
    for (seed, rec) in spec.seeds.iter().zip(&records) {
        write_with(report.file(dir.join(format!("seed_{seed}.csv"))), |w| {
            rec.write_csv(w)
        })?;
        let last = rec.checkpoints.last().expect("initial checkpoint");
        checkpoint::save(
            report.file(dir.join(format!("seed_{seed}.policy"))),
            &last.policies,
        )?;
    }
    let rows = aggregate(&records)?;
    write_aggregate(report.file(dir.join("aggregate.csv")), &rows)?;
    let finals: Vec<f64> = records
        .iter()
        .filter_map(TrainRecord::final_exploitability)
        .collect();
    let (mean, sd) = mean_sd(&finals);
    report.lines.push(format!(
        "alpha {}: final exploitability {mean:.4} ± {sd:.4} over {} seeds",
        cfg.alpha,
        finals.len()
    ));
    Ok(records)
}

pub const SWEEP_HEADER_PREFIX: &str = "alpha";

fn alpha_sweep(spec: &ExperimentSpec, game: &ExtensiveFormGame, report: &mut Report) -> Result<()> {
    let mut table = Vec::with_capacity(spec.alphas.len());
    for &alpha in &spec.alphas {
        let dir = spec.out.join(format!("alpha_{alpha}"));
        let cfg = TrainConfig {
            alpha,
            ..spec.train.clone()
        };
        let records = train_seeds(spec, game, &cfg, &dir, report)?;
        let finals: Vec<f64> = records
            .iter()
            .filter_map(TrainRecord::final_exploitability)
            .collect();
        table.push((alpha, mean_sd(&finals)));
    }
    let game_name = &spec.game;
    write_with(report.file(spec.out.join("sweep.csv")), |w| {
        writeln!(
            w,
            "{SWEEP_HEADER_PREFIX},{game_name}_mean,{game_name}_sd,{game_name}"
        )?;
        for (alpha, (mean, sd)) in &table {
            writeln!(w, "{alpha},{mean},{sd},{mean:.4} ± {sd:.4}")?;
        }
        Ok(())
    })?;
    report.lines.push(format!("{:<8} {game_name}", "alpha"));
    for (alpha, (mean, sd)) in &table {
        report.lines.push(format!("{alpha:<8} {mean:.4} ± {sd:.4}"));
    }
    Ok(())
}

/// Fractions of the training budget at which tournament entrants are taken.
pub const TOURNAMENT_FRACTIONS: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

/// Checkpoints of `rec` nearest to each of [`TOURNAMENT_FRACTIONS`].
pub fn quartile_entrants(rec: &TrainRecord, prefix: &str) -> Result<Vec<(usize, Entrant)>> {
    let last = rec
        .checkpoints
        .last()
        .ok_or_else(|| Error::InvalidArgument("empty training record".into()))?;
    TOURNAMENT_FRACTIONS
        .iter()
        .map(|f| {
            let target = (f * last.step as f64).round() as usize;
            let c = rec
                .checkpoints
                .iter()
                .min_by_key(|c| c.step.abs_diff(target))
                .expect("non-empty");
            Ok((
                c.step,
                Entrant {
                    id: format!("{prefix}step{}", c.step),
                    policies: c.policies.clone(),
                },
            ))
        })
        .collect()
}

fn tournament(spec: &ExperimentSpec, game: &ExtensiveFormGame, report: &mut Report) -> Result<()> {
    let base = TrainConfig {
        anneal: None,
        ..spec.train.clone()
    };
    let first = spec.seeds[0];
    let rec = train_nashpg(
        game,
        &TrainConfig {
            seed: first,
            ..base
        },
    )?;
    write_with(
        report.file(spec.out.join(format!("train_seed_{first}.csv"))),
        |w| rec.write_csv(w),
    )?;
    let (steps, entrants): (Vec<usize>, Vec<Entrant>) =
        quartile_entrants(&rec, "")?.into_iter().unzip();
    for &seed in &spec.seeds {
        let cfg = TournamentConfig {
            seed,
            ..spec.tournament.clone()
        };
        let res = swiss_tournament(game, &entrants, &cfg)?;
        write_with(
            report.file(spec.out.join(format!("history_seed_{seed}.csv"))),
            |w| res.write_history_csv(w),
        )?;
        write_with(
            report.file(spec.out.join(format!("standings_seed_{seed}.csv"))),
            |w| res.write_standings_csv(w),
        )?;
        let ratings: Vec<f64> = entrants
            .iter()
            .map(|e| res.rating(&e.id).expect("every entrant is rated"))
            .collect();
        let progress: Vec<f64> = steps.iter().map(|&s| s as f64).collect();
        let standings: Vec<String> = res
            .standings
            .iter()
            .map(|e| format!("{} {:.0}", e.id, e.rating))
            .collect();
        report.lines.push(format!(
            "seed {seed}: spearman {:.2}; {}",
            spearman(&progress, &ratings),
            standings.join(", ")
        ));
    }
    Ok(())
}

/// Exploitability of a saved checkpoint.
pub fn evaluate_checkpoint(game_name: &str, path: impl AsRef<Path>) -> Result<f64> {
    let game = load_game(game_name)?.to_extensive();
    let policies = checkpoint::load(path, &game)?;
    efg::exploitability(&game, &crate::nashpg::to_profile(&policies))
}
