use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nashpg::experiment::{self, ExperimentKind, ExperimentSpec, RawConfig};
use nashpg::registry::{load_game, Game};

/// Zero-sum game solvers and Nash policy gradient experiments.
#[derive(Parser, Debug)]
#[command(name = "nashpg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve exactly with iterated regularized mirror descent.
    Solve(Common),
    /// Train tabular NashPG policies.
    Train(Common),
    /// Train against a uniform reference with a decaying magnet.
    Anneal(Common),
    /// Sweep the magnet strength.
    Sweep(Common),
    /// Rank training checkpoints in a Swiss tournament.
    Tournament(Common),
    /// Exploitability of a saved policy checkpoint.
    Evaluate {
        #[arg(long)]
        game: String,
        #[arg(long)]
        policy: PathBuf,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Flat key=value file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    game: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<String>,
    /// Inner iterations K.
    #[arg(long)]
    inner: Option<String>,
    /// Outer iterations T.
    #[arg(long)]
    outer: Option<String>,
    #[arg(long)]
    batch: Option<String>,
    /// Comma-separated seeds.
    #[arg(long)]
    seeds: Option<String>,
    /// Comma-separated magnet strengths for `sweep`.
    #[arg(long)]
    alphas: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha_final: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl Common {
    fn overrides(&self) -> RawConfig {
        let mut raw = RawConfig::new();
        let pairs = [
            ("game", &self.game),
            ("alpha", &self.alpha),
            ("eta", &self.eta),
            ("inner", &self.inner),
            ("outer", &self.outer),
            ("batch", &self.batch),
            ("seeds", &self.seeds),
            ("alphas", &self.alphas),
            ("alpha_final", &self.alpha_final),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                raw.insert(k.to_string(), v.clone());
            }
        }
        if let Some(out) = &self.out {
            raw.insert("out".into(), out.display().to_string());
        }
        raw
    }
}

fn resolve(command: &str, common: &Common) -> Result<ExperimentSpec, Failure> {
    let text = match &common.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?,
        None => String::new(),
    };
    let mut raw = experiment::parse_config(&text).map_err(|e| Failure::Config(e.to_string()))?;
    raw =
        experiment::merge(raw, &common.overrides()).map_err(|e| Failure::Config(e.to_string()))?;
    let kind = match command {
        "solve" => {
            let game = raw
                .get("game")
                .ok_or_else(|| Failure::Config("--game is required".into()))?;
            match load_game(game).map_err(|e| Failure::Config(e.to_string()))? {
                Game::Normal(_) => ExperimentKind::SolveNfg,
                Game::Extensive(_) => ExperimentKind::SolveEfgExact,
            }
        }
        "train" => ExperimentKind::Nashpg,
        "anneal" => ExperimentKind::Anneal,
        "sweep" => ExperimentKind::AlphaSweep,
        _ => ExperimentKind::Tournament,
    };
    raw.insert("kind".into(), kind.to_string());
    ExperimentSpec::from_raw(&raw).map_err(|e| Failure::Config(e.to_string()))
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let (name, common) = match &cli.command {
        Command::Evaluate { game, policy } => {
            let e = experiment::evaluate_checkpoint(game, policy).map_err(|e| match e {
                nashpg::Error::InvalidArgument(_) => Failure::Config(e.to_string()),
                _ => Failure::Runtime(e.to_string()),
            })?;
            println!("exploitability {e}");
            return Ok(());
        }
        Command::Solve(c) => ("solve", c),
        Command::Train(c) => ("train", c),
        Command::Anneal(c) => ("anneal", c),
        Command::Sweep(c) => ("sweep", c),
        Command::Tournament(c) => ("tournament", c),
    };
    let spec = resolve(name, common)?;
    let report = experiment::run(&spec).map_err(|e| Failure::Runtime(e.to_string()))?;
    for line in &report.lines {
        println!("{line}");
    }
    println!(
        "wrote {} files to {}",
        report.files.len(),
        spec.out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
