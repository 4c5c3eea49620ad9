use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::grad::{estimate_kl_gradient, estimate_policy_gradient, KlWeighting};
use super::policy::to_profile;
use super::sample::rollout;
use super::SoftmaxPolicy;
use crate::efg::{exploitability, ExtensiveFormGame, Player};
use crate::error::{Error, Result};
use crate::solvers::AnnealSchedule;

/// Number of exploitability checkpoints per run when `eval_every` is unset.
pub const DEFAULT_CHECKPOINTS: usize = 50;

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub alpha: f64,
    pub eta: f64,
    /// Inner regularized policy-gradient steps per reference refresh.
    pub inner_iters: usize,
    pub outer_iters: usize,
    /// Trajectories sampled per inner step, shared by both players.
    pub batch_size: usize,
    pub seed: u64,
    /// Only used by [`train_anneal`].
    pub anneal: Option<AnnealSchedule>,
    /// Steps between exploitability checkpoints; defaults to
    /// `inner_iters * outer_iters / 50`.
    pub eval_every: Option<usize>,
    pub kl_weighting: KlWeighting,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            alpha: 0.2,
            eta: 0.1,
            inner_iters: 1000,
            outer_iters: 50,
            batch_size: 256,
            seed: 0,
            anneal: None,
            eval_every: None,
            kl_weighting: KlWeighting::VisitFrequency,
        }
    }
}

impl TrainConfig {
    pub fn total_steps(&self) -> usize {
        self.inner_iters * self.outer_iters
    }

    pub fn checkpoint_interval(&self) -> usize {
        self.eval_every
            .unwrap_or(self.total_steps() / DEFAULT_CHECKPOINTS)
            .max(1)
    }

    /// `η` may be zero (frozen policies); everything else must be positive.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::Config(format!(
                "alpha must be >= 0, got {}",
                self.alpha
            )));
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(Error::Config(format!("eta must be >= 0, got {}", self.eta)));
        }
        if self.inner_iters == 0 || self.outer_iters == 0 || self.batch_size == 0 {
            return Err(Error::Config(
                "inner_iters, outer_iters and batch_size must be >= 1".into(),
            ));
        }
        if self.eval_every == Some(0) {
            return Err(Error::Config("eval_every must be >= 1".into()));
        }
        if let Some(a) = &self.anneal {
            if !(a.alpha_final >= 0.0 && a.alpha_final.is_finite()) {
                return Err(Error::Config(format!(
                    "alpha_final must be >= 0, got {}",
                    a.alpha_final
                )));
            }
            if let Some(e) = a.eta_final {
                if !(e >= 0.0 && e.is_finite()) {
                    return Err(Error::Config(format!("eta_final must be >= 0, got {e}")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    /// Inner steps completed.
    pub step: usize,
    pub alpha: f64,
    pub eta: f64,
    pub exploitability: f64,
    pub policies: [SoftmaxPolicy; 2],
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainRecord {
    pub checkpoints: Vec<Checkpoint>,
}

impl TrainRecord {
    pub const CSV_HEADER: &'static str = "step,alpha,eta,exploitability";

    pub fn final_exploitability(&self) -> Option<f64> {
        self.checkpoints.last().map(|c| c.exploitability)
    }

    pub fn exploitabilities(&self) -> Vec<f64> {
        self.checkpoints.iter().map(|c| c.exploitability).collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for c in &self.checkpoints {
            writeln!(w, "{},{},{},{}", c.step, c.alpha, c.eta, c.exploitability)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Reference {
    /// Refresh to the current policies every `inner_iters` steps.
    Refine,
    /// Frozen at uniform; `α` (and optionally `η`) decay linearly.
    AnnealUniform,
}

/// Nash policy gradient with tabular softmax policies and REINFORCE.
///
/// Every inner step samples one batch under the joint policy; both players
/// take `θ ← θ + η (ĝ − α ĝ_reg)` from that batch. After `inner_iters` steps
/// the reference policies become copies of the current ones.
pub fn train_nashpg(game: &ExtensiveFormGame, cfg: &TrainConfig) -> Result<TrainRecord> {
    run(game, cfg, Reference::Refine)
}

/// The same sampled loop with the reference frozen at the uniform policy and
/// `α` decayed linearly to `anneal.alpha_final` over the whole budget.
pub fn train_anneal(game: &ExtensiveFormGame, cfg: &TrainConfig) -> Result<TrainRecord> {
    if cfg.anneal.is_none() {
        return Err(Error::Config(
            "train_anneal needs an anneal schedule".into(),
        ));
    }
    run(game, cfg, Reference::AnnealUniform)
}

fn run(game: &ExtensiveFormGame, cfg: &TrainConfig, mode: Reference) -> Result<TrainRecord> {
    cfg.validate()?;
    let total = cfg.total_steps();
    let interval = cfg.checkpoint_interval();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut policies = [
        SoftmaxPolicy::uniform(game, Player::One),
        SoftmaxPolicy::uniform(game, Player::Two),
    ];
    let mut reference = policies.clone();

    let schedule = |step: usize| -> (f64, f64) {
        match (mode, cfg.anneal) {
            (Reference::AnnealUniform, Some(a)) => {
                let frac = step as f64 / total as f64;
                let alpha = cfg.alpha + (a.alpha_final - cfg.alpha) * frac;
                let eta = a
                    .eta_final
                    .map_or(cfg.eta, |e| cfg.eta + (e - cfg.eta) * frac);
                (alpha, eta)
            }
            _ => (cfg.alpha, cfg.eta),
        }
    };

    let checkpoint = |step: usize, policies: &[SoftmaxPolicy; 2]| -> Result<Checkpoint> {
        let (alpha, eta) = schedule(step);
        Ok(Checkpoint {
            step,
            alpha,
            eta,
            exploitability: exploitability(game, &to_profile(policies))?,
            policies: policies.clone(),
        })
    };

    let mut record = TrainRecord::default();
    record.checkpoints.push(checkpoint(0, &policies)?);
    let mut batch = Vec::with_capacity(cfg.batch_size);
    for step in 0..total {
        let (alpha, eta) = schedule(step);
        let tables = [policies[0].prob_table(), policies[1].prob_table()];
        batch.clear();
        batch.extend((0..cfg.batch_size).map(|_| rollout(game, &tables, &mut rng)));

        let mut updates = Vec::with_capacity(2);
        for p in Player::BOTH {
            let i = p.index();
            let pg = estimate_policy_gradient(&batch, p, &policies[i]);
            let reg =
                estimate_kl_gradient(&batch, p, &policies[i], &reference[i], cfg.kl_weighting);
            let combined: Vec<Vec<f64>> = pg
                .iter()
                .zip(&reg)
                .map(|(g, r)| g.iter().zip(r).map(|(a, b)| a - alpha * b).collect())
                .collect();
            updates.push(combined);
        }
        for (policy, update) in policies.iter_mut().zip(&updates) {
            policy.add_scaled(update, eta);
        }

        let done = step + 1;
        if mode == Reference::Refine && done % cfg.inner_iters == 0 {
            reference = policies.clone();
        }
        if done % interval == 0 || done == total {
            record.checkpoints.push(checkpoint(done, &policies)?);
        }
    }
    Ok(record)
}
