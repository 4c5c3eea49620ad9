//! Exact-gradient solvers on matrix games.
//!
//! [`mmd_step`] is the closed-form entropic magnetic mirror descent update.
//! [`solve_regularized_vi`] iterates it to approximate the regularized-VI
//! solution map `M(ρ)`, and [`iterative_m`] applies that map repeatedly,
//! re-centring the magnet on the previous solution each time.
//! [`mmd_anneal`] is the fixed-magnet baseline that instead decays `α`.

use std::io::Write;

use log::warn;

use crate::error::{Error, Result};
use crate::nfg::{
    check_mmd_condition, exploitability, operator_g, softmax_interior, BregmanGeometry,
    MixedProfile, NormalFormGame,
};

/// Linear decay targets for [`mmd_anneal`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnealSchedule {
    pub alpha_final: f64,
    /// When set, `η` decays linearly to this value alongside `α`.
    pub eta_final: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub alpha: f64,
    pub eta: f64,
    /// Inner loop stops once `‖z_{k+1} − z_k‖₁` drops below this.
    pub inner_tol: f64,
    pub inner_max_iters: usize,
    pub outer_iters: usize,
    pub anneal: Option<AnnealSchedule>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            alpha: 0.2,
            eta: 0.5,
            inner_tol: 1e-9,
            inner_max_iters: 1000,
            outer_iters: 50,
            anneal: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        positive("alpha", self.alpha)?;
        positive("eta", self.eta)?;
        positive("inner_tol", self.inner_tol)?;
        if self.inner_max_iters == 0 || self.outer_iters == 0 {
            return Err(Error::Config(
                "inner and outer iteration counts must be >= 1".into(),
            ));
        }
        if let Some(a) = &self.anneal {
            if !(a.alpha_final >= 0.0) {
                return Err(Error::Config(format!(
                    "alpha_final must be >= 0, got {}",
                    a.alpha_final
                )));
            }
            if let Some(e) = a.eta_final {
                if !(e >= 0.0) {
                    return Err(Error::Config(format!("eta_final must be >= 0, got {e}")));
                }
            }
        }
        Ok(())
    }
}

/// One row of a [`RunRecord`].
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub t: usize,
    pub profile: MixedProfile,
    pub exploitability: f64,
    /// `B(z_t; z_{t−1})`, zero for the initial row.
    pub bregman_step: f64,
    /// `B(z*; z_t)` when a reference equilibrium was supplied.
    pub bregman_to_star: Option<f64>,
    pub inner_iters: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunRecord {
    pub rows: Vec<IterationRecord>,
}

impl RunRecord {
    pub fn last(&self) -> Option<&IterationRecord> {
        self.rows.last()
    }

    pub fn final_profile(&self) -> Option<&MixedProfile> {
        self.rows.last().map(|r| &r.profile)
    }

    pub const CSV_HEADER: &'static str =
        "t,exploitability,bregman_step,bregman_to_star,inner_iters";

    /// Writes `t,exploitability,bregman_step,bregman_to_star,inner_iters`;
    /// `bregman_to_star` is empty when no reference was supplied.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for r in &self.rows {
            let star = r.bregman_to_star.map(|v| v.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{}",
                r.t, r.exploitability, r.bregman_step, star, r.inner_iters
            )?;
        }
        Ok(())
    }
}

/// Result of the inner loop.
#[derive(Clone, Debug, PartialEq)]
pub struct ViSolution {
    pub profile: MixedProfile,
    pub iterations: usize,
    pub converged: bool,
    /// Natural residual `‖z − Π(z − G_ρ(z))‖₁` with Euclidean projection Π.
    pub residual: f64,
}

/// One simultaneous MMD update of both players from the same `z`:
/// `x'(a) ∝ exp[(log x(a) + η (Ay)(a) + ηα log ρ₁(a)) / (1 + ηα)]`, and the
/// mirrored form with `−Aᵀx` for the column player.
pub fn mmd_step(
    game: &NormalFormGame,
    geom: BregmanGeometry,
    z: &MixedProfile,
    rho: &MixedProfile,
    alpha: f64,
    eta: f64,
) -> Result<MixedProfile> {
    match geom {
        BregmanGeometry::NegativeEntropy => {}
    }
    if !(alpha >= 0.0 && eta >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha and eta must be nonnegative, got {alpha}, {eta}"
        )));
    }
    if !z.is_interior() || !rho.is_interior() {
        return Err(Error::Domain(
            "MMD iterates and magnet must be interior".into(),
        ));
    }
    if z.x.len() != game.rows()
        || z.y.len() != game.cols()
        || rho.x.len() != game.rows()
        || rho.y.len() != game.cols()
    {
        return Err(Error::DimensionMismatch {
            expected: format!("({}, {})", game.rows(), game.cols()),
            got: format!(
                "z ({}, {}), rho ({}, {})",
                z.x.len(),
                z.y.len(),
                rho.x.len(),
                rho.y.len()
            ),
        });
    }
    Ok(mmd_update(game, z, rho, alpha, eta))
}

fn mmd_update(
    game: &NormalFormGame,
    z: &MixedProfile,
    rho: &MixedProfile,
    alpha: f64,
    eta: f64,
) -> MixedProfile {
    let denom = 1.0 + eta * alpha;
    let grad_x = game.mul_col(&z.y);
    let grad_y = game.mul_row(&z.x);
    let logits = |p: &[f64], g: &[f64], r: &[f64], sign: f64| -> Vec<f64> {
        p.iter()
            .zip(g)
            .zip(r)
            .map(|((pi, gi), ri)| (pi.ln() + sign * eta * gi + eta * alpha * ri.ln()) / denom)
            .collect()
    };
    MixedProfile {
        x: softmax_interior(&logits(&z.x, &grad_x, &rho.x, 1.0)),
        y: softmax_interior(&logits(&z.y, &grad_y, &rho.y, -1.0)),
    }
}

/// Approximates `M(ρ)`, the unique solution of the `α`-regularized VI,
/// by iterating [`mmd_step`] from `z₀ = ρ`.
///
/// Running out of inner iterations is not an error; see
/// [`ViSolution::converged`]. A violated `α ≥ μηL²` condition is logged.
pub fn solve_regularized_vi(
    game: &NormalFormGame,
    geom: BregmanGeometry,
    rho: &MixedProfile,
    cfg: &SolverConfig,
) -> Result<ViSolution> {
    cfg.validate()?;
    warn_if_unstable(game, geom, cfg.alpha, cfg.eta);
    solve_inner(game, geom, rho, cfg.alpha, cfg)
}

/// Largest step size meeting `α ≥ μηL²`; any step works when `L = 0`.
pub fn stable_eta(alpha: f64, mu: f64, lipschitz: f64) -> f64 {
    if lipschitz > 0.0 {
        alpha / (mu * lipschitz * lipschitz)
    } else {
        1.0
    }
}

fn warn_if_unstable(game: &NormalFormGame, geom: BregmanGeometry, alpha: f64, eta: f64) {
    let l = game.lipschitz();
    if !check_mmd_condition(alpha, eta, geom.strong_convexity_mu(), l) {
        warn!(
            "alpha={alpha} eta={eta} violate alpha >= mu*eta*L^2 (L={l:.4}); convergence is not guaranteed"
        );
    }
}

fn solve_inner(
    game: &NormalFormGame,
    geom: BregmanGeometry,
    rho: &MixedProfile,
    alpha: f64,
    cfg: &SolverConfig,
) -> Result<ViSolution> {
    let mut z = mmd_step(game, geom, rho, rho, alpha, cfg.eta)?;
    let mut iterations = 1;
    let mut converged = z.l1_distance(rho) < cfg.inner_tol;
    while !converged && iterations < cfg.inner_max_iters {
        let next = mmd_update(game, &z, rho, alpha, cfg.eta);
        converged = next.l1_distance(&z) < cfg.inner_tol;
        z = next;
        iterations += 1;
    }
    let residual = natural_residual(game, geom, &z, rho, alpha)?;
    Ok(ViSolution {
        profile: z,
        iterations,
        converged,
        residual,
    })
}

/// `‖z − Π(z − G_ρ(z))‖₁` with Euclidean projection onto each simplex.
pub fn natural_residual(
    game: &NormalFormGame,
    geom: BregmanGeometry,
    z: &MixedProfile,
    rho: &MixedProfile,
    alpha: f64,
) -> Result<f64> {
    let g = operator_g(game, geom, z, rho, alpha)?;
    let m = game.rows();
    let shifted =
        |p: &[f64], gp: &[f64]| -> Vec<f64> { p.iter().zip(gp).map(|(a, b)| a - b).collect() };
    let px = project_simplex(&shifted(&z.x, &g[..m]));
    let py = project_simplex(&shifted(&z.y, &g[m..]));
    Ok(z.x
        .iter()
        .zip(&px)
        .chain(z.y.iter().zip(&py))
        .map(|(a, b)| (a - b).abs())
        .sum())
}

/// Euclidean projection onto the probability simplex (sort-based).
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cumulative += uk;
        let t = (cumulative - 1.0) / (k as f64 + 1.0);
        if uk - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Repeatedly applies the regularized-VI map, `z_{t+1} = M(z_t)`.
///
/// When `z_star` is supplied the record carries `B(z*; z_t)`.
pub fn iterative_m(
    game: &NormalFormGame,
    geom: BregmanGeometry,
    z0: &MixedProfile,
    cfg: &SolverConfig,
    z_star: Option<&MixedProfile>,
) -> Result<RunRecord> {
    cfg.validate()?;
    if !z0.is_interior() {
        return Err(Error::Domain("initial profile must be interior".into()));
    }
    warn_if_unstable(game, geom, cfg.alpha, cfg.eta);
    let to_star = |z: &MixedProfile| -> Result<Option<f64>> {
        z_star.map(|s| geom.divergence(s, z)).transpose()
    };

    let mut rows = Vec::with_capacity(cfg.outer_iters + 1);
    rows.push(IterationRecord {
        t: 0,
        profile: z0.clone(),
        exploitability: exploitability(game, z0)?,
        bregman_step: 0.0,
        bregman_to_star: to_star(z0)?,
        inner_iters: 0,
    });
    let mut rho = z0.clone();
    for t in 1..=cfg.outer_iters {
        let sol = solve_inner(game, geom, &rho, cfg.alpha, cfg)?;
        let z = sol.profile;
        rows.push(IterationRecord {
            t,
            exploitability: exploitability(game, &z)?,
            bregman_step: geom.divergence(&z, &rho)?,
            bregman_to_star: to_star(&z)?,
            inner_iters: sol.iterations,
            profile: z.clone(),
        });
        rho = z;
    }
    Ok(RunRecord { rows })
}

/// Fixed-magnet MMD with `α` (and optionally `η`) decayed linearly over
/// `outer_iters * inner_max_iters` steps. The magnet is the uniform profile.
/// One row is recorded every `inner_max_iters` steps.
pub fn mmd_anneal(
    game: &NormalFormGame,
    geom: BregmanGeometry,
    z0: &MixedProfile,
    cfg: &SolverConfig,
) -> Result<RunRecord> {
    cfg.validate()?;
    let schedule = cfg
        .anneal
        .ok_or_else(|| Error::Config("mmd_anneal needs an anneal schedule".into()))?;
    if !z0.is_interior() {
        return Err(Error::Domain("initial profile must be interior".into()));
    }
    let magnet = MixedProfile::uniform(game.rows(), game.cols());
    let total = cfg.outer_iters * cfg.inner_max_iters;
    let lerp = |start: f64, end: f64, k: usize| start + (end - start) * k as f64 / total as f64;

    let mut rows = Vec::with_capacity(cfg.outer_iters + 1);
    rows.push(IterationRecord {
        t: 0,
        profile: z0.clone(),
        exploitability: exploitability(game, z0)?,
        bregman_step: 0.0,
        bregman_to_star: None,
        inner_iters: 0,
    });
    let mut z = z0.clone();
    let mut last = z0.clone();
    for k in 0..total {
        let alpha = lerp(cfg.alpha, schedule.alpha_final, k);
        let eta = schedule.eta_final.map_or(cfg.eta, |e| lerp(cfg.eta, e, k));
        z = mmd_update(game, &z, &magnet, alpha, eta);
        if (k + 1) % cfg.inner_max_iters == 0 {
            rows.push(IterationRecord {
                t: (k + 1) / cfg.inner_max_iters,
                exploitability: exploitability(game, &z)?,
                bregman_step: geom.divergence(&z, &last)?,
                bregman_to_star: None,
                inner_iters: cfg.inner_max_iters,
                profile: z.clone(),
            });
            last = z.clone();
        }
    }
    Ok(RunRecord { rows })
}
