mod common;

use common::*;
use nashpg::efg::{build_kuhn, efg_to_nfg, DEFAULT_ENTRY_CAP};
use nashpg::nfg::{self, BregmanGeometry, MixedProfile, NormalFormGame};
use nashpg::solvers::{
    iterative_m, mmd_anneal, solve_regularized_vi, stable_eta, AnnealSchedule, SolverConfig,
};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GEOM: BregmanGeometry = BregmanGeometry::NegativeEntropy;

fn cfg(alpha: f64, eta: f64, inner: usize, outer: usize) -> SolverConfig {
    SolverConfig {
        alpha,
        eta,
        inner_tol: 1e-14,
        inner_max_iters: inner,
        outer_iters: outer,
        anneal: None,
    }
}

#[test]
fn regularized_map_is_nonexpansive_toward_equilibrium() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for game in [
        NormalFormGame::matching_pennies(),
        NormalFormGame::rock_paper_scissors(),
    ] {
        let (m, n) = (game.rows(), game.cols());
        let star = MixedProfile::uniform(m, n);
        for _ in 0..50 {
            let rho = random_profile(&mut rng, m, n);
            let sol = solve_regularized_vi(&game, GEOM, &rho, &cfg(0.5, 0.5, 5000, 1)).unwrap();
            assert!(sol.converged);
            let before = profile_divergence(&star, &rho);
            let after = profile_divergence(&star, &sol.profile);
            assert!(after <= before + 1e-12, "{after} > {before}");
        }
    }
}

#[test]
fn iterated_map_decreases_divergence_on_random_games() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    for _ in 0..5 {
        let game = random_game(&mut rng, 4, 4);
        let star_run = iterative_m(
            &game,
            GEOM,
            &MixedProfile::uniform(4, 4),
            &cfg(0.2, 0.2, 5000, 400),
            None,
        )
        .unwrap();
        let star = star_run.final_profile().unwrap().clone();
        if nfg::exploitability(&game, &star).unwrap() > 1e-7 {
            continue;
        }
        let z0 = random_profile(&mut rng, 4, 4);
        let run = iterative_m(&game, GEOM, &z0, &cfg(0.2, 0.2, 5000, 30), Some(&star)).unwrap();
        let b: Vec<f64> = run
            .rows
            .iter()
            .map(|r| r.bregman_to_star.unwrap())
            .collect();
        for w in b.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "{b:?}");
        }
        checked += 1;
    }
    assert!(checked >= 3, "{checked}");
}

#[test]
fn large_regularization_barely_moves_the_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let game = NormalFormGame::rock_paper_scissors();
    for _ in 0..10 {
        let rho = random_profile(&mut rng, 3, 3);
        let shift = |alpha: f64| {
            let sol = solve_regularized_vi(&game, GEOM, &rho, &cfg(alpha, 1.0 / alpha, 10_000, 1))
                .unwrap();
            sol.profile.l1_distance(&rho)
        };
        let (d100, d1000) = (shift(100.0), shift(1000.0));
        assert!(d1000 < 1e-3, "{d1000}");
        assert!(d100 < 2e-2, "{d100}");
        let ratio = d100 / d1000;
        assert!((7.0..13.0).contains(&ratio), "{ratio}");
    }
}

#[test]
fn fixed_point_residual_vanishes_at_solution() {
    let game = NormalFormGame::matching_pennies();
    let star = MixedProfile::uniform(2, 2);
    let sol = solve_regularized_vi(&game, GEOM, &star, &cfg(0.2, 0.5, 10, 1)).unwrap();
    assert!(sol.profile.l1_distance(&star) < 1e-15);
    assert!(sol.residual < 1e-15);
}

#[test]
fn anneal_schedule_reaches_small_exploitability() {
    let game = NormalFormGame::rock_paper_scissors();
    let mut c = cfg(0.2, 0.5, 200, 50);
    c.anneal = Some(AnnealSchedule {
        alpha_final: 0.0,
        eta_final: None,
    });
    let z0 = MixedProfile::interior(vec![0.7, 0.2, 0.1], vec![0.1, 0.1, 0.8]).unwrap();
    let run = mmd_anneal(&game, GEOM, &z0, &c).unwrap();
    assert_eq!(run.rows.len(), 51);
    assert!(run.last().unwrap().exploitability < 1e-3);
    c.anneal = None;
    assert!(mmd_anneal(&game, GEOM, &z0, &c).is_err());
}

#[test]
fn invalid_configs_are_rejected() {
    let game = NormalFormGame::matching_pennies();
    let z0 = MixedProfile::uniform(2, 2);
    for bad in [
        cfg(0.0, 0.5, 10, 1),
        cfg(0.2, -1.0, 10, 1),
        cfg(0.2, 0.5, 0, 1),
        cfg(0.2, 0.5, 10, 0),
    ] {
        assert!(matches!(
            iterative_m(&game, GEOM, &z0, &bad, None),
            Err(nashpg::Error::Config(_))
        ));
    }
    let edge = MixedProfile::new(vec![1.0, 0.0], vec![0.5, 0.5]).unwrap();
    assert!(matches!(
        iterative_m(&game, GEOM, &edge, &cfg(0.2, 0.5, 10, 1), None),
        Err(nashpg::Error::Domain(_))
    ));
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p.ln() - q.ln()).abs())
        .fold(0.0, f64::max)
}

#[test]
fn regularized_map_is_continuous_in_the_mirror_image() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..5 {
        let game = random_game(&mut rng, 3, 4);
        let c = cfg(0.5, stable_eta(0.5, 1.0, game.lipschitz()), 50_000, 1);
        for _ in 0..10 {
            let rho = random_profile(&mut rng, 3, 4);
            let shake = |p: &[f64], rng: &mut ChaCha8Rng| -> Vec<f64> {
                p.iter()
                    .map(|v| v * (1.0 + rng.random_range(-0.2..0.2)))
                    .collect()
            };
            let near =
                MixedProfile::interior(shake(&rho.x, &mut rng), shake(&rho.y, &mut rng)).unwrap();
            let a = solve_regularized_vi(&game, GEOM, &rho, &c).unwrap().profile;
            let b = solve_regularized_vi(&game, GEOM, &near, &c)
                .unwrap()
                .profile;
            let lhs = (l1(&a.x, &b.x).powi(2) + l1(&a.y, &b.y).powi(2)).sqrt();
            let rhs =
                (sup_diff(&rho.x, &near.x).powi(2) + sup_diff(&rho.y, &near.y).powi(2)).sqrt();
            assert!(lhs <= rhs + 1e-4, "{lhs} > {rhs}");
        }
    }
}

#[test]
fn fixed_uniform_magnet_plateaus_on_kuhn() {
    let game = efg_to_nfg(&build_kuhn(), DEFAULT_ENTRY_CAP).unwrap().game;
    let alpha = 0.05;
    let mut c = cfg(alpha, stable_eta(alpha, 1.0, game.lipschitz()), 2000, 50);
    c.anneal = Some(AnnealSchedule {
        alpha_final: alpha,
        eta_final: None,
    });
    let run = mmd_anneal(&game, GEOM, &MixedProfile::uniform(64, 64), &c).unwrap();
    let tail: Vec<f64> = run.rows[40..].iter().map(|r| r.exploitability).collect();
    let spread = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - tail.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(tail.iter().all(|&e| e > 1e-3), "{tail:?}");
    assert!(spread < 1e-6, "{tail:?}");
}

#[test]
fn exact_annealing_with_co_annealed_step_converges() {
    let game = NormalFormGame::matching_pennies();
    let mut c = cfg(0.2, stable_eta(0.2, 1.0, game.lipschitz()), 1000, 50);
    c.anneal = Some(AnnealSchedule {
        alpha_final: 0.001,
        eta_final: Some(stable_eta(0.001, 1.0, game.lipschitz())),
    });
    let z0 = MixedProfile::new(vec![0.9, 0.1], vec![0.2, 0.8]).unwrap();
    let run = mmd_anneal(&game, GEOM, &z0, &c).unwrap();
    assert!(run.last().unwrap().exploitability < 1e-3);
}
