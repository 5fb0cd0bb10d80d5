mod common;

use common::{compare_with_support_enumeration, random_grid, Instance};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spyvspam::oracle::{solve_defendability_lp, support_enumeration_ne, LpStatus, SupportEnumOptions};
use spyvspam::{solve_ne_with, MixedStrategy, Player, SolverOptions};

fn lp_gap(inst: &Instance) -> f64 {
    let m = inst.matrices();
    let lp = solve_defendability_lp(&m).unwrap();
    assert_eq!(lp.status, LpStatus::Optimal);
    let eq = solve_ne_with(&m, &SolverOptions::default()).unwrap();
    (lp.objective - eq.theta_hat_shifted) / eq.theta_hat.abs().max(1.0)
}

#[test]
fn structural_maximum_matches_lp_on_random_grid() {
    for (k, inst) in random_grid(500, 12, 1).iter().enumerate() {
        let gap = lp_gap(inst);
        assert!(
            gap.abs() <= 1e-8,
            "instance {k} {:?}: relative gap {gap:e}",
            inst.params
        );
    }
}

#[test]
fn structural_maximum_matches_lp_when_detection_is_cheap() {
    // c_d < c_a: only the s = N candidates are feasible.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let n = rng.random_range(1..=10);
        let c_a = rng.random_range(1.0..4.0);
        let inst = Instance::new(
            n,
            rng.random_range(0.05..0.6),
            c_a * rng.random_range(0.1..0.99),
            c_a,
            rng.random_range(1.0..30.0),
            rng.random_range(0.1..0.9),
        );
        let gap = lp_gap(&inst);
        assert!(gap.abs() <= 1e-8, "{:?}: gap {gap:e}", inst.params);
        let eq = solve_ne_with(&inst.matrices(), &SolverOptions::default()).unwrap();
        assert_eq!(eq.s, n);
    }
}

#[test]
fn coincident_instances_match_lp_and_support_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..=5 {
        for k in 1..=n {
            let c_a = rng.random_range(0.5..2.0);
            let inst = Instance::new(
                n,
                rng.random_range(0.05..0.6),
                k as f64 * c_a,
                c_a,
                rng.random_range(1.0..30.0),
                rng.random_range(0.1..0.9),
            );
            assert!(lp_gap(&inst).abs() <= 1e-8, "{:?}", inst.params);
            let (d, same) = compare_with_support_enumeration(&inst).unwrap();
            assert!(d <= 1e-6 || same, "{:?}: distance {d:e}", inst.params);
        }
    }
}

#[test]
fn random_defender_strategies_never_beat_lp_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let instances = random_grid(10, 12, 3);
    for inst in &instances {
        let m = inst.matrices();
        let best = solve_defendability_lp(&m).unwrap().objective;
        for _ in 0..10_000 {
            let raw: Vec<f64> = (0..m.n() + 2).map(|_| -rng.random::<f64>().ln()).collect();
            let total: f64 = raw.iter().sum();
            let beta = MixedStrategy::new(Player::Defender, raw.iter().map(|x| x / total).collect()).unwrap();
            let value = m.defendability(&beta).unwrap();
            assert!(value <= best + 1e-9 * best.abs().max(1.0), "{value} > {best}");
        }
    }
}

#[test]
fn support_enumeration_matches_small_games() {
    for (k, inst) in random_grid(100, 4, 2).iter().enumerate() {
        let (d, same) = compare_with_support_enumeration(inst).unwrap();
        assert!(d <= 1e-6 || same, "instance {k} {:?}: distance {d:e}", inst.params);
    }
}

#[test]
fn single_slot_game_has_one_equilibrium() {
    for (c_d, p) in [(3.0, 0.5), (1.5, 0.2), (0.5, 0.7), (1.0, 0.4), (8.0, 0.9)] {
        let inst = Instance::new(1, 0.3, c_d, 1.0, 4.0, p);
        let m = inst.matrices();
        let eq = solve_ne_with(&m, &SolverOptions::default()).unwrap();
        let all = support_enumeration_ne(&m, &SupportEnumOptions::default()).unwrap();
        assert_eq!(all.len(), 1, "c_d={c_d} p={p}: {all:?}");
        assert!(common::max_abs_diff(all[0].alpha.weights(), eq.alpha.weights()) < 1e-9);
        assert!(common::max_abs_diff(all[0].beta.weights(), eq.beta.weights()) < 1e-9);
    }
}

#[test]
fn support_enumeration_refuses_large_games() {
    let m = common::low_prior().matrices();
    assert!(support_enumeration_ne(&m, &SupportEnumOptions::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lp_and_structural_agree(
        n in 1usize..=9,
        theta0 in 0.05f64..0.6,
        ratio in 0.3f64..20.0,
        c_a in 0.5f64..3.0,
        c_fa in 1.0f64..30.0,
        p in 0.05f64..0.95,
    ) {
        let inst = Instance::new(n, theta0, ratio * c_a, c_a, c_fa, p);
        let gap = lp_gap(&inst);
        prop_assert!(gap.abs() <= 1e-8, "gap {:e}", gap);
    }

    #[test]
    fn no_defender_strategy_beats_the_equilibrium(
        seed in any::<u64>(),
        weights in prop::collection::vec(0.0f64..1.0, 9),
    ) {
        let inst = random_grid(1, 7, seed).remove(0);
        let m = inst.matrices();
        let eq = solve_ne_with(&m, &SolverOptions::default()).unwrap();
        let w: Vec<f64> = weights.iter().take(m.n() + 2).map(|x| x + 1e-3).collect();
        let total: f64 = w.iter().sum();
        let beta = MixedStrategy::new(Player::Defender, w.iter().map(|x| x / total).collect()).unwrap();
        prop_assert!(m.defendability(&beta).unwrap() <= eq.theta_hat_shifted + 1e-9);
    }
}
