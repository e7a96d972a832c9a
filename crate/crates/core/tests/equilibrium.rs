mod common;

use common::{has_improving_deviation, mask_to_string, random_game, table_game};
use csma_aoi_game::equilibrium::INDIFFERENCE_TOLERANCE;
use csma_aoi_game::{
    best_response_oracle, check_weak_dominance, enumerate_pure_nash, monotonicity_derivatives,
    msne_closed_form, verify_indifference, Action, ActionProfile, CollisionRegime, Game,
    GameError, Game32, Profile, Slots, Slots32,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn arb_game(collision: (f64, f64)) -> impl Strategy<Value = Game> {
    (2usize..=5, any::<u64>()).prop_map(move |(n, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_game(&mut rng, n, collision)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn short_collision_transmit_dominant(game in arb_game((0.01, 1.0))) {
        prop_assert_eq!(game.regime(), CollisionRegime::ShortCollision);
        for i in 0..game.n() {
            prop_assert!(check_weak_dominance(&game, i, Action::Transmit).unwrap().weakly_dominant_per_paper);
        }
    }

    #[test]
    fn long_collision_nothing_dominant(game in arb_game((1.0001, 5.0))) {
        for i in 0..game.n() {
            for a in [Action::Transmit, Action::Idle] {
                prop_assert!(!check_weak_dominance(&game, i, a).unwrap().weakly_dominant_per_paper);
            }
        }
    }

    #[test]
    fn short_collision_closed_form_never_feasible(game in arb_game((0.01, 1.0))) {
        if let Ok(m) = msne_closed_form(&game) {
            prop_assert!(!m.feasible);
            prop_assert!(m.indifference_residuals.is_none());
        }
    }

    #[test]
    fn feasible_candidates_are_interior_and_indifferent(game in arb_game((1.05, 5.0))) {
        let m = msne_closed_form(&game).unwrap();
        if m.feasible {
            for &t in &m.raw_taus {
                prop_assert!(t > 0.0 && t < 1.0);
            }
            for r in m.indifference_residuals.unwrap() {
                prop_assert!(r.abs() < INDIFFERENCE_TOLERANCE);
            }
            let profile = Profile::new(m.raw_taus.clone()).unwrap();
            for i in 0..game.n() {
                let br = best_response_oracle(&game, i, &profile, 101).unwrap();
                prop_assert!(br.spread < 1e-9);
            }
        }
        // Per-node interiority follows the per-node inequality in the long regime.
        for (i, &ok) in m.feasible_per_node.iter().enumerate() {
            if ok {
                prop_assert!(m.raw_taus[i] > 0.0 && m.raw_taus[i] < 1.0);
            }
        }
    }

    #[test]
    fn pure_nash_sound_and_complete(game in arb_game((0.05, 4.0))) {
        let set = enumerate_pure_nash(&game).unwrap();
        let n = game.n();
        for mask in 0..1u64 << n {
            let transmit: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            let profile = ActionProfile::from_mask(n, mask);
            prop_assert_eq!(
                set.contains(&profile),
                !has_improving_deviation(&game, &transmit),
                "profile {}", mask_to_string(n, mask)
            );
        }
    }

    #[test]
    fn equal_ages_give_equal_taus(
        n in 2usize..=6,
        age in 1.0f64..10.0,
        collision in 0.05f64..5.0,
    ) {
        let s = Slots::new(0.01, 1.01, collision * 1.01).unwrap();
        let game = Game::new(s, vec![age * 1.01; n]).unwrap();
        if let Ok(m) = msne_closed_form(&game) {
            for t in &m.raw_taus {
                prop_assert_eq!(*t, m.raw_taus[0]);
            }
        }
    }
}

#[test]
fn row_ii_is_the_symmetric_witness() {
    let m = msne_closed_form(&table_game(0.1, &[1.0, 1.0, 1.0])).unwrap();
    assert!(!m.feasible);
    assert!(m.raw_taus.iter().all(|&t| t == m.raw_taus[0]));
    assert!((m.raw_taus[0] + 0.0055).abs() < 5e-5);
}

#[test]
fn row_iii_fails_the_age_condition_only() {
    let m = msne_closed_form(&table_game(2.0, &[1.0, 2.0, 3.0])).unwrap();
    assert!(!m.feasible);
    assert_eq!(m.feasible_per_node, vec![true, true, false]);
}

#[test]
fn indifference_breaks_when_age_moves() {
    let game = table_game(2.0, &[2.0, 3.0, 3.0]);
    let profile = msne_closed_form(&game).unwrap().profile().unwrap();
    let moved = game.with_age(2, 4.0 * common::SIGMA_S).unwrap();
    let r = verify_indifference(&moved, &profile).unwrap();
    assert!(r[0].abs() < INDIFFERENCE_TOLERANCE);
    assert!(r[1].abs() < INDIFFERENCE_TOLERANCE);
    assert!(r[2].abs() > 1e-3);
}

fn central_difference(game: &Game, i: usize, j: usize, h: f64) -> f64 {
    let up = msne_closed_form(&game.with_age(j, game.age(j) + h).unwrap()).unwrap();
    let down = msne_closed_form(&game.with_age(j, game.age(j) - h).unwrap()).unwrap();
    (up.raw_taus[i] - down.raw_taus[i]) / (2.0 * h)
}

#[test]
fn derivatives_match_finite_differences_on_row_iv() {
    let game = table_game(2.0, &[2.0, 3.0, 3.0]);
    let h = 1e-5 * common::SIGMA_S;
    for i in 0..3 {
        for j in (0..3).filter(|&j| j != i) {
            let d = monotonicity_derivatives(&game, i, j).unwrap();
            let own = central_difference(&game, i, i, h);
            let cross = central_difference(&game, i, j, h);
            assert!(common::relative_close(d.own, own, 1e-6), "{} vs {own}", d.own);
            assert!(common::relative_close(d.cross, cross, 1e-6), "{} vs {cross}", d.cross);
        }
    }
}

#[test]
fn table_row_v_is_more_aggressive_for_younger_nodes() {
    let iv = msne_closed_form(&table_game(2.0, &[2.0, 3.0, 3.0])).unwrap();
    let v = msne_closed_form(&table_game(2.0, &[2.0, 3.0, 4.0])).unwrap();
    assert!(v.raw_taus[0] > iv.raw_taus[0]);
    assert!(v.raw_taus[1] > iv.raw_taus[1]);
    assert!(v.raw_taus[2] < iv.raw_taus[2]);
}

#[test]
fn enumeration_guard() {
    let s = Slots::new(0.01, 1.01, 2.02).unwrap();
    let game = Game::new(s, vec![1.01; 21]).unwrap();
    assert_eq!(
        enumerate_pure_nash(&game),
        Err(GameError::TooManyNodes { n: 21, max: 20 })
    );
    assert!(check_weak_dominance(&game, 0, Action::Transmit).is_err());
}

#[test]
fn single_precision_closed_form() {
    let s = Slots32::new(0.01, 1.01, 2.02).unwrap();
    let game = Game32::new(s, vec![2.02, 3.03, 4.04]).unwrap();
    let m = msne_closed_form(&game).unwrap();
    assert!(m.feasible);
    for (got, want) in m.raw_taus.iter().zip([0.6672f32, 0.5012, 0.0049]) {
        assert!((got - want).abs() < 1e-4, "{got} vs {want}");
    }
    for r in m.indifference_residuals.unwrap() {
        assert!(r.abs() < 1e-5);
    }
}

#[test]
fn random_best_responses_are_endpoints_off_equilibrium() {
    // Payoff is affine in a node's own probability, so a strict preference
    // puts the grid maximum at 0 or 1.
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        let n = rng.gen_range(2..=5);
        let game = random_game(&mut rng, n, (0.05, 4.0));
        let profile = Profile::new(common::random_taus(&mut rng, n)).unwrap();
        let r = verify_indifference(&game, &profile).unwrap();
        for i in 0..n {
            if r[i].abs() > 1e-9 {
                let br = best_response_oracle(&game, i, &profile, 11).unwrap();
                let want = if r[i] > 0.0 { 1.0 } else { 0.0 };
                assert_eq!(br.tau, want);
            }
        }
    }
}
