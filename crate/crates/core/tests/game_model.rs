mod common;

use common::{brute_force, random_taus};
use csma_aoi_game::{
    age_pmf, busy_seen_probability, collision_probability, expected_age_after, idle_probability,
    mixed_payoff, pure_payoff, success_probability_of, total_success_probability, Action,
    ActionProfile, Profile, Slots,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SLOTS: (f64, f64, f64) = (0.01, 1.01, 2.02);
const ROW_IV_TAUS: [f64; 3] = [0.6008, 0.3355, 0.3355];

fn slots() -> Slots {
    Slots::new(SLOTS.0, SLOTS.1, SLOTS.2).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

// Frozen from the brute-force oracle over all 8 transmit patterns of
// tau = (0.6008, 0.3355, 0.3355); the oracle is re-run below as well.
const P_IDLE: f64 = 0.1762708518;
const P_SUCCESS_0: f64 = 0.2652893982;
const P_SUCCESS_1: f64 = 0.0889975482;
const P_COLLISION: f64 = 0.3804446536;
const BUSY_0: f64 = 0.1779950964;
const BUSY_2: f64 = 0.3542869464;
const MEAN_AGE_0: f64 = 2.702093663972;

#[test]
fn row_iv_point_matches_frozen_oracle() {
    let p = Profile::new(ROW_IV_TAUS.to_vec()).unwrap();
    let oracle = brute_force(&ROW_IV_TAUS, SLOTS, &[2.02, 3.03, 3.03]);
    for (got, frozen, live) in [
        (idle_probability(&p), P_IDLE, oracle.idle),
        (success_probability_of(0, &p).unwrap(), P_SUCCESS_0, oracle.success[0]),
        (success_probability_of(1, &p).unwrap(), P_SUCCESS_1, oracle.success[1]),
        (collision_probability(&p), P_COLLISION, oracle.collision),
        (busy_seen_probability(0, &p).unwrap(), BUSY_0, oracle.busy[0]),
        (busy_seen_probability(2, &p).unwrap(), BUSY_2, oracle.busy[2]),
    ] {
        assert!(close(got, frozen, 1e-10), "{got} vs frozen {frozen}");
        assert!(close(got, live, 1e-14), "{got} vs oracle {live}");
    }

    let pmf = age_pmf(0, 2.02, &p, &slots()).unwrap();
    let masses: Vec<f64> = pmf.support().iter().map(|&(_, m)| m).collect();
    assert_eq!(pmf.support().len(), 4);
    // Sorted by age: sigma_s, age + sigma_i, age + sigma_s, age + sigma_c.
    for (got, want) in masses.iter().zip([P_SUCCESS_0, P_IDLE, BUSY_0, P_COLLISION]) {
        assert!(close(*got, want, 1e-10));
    }
    assert!(close(pmf.total_mass(), 1.0, 1e-15));
    for ((a, m), (oa, om)) in pmf.support().iter().zip(&oracle.pmf[0]) {
        assert!(close(*a, *oa, 1e-15) && close(*m, *om, 1e-14));
    }

    let mean = expected_age_after(0, 2.02, &p, &slots()).unwrap();
    assert!(close(mean, MEAN_AGE_0, 1e-10));
    assert!(close(mean, oracle.mean_age[0], 1e-13));
    assert!(close(mean, pmf.mean(), 1e-13));
}

#[test]
fn two_fair_coins_against_brute_force() {
    let p = Profile::new(vec![0.5, 0.5]).unwrap();
    let oracle = brute_force(&[0.5, 0.5], SLOTS, &[1.01, 1.01]);
    assert_eq!(total_success_probability(&p), 0.5);
    assert_eq!(oracle.success.iter().sum::<f64>(), 0.5);
    assert_eq!(collision_probability(&p), 0.25);
    assert_eq!(oracle.collision, 0.25);
}

#[test]
fn corners_match_pure_payoffs_exhaustively() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=4 {
        for _ in 0..25 {
            let game = common::random_game(&mut rng, n, (0.05, 3.0));
            for mask in 0..1u64 << n {
                let actions = ActionProfile::from_mask(n, mask);
                let profile = Profile::from_actions(actions.actions());
                for i in 0..n {
                    assert_eq!(
                        mixed_payoff(i, &game, &profile).unwrap(),
                        pure_payoff(i, &game, actions.actions()).unwrap(),
                        "n {n} profile {actions} node {i}"
                    );
                }
            }
        }
    }
}

#[test]
fn pure_payoffs_match_replayed_outcomes() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in 2..=5 {
        let game = common::random_game(&mut rng, n, (0.05, 3.0));
        for mask in 0..1u64 << n {
            let transmit: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            let actions: Vec<Action> = ActionProfile::from_mask(n, mask).actions().to_vec();
            for i in 0..n {
                assert_eq!(
                    pure_payoff(i, &game, &actions).unwrap(),
                    -common::replay_age(&game, i, &transmit)
                );
            }
        }
    }
}

fn arb_profile() -> impl Strategy<Value = Vec<f64>> {
    (2usize..=6).prop_flat_map(|n| {
        proptest::collection::vec(
            prop_oneof![1 => Just(0.0), 1 => Just(1.0), 8 => 0.0f64..=1.0],
            n,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn probabilities_close(taus in arb_profile()) {
        let p = Profile::new(taus.clone()).unwrap();
        let per_node: f64 = (0..taus.len()).map(|i| success_probability_of(i, &p).unwrap()).sum();
        let total = idle_probability(&p) + per_node + collision_probability(&p);
        prop_assert!((total - 1.0).abs() <= 1e-12);
        let ps = total_success_probability(&p);
        for i in 0..taus.len() {
            let busy = busy_seen_probability(i, &p).unwrap();
            prop_assert!((busy - (ps - success_probability_of(i, &p).unwrap())).abs() <= 1e-12);
        }
        let oracle = brute_force(&taus, SLOTS, &vec![1.01; taus.len()]);
        prop_assert!((oracle.collision - collision_probability(&p)).abs() <= 1e-12);
    }

    #[test]
    fn pmf_mean_is_expected_age(
        taus in arb_profile(),
        age_factor in 1.0f64..20.0,
        node_pick in 0usize..6,
    ) {
        let p = Profile::new(taus.clone()).unwrap();
        let i = node_pick % taus.len();
        let age = age_factor * SLOTS.1;
        let pmf = age_pmf(i, age, &p, &slots()).unwrap();
        let mean = expected_age_after(i, age, &p, &slots()).unwrap();
        prop_assert!((pmf.total_mass() - 1.0).abs() <= 1e-12);
        prop_assert!((pmf.mean() - mean).abs() <= 1e-12 * mean.abs());
        let ages: Vec<f64> = pmf.support().iter().map(|&(a, _)| a).collect();
        for w in ages.windows(2) {
            prop_assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn collision_non_decreasing_in_each_tau(
        taus in proptest::collection::vec(0.01f64..=1.0, 2..6),
        node_pick in 0usize..6,
        a in 0.0f64..=1.0,
        b in 0.0f64..=1.0,
    ) {
        let i = node_pick % taus.len();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let p = Profile::new(taus).unwrap();
        let low = collision_probability(&p.with_tau(i, lo).unwrap());
        let high = collision_probability(&p.with_tau(i, hi).unwrap());
        prop_assert!(high >= low - 1e-15);
    }
}

#[test]
fn random_profiles_against_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 2..=6 {
        for _ in 0..50 {
            let taus = random_taus(&mut rng, n);
            let p = Profile::new(taus.clone()).unwrap();
            let ages: Vec<f64> = (0..n).map(|k| 1.01 * (1.0 + k as f64)).collect();
            let oracle = brute_force(&taus, SLOTS, &ages);
            assert!(close(idle_probability(&p), oracle.idle, 1e-13));
            for i in 0..n {
                assert!(close(busy_seen_probability(i, &p).unwrap(), oracle.busy[i], 1e-13));
                let mean = expected_age_after(i, ages[i], &p, &slots()).unwrap();
                assert!(close(mean, oracle.mean_age[i], 1e-12));
            }
        }
    }
}
