//! Independent oracles for the integration tests.
//!
//! Nothing here calls into the probability or payoff code under test: slot
//! probabilities come from enumerating all `2^N` transmit patterns weighted by
//! their likelihood, and pure payoffs from replaying the slot outcome.

#![allow(dead_code)]

use csma_aoi_game::{Game, Slots};
use rand::Rng;

/// Slot-level quantities obtained by enumerating every transmit pattern.
#[derive(Debug, Clone)]
pub struct BruteForce {
    pub idle: f64,
    pub collision: f64,
    pub success: Vec<f64>,
    /// `busy[i]`: node `i` silent, exactly one other node transmits.
    pub busy: Vec<f64>,
    /// Mean age at the end of the slot for each node, from the given starting ages.
    pub mean_age: Vec<f64>,
    /// Merged `(age, mass)` pairs per node.
    pub pmf: Vec<Vec<(f64, f64)>>,
}

pub fn brute_force(taus: &[f64], slots: (f64, f64, f64), ages: &[f64]) -> BruteForce {
    let (idle_len, success_len, collision_len) = slots;
    let n = taus.len();
    let mut out = BruteForce {
        idle: 0.0,
        collision: 0.0,
        success: vec![0.0; n],
        busy: vec![0.0; n],
        mean_age: vec![0.0; n],
        pmf: vec![Vec::new(); n],
    };
    for mask in 0u32..1 << n {
        let weight: f64 = (0..n)
            .map(|i| if mask >> i & 1 == 1 { taus[i] } else { 1.0 - taus[i] })
            .product();
        let transmitters: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        match transmitters.len() {
            0 => out.idle += weight,
            1 => {
                let t = transmitters[0];
                out.success[t] += weight;
                for i in (0..n).filter(|&i| i != t) {
                    out.busy[i] += weight;
                }
            }
            _ => out.collision += weight,
        }
        for i in 0..n {
            let age = match transmitters.as_slice() {
                [] => ages[i] + idle_len,
                [t] if *t == i => success_len,
                [_] => ages[i] + success_len,
                _ => ages[i] + collision_len,
            };
            out.mean_age[i] += weight * age;
            let pmf = &mut out.pmf[i];
            match pmf.iter_mut().find(|(a, _)| *a == age) {
                Some((_, m)) => *m += weight,
                None => pmf.push((age, weight)),
            }
        }
    }
    for pmf in &mut out.pmf {
        pmf.retain(|&(_, m)| m != 0.0);
        pmf.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    }
    out
}

/// Age of node `i` after one slot in which the nodes flagged in `transmit` send.
pub fn replay_age(game: &Game, i: usize, transmit: &[bool]) -> f64 {
    let s = game.slot_lengths();
    let senders: Vec<usize> = (0..transmit.len()).filter(|&j| transmit[j]).collect();
    match senders.as_slice() {
        [] => game.age(i) + s.idle(),
        [j] if *j == i => s.success(),
        [_] => game.age(i) + s.success(),
        _ => game.age(i) + s.collision(),
    }
}

/// Whether some node strictly lowers its age by flipping its own action.
pub fn has_improving_deviation(game: &Game, transmit: &[bool]) -> bool {
    (0..transmit.len()).any(|i| {
        let mut flipped = transmit.to_vec();
        flipped[i] = !flipped[i];
        replay_age(game, i, &flipped) < replay_age(game, i, transmit)
    })
}

pub fn mask_to_string(n: usize, mask: u64) -> String {
    (0..n)
        .map(|i| if mask >> i & 1 == 1 { 'T' } else { 'I' })
        .collect()
}

pub fn relative_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub const SIGMA_S: f64 = 1.01;
pub const SIGMA_I: f64 = 0.01;

pub fn table_game(collision_multiple: f64, age_multiples: &[f64]) -> Game {
    let s = Slots::new(SIGMA_I, SIGMA_S, collision_multiple * SIGMA_S).unwrap();
    Game::new(s, age_multiples.iter().map(|m| m * SIGMA_S).collect()).unwrap()
}

/// Random instance: slot lengths with `sigma_idle < sigma_success`, the
/// requested collision range, and ages in `[sigma_s, 10 sigma_s]`.
pub fn random_game<R: Rng>(rng: &mut R, n: usize, collision_factor: (f64, f64)) -> Game {
    let success = rng.gen_range(0.5..2.0);
    let idle = rng.gen_range(0.001..0.2) * success;
    let collision = rng.gen_range(collision_factor.0..=collision_factor.1) * success;
    let s = Slots::new(idle, success, collision).unwrap();
    let ages = (0..n)
        .map(|_| rng.gen_range(1.0..=10.0) * success)
        .collect();
    Game::new(s, ages).unwrap()
}

pub fn random_taus<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| match rng.gen_range(0..10) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.gen::<f64>(),
        })
        .collect()
}
