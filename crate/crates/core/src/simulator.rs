//! Seeded Monte Carlo simulation of CSMA/CA slots under a fixed strategy profile.
//!
//! Two experiments are provided. The restart experiment draws independent
//! slots and restarts every node from its starting age each time, which
//! estimates the one-slot age distribution and its mean. The sequential
//! experiment carries ages from slot to slot and records sample paths; it
//! illustrates the age dynamics and makes no equilibrium claim beyond the
//! first slot.
//!
//! Randomness comes from ChaCha8 seeded with a `u64` and an explicit stream
//! number, so independent replications split cleanly. Every node consumes one
//! uniform variate per slot, in node-index order; a node transmits when its
//! variate is below its transmit probability.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GameError, Result};
use crate::game::{AgePmf, GameInstance, SlotLengths, StrategyProfile};
use crate::scalar::Scalar;

/// Stream used by [`run_monte_carlo`].
pub const RESTART_STREAM: u64 = 0;
/// Stream used by [`simulate_age_trajectory`].
pub const SEQUENTIAL_STREAM: u64 = 1;

pub type SimRng = ChaCha8Rng;

/// Generator for replication `stream` of a run seeded with `seed`.
pub fn seeded_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlotKind {
    Idle,
    Success(usize),
    Collision,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotOutcome<T> {
    pub kind: SlotKind,
    pub duration: T,
}

impl<T: Scalar> SlotOutcome<T> {
    pub fn new(kind: SlotKind, slots: &SlotLengths<T>) -> Self {
        let duration = match kind {
            SlotKind::Idle => slots.idle(),
            SlotKind::Success(_) => slots.success(),
            SlotKind::Collision => slots.collision(),
        };
        SlotOutcome { kind, duration }
    }

    /// Node `i`'s age at the end of this slot when it started at `age_before`.
    pub fn age_after(&self, i: usize, age_before: T) -> T {
        match self.kind {
            SlotKind::Success(j) if j == i => self.duration,
            _ => age_before + self.duration,
        }
    }
}

/// Draws one slot: every node transmits independently with its own probability.
pub fn sample_slot<T: Scalar, R: Rng + ?Sized>(
    profile: &StrategyProfile<T>,
    slots: &SlotLengths<T>,
    rng: &mut R,
) -> SlotOutcome<T> {
    let mut transmitter = None;
    let mut count = 0usize;
    for (i, &tau) in profile.taus().iter().enumerate() {
        let u: f64 = rng.gen();
        if u < tau.as_f64() {
            count += 1;
            transmitter = Some(i);
        }
    }
    let kind = match (count, transmitter) {
        (0, _) => SlotKind::Idle,
        (1, Some(i)) => SlotKind::Success(i),
        _ => SlotKind::Collision,
    };
    SlotOutcome::new(kind, slots)
}

/// Aggregates of a restart experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SimStats<T> {
    pub slots: u64,
    pub idle_count: u64,
    pub collision_count: u64,
    pub success_count_per_node: Vec<u64>,
    /// Sample mean of each node's one-slot age, restarted from its starting age every slot.
    pub mean_age_after_per_node: Vec<T>,
    /// Sample standard deviation of the same one-slot ages.
    pub std_age_after_per_node: Vec<T>,
}

impl<T: Scalar> SimStats<T> {
    pub fn n(&self) -> usize {
        self.success_count_per_node.len()
    }

    pub fn success_count(&self) -> u64 {
        self.success_count_per_node.iter().sum()
    }

    fn frequency(&self, count: u64) -> f64 {
        count as f64 / self.slots as f64
    }

    pub fn idle_frequency(&self) -> f64 {
        self.frequency(self.idle_count)
    }

    pub fn collision_frequency(&self) -> f64 {
        self.frequency(self.collision_count)
    }

    pub fn success_frequency(&self, i: usize) -> f64 {
        self.frequency(self.success_count_per_node[i])
    }

    pub fn total_success_frequency(&self) -> f64 {
        self.frequency(self.success_count())
    }

    /// Standard error of the mean one-slot age of node `i`.
    pub fn mean_age_standard_error(&self, i: usize) -> f64 {
        self.std_age_after_per_node[i].as_f64() / (self.slots as f64).sqrt()
    }

    /// Empirical one-slot age distribution of node `i` started from `age_before`.
    pub fn empirical_age_pmf(&self, i: usize, age_before: T, slots: &SlotLengths<T>) -> AgePmf<T> {
        let freq = |count: u64| T::lit(self.frequency(count));
        let busy = self.success_count() - self.success_count_per_node[i];
        AgePmf::from_points([
            (age_before + slots.idle(), freq(self.idle_count)),
            (age_before + slots.collision(), freq(self.collision_count)),
            (age_before + slots.success(), freq(busy)),
            (slots.success(), freq(self.success_count_per_node[i])),
        ])
    }
}

/// Binomial standard error of a frequency estimate of `p` from `trials` draws.
pub fn binomial_standard_error(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

fn check_profile<T: Scalar>(game: &GameInstance<T>, profile: &StrategyProfile<T>) -> Result<()> {
    if profile.len() != game.n() {
        return Err(GameError::LengthMismatch {
            expected: game.n(),
            got: profile.len(),
        });
    }
    Ok(())
}

/// Restart experiment: `num_slots` independent slots, each node starting
/// every slot from its age in `game`.
pub fn run_monte_carlo<T: Scalar>(
    game: &GameInstance<T>,
    profile: &StrategyProfile<T>,
    num_slots: u64,
    seed: u64,
) -> Result<SimStats<T>> {
    check_profile(game, profile)?;
    if num_slots == 0 {
        return Err(GameError::NoSlots);
    }
    let n = game.n();
    let slots = game.slot_lengths();
    let mut rng = seeded_rng(seed, RESTART_STREAM);
    let mut idle_count = 0;
    let mut collision_count = 0;
    let mut success = vec![0u64; n];
    // Welford accumulators, in f64 regardless of T.
    let mut mean = vec![0.0f64; n];
    let mut m2 = vec![0.0f64; n];
    for k in 0..num_slots {
        let outcome = sample_slot(profile, slots, &mut rng);
        match outcome.kind {
            SlotKind::Idle => idle_count += 1,
            SlotKind::Success(i) => success[i] += 1,
            SlotKind::Collision => collision_count += 1,
        }
        let count = (k + 1) as f64;
        for i in 0..n {
            let x = outcome.age_after(i, game.age(i)).as_f64();
            let delta = x - mean[i];
            mean[i] += delta / count;
            m2[i] += delta * (x - mean[i]);
        }
    }
    let std = m2
        .iter()
        .map(|&m| {
            if num_slots > 1 {
                T::lit((m / (num_slots - 1) as f64).sqrt())
            } else {
                T::zero()
            }
        })
        .collect();
    Ok(SimStats {
        slots: num_slots,
        idle_count,
        collision_count,
        success_count_per_node: success,
        mean_age_after_per_node: mean.into_iter().map(T::lit).collect(),
        std_age_after_per_node: std,
    })
}

/// Piecewise-linear age sample path of one node.
///
/// Breakpoints are `(time, age)` pairs. Age grows with slope one between
/// breakpoints; a reset shows up as two breakpoints at the same time, the
/// first at the pre-reset age and the second at the successful slot length.
#[derive(Debug, Clone, PartialEq)]
pub struct AgeTrajectory<T> {
    pub node: usize,
    pub points: Vec<(T, T)>,
}

/// Slot outcomes of a sequential run and the age paths they produce.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRun<T> {
    pub outcomes: Vec<SlotOutcome<T>>,
    /// Slot boundary times, starting at zero; one more entry than `outcomes`.
    pub boundaries: Vec<T>,
    /// Age of every node at each boundary (after any reset); indexed `[slot][node]`.
    pub boundary_ages: Vec<Vec<T>>,
    pub trajectories: Vec<AgeTrajectory<T>>,
}

/// Sequential experiment: ages carry over from slot to slot, starting at a
/// slot boundary with the ages in `game`.
pub fn simulate_age_trajectory<T: Scalar>(
    game: &GameInstance<T>,
    profile: &StrategyProfile<T>,
    num_slots: u64,
    seed: u64,
) -> Result<TrajectoryRun<T>> {
    check_profile(game, profile)?;
    if num_slots == 0 {
        return Err(GameError::NoSlots);
    }
    let n = game.n();
    let slots = game.slot_lengths();
    let mut rng = seeded_rng(seed, SEQUENTIAL_STREAM);
    let mut ages = game.ages().as_slice().to_vec();
    let mut time = T::zero();
    let mut outcomes = Vec::with_capacity(num_slots as usize);
    let mut boundaries = vec![time];
    let mut boundary_ages = vec![ages.clone()];
    let mut trajectories: Vec<AgeTrajectory<T>> = (0..n)
        .map(|node| AgeTrajectory {
            node,
            points: vec![(time, ages[node])],
        })
        .collect();
    for _ in 0..num_slots {
        let outcome = sample_slot(profile, slots, &mut rng);
        time = time + outcome.duration;
        for (i, age) in ages.iter_mut().enumerate() {
            let grown = *age + outcome.duration;
            let points = &mut trajectories[i].points;
            points.push((time, grown));
            *age = outcome.age_after(i, *age);
            if outcome.kind == SlotKind::Success(i) {
                points.push((time, *age));
            }
        }
        outcomes.push(outcome);
        boundaries.push(time);
        boundary_ages.push(ages.clone());
    }
    Ok(TrajectoryRun {
        outcomes,
        boundaries,
        boundary_ages,
        trajectories,
    })
}
