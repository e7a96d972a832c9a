//! Slot model of a CSMA/CA medium shared by nodes that all sense each other.
//!
//! A slot is idle (nobody transmits), a success (exactly one node transmits)
//! or a collision (two or more transmit). Each node's update ages by the
//! length of the slot unless the node itself transmitted successfully, in
//! which case its age at the other nodes resets to the length of a successful
//! slot. The payoff of a node is the negative of its expected age at the end
//! of the slot.

use std::fmt;
use std::str::FromStr;

use crate::error::{GameError, Result};
use crate::scalar::Scalar;

/// Whether a collision slot is at most as long as a successful slot
/// (RTS/CTS-like access) or strictly longer (basic access).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CollisionRegime {
    /// `sigma_collision <= sigma_success`.
    ShortCollision,
    /// `sigma_collision > sigma_success`.
    LongCollision,
}

impl fmt::Display for CollisionRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CollisionRegime::ShortCollision => f.write_str("short_collision"),
            CollisionRegime::LongCollision => f.write_str("long_collision"),
        }
    }
}

/// Durations of idle, successful and collision slots, in one abstract time unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotLengths<T> {
    idle: T,
    success: T,
    collision: T,
}

impl<T: Scalar> SlotLengths<T> {
    pub fn new(idle: T, success: T, collision: T) -> Result<Self> {
        for (name, value) in [
            ("sigma_idle", idle),
            ("sigma_success", success),
            ("sigma_collision", collision),
        ] {
            if !(value > T::zero()) || !value.is_finite() {
                return Err(GameError::NonPositiveSlotLength {
                    name,
                    value: value.as_f64(),
                });
            }
        }
        if !(idle < success) {
            return Err(GameError::IdleNotShorterThanSuccess {
                idle: idle.as_f64(),
                success: success.as_f64(),
            });
        }
        Ok(SlotLengths {
            idle,
            success,
            collision,
        })
    }

    pub fn idle(&self) -> T {
        self.idle
    }

    pub fn success(&self) -> T {
        self.success
    }

    pub fn collision(&self) -> T {
        self.collision
    }

    /// The boundary `sigma_collision == sigma_success` counts as short.
    pub fn regime(&self) -> CollisionRegime {
        if self.collision <= self.success {
            CollisionRegime::ShortCollision
        } else {
            CollisionRegime::LongCollision
        }
    }
}

/// Ages of every node's latest update at the other nodes, taken at the start of the slot.
#[derive(Debug, Clone, PartialEq)]
pub struct AgeVector<T>(Vec<T>);

impl<T: Scalar> AgeVector<T> {
    /// Every age must be at least one successful slot long: a fresh update
    /// needs that long to be delivered.
    pub fn new(ages: Vec<T>, slots: &SlotLengths<T>) -> Result<Self> {
        if ages.len() < 2 {
            return Err(GameError::TooFewNodes { n: ages.len() });
        }
        for (node, &age) in ages.iter().enumerate() {
            check_age(node, age, slots)?;
        }
        Ok(AgeVector(ages))
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mean(&self) -> T {
        self.sum() / T::from_count(self.0.len())
    }

    pub fn sum(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, &a| acc + a)
    }
}

fn check_age<T: Scalar>(node: usize, age: T, slots: &SlotLengths<T>) -> Result<()> {
    if !(age >= slots.success()) || !age.is_finite() {
        return Err(GameError::AgeBelowSuccessSlot {
            node,
            age: age.as_f64(),
            sigma_success: slots.success().as_f64(),
        });
    }
    Ok(())
}

/// A pure action in a slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Transmit,
    Idle,
}

impl Action {
    pub fn other(self) -> Action {
        match self {
            Action::Transmit => Action::Idle,
            Action::Idle => Action::Transmit,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Action::Transmit => 'T',
            Action::Idle => 'I',
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// One pure action per node, written as a string such as `TIT`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionProfile(Vec<Action>);

impl ActionProfile {
    pub fn new(actions: Vec<Action>) -> Self {
        ActionProfile(actions)
    }

    /// Bit `i` of `mask` set means node `i` transmits.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        ActionProfile(
            (0..n)
                .map(|i| {
                    if mask >> i & 1 == 1 {
                        Action::Transmit
                    } else {
                        Action::Idle
                    }
                })
                .collect(),
        )
    }

    pub fn actions(&self) -> &[Action] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn transmitters(&self) -> usize {
        self.0.iter().filter(|&&a| a == Action::Transmit).count()
    }

    /// The same profile with node `i`'s action flipped.
    pub fn deviate(&self, i: usize) -> ActionProfile {
        let mut actions = self.0.clone();
        actions[i] = actions[i].other();
        ActionProfile(actions)
    }
}

impl fmt::Display for ActionProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.0 {
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl FromStr for ActionProfile {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                'T' | 't' => Ok(Action::Transmit),
                'I' | 'i' => Ok(Action::Idle),
                other => Err(format!("unknown action `{other}` (expected T or I)")),
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(ActionProfile)
    }
}

/// Transmit probability of every node. Pure strategies are the endpoints 0 and 1.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyProfile<T>(Vec<T>);

impl<T: Scalar> StrategyProfile<T> {
    pub fn new(taus: Vec<T>) -> Result<Self> {
        for (node, &tau) in taus.iter().enumerate() {
            if !(tau >= T::zero() && tau <= T::one()) {
                return Err(GameError::ProbabilityOutOfRange {
                    node,
                    value: tau.as_f64(),
                });
            }
        }
        Ok(StrategyProfile(taus))
    }

    pub fn uniform(n: usize, tau: T) -> Result<Self> {
        Self::new(vec![tau; n])
    }

    pub fn from_actions(actions: &[Action]) -> Self {
        StrategyProfile(
            actions
                .iter()
                .map(|a| match a {
                    Action::Transmit => T::one(),
                    Action::Idle => T::zero(),
                })
                .collect(),
        )
    }

    pub fn taus(&self) -> &[T] {
        &self.0
    }

    pub fn tau(&self, i: usize) -> T {
        self.0[i]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_pure(&self) -> bool {
        self.0.iter().all(|&t| t == T::zero() || t == T::one())
    }

    /// The pure action profile, if every probability is 0 or 1.
    pub fn to_actions(&self) -> Option<ActionProfile> {
        self.is_pure().then(|| {
            ActionProfile::new(
                self.0
                    .iter()
                    .map(|&t| {
                        if t == T::one() {
                            Action::Transmit
                        } else {
                            Action::Idle
                        }
                    })
                    .collect(),
            )
        })
    }

    /// Replaces node `i`'s transmit probability.
    pub fn with_tau(&self, i: usize, tau: T) -> Result<Self> {
        check_index(i, self.len())?;
        let mut taus = self.0.clone();
        taus[i] = tau;
        Self::new(taus)
    }
}

/// The one-shot game: node count, slot lengths and the ages at the start of the slot.
#[derive(Debug, Clone, PartialEq)]
pub struct GameInstance<T> {
    slot_lengths: SlotLengths<T>,
    ages: AgeVector<T>,
}

impl<T: Scalar> GameInstance<T> {
    pub fn new(slot_lengths: SlotLengths<T>, ages: Vec<T>) -> Result<Self> {
        let ages = AgeVector::new(ages, &slot_lengths)?;
        Ok(GameInstance {
            slot_lengths,
            ages,
        })
    }

    pub fn n(&self) -> usize {
        self.ages.len()
    }

    pub fn slot_lengths(&self) -> &SlotLengths<T> {
        &self.slot_lengths
    }

    pub fn ages(&self) -> &AgeVector<T> {
        &self.ages
    }

    pub fn age(&self, i: usize) -> T {
        self.ages.as_slice()[i]
    }

    pub fn mean_age(&self) -> T {
        self.ages.mean()
    }

    pub fn regime(&self) -> CollisionRegime {
        self.slot_lengths.regime()
    }

    /// A copy of the game with node `i`'s starting age replaced.
    pub fn with_age(&self, i: usize, age: T) -> Result<Self> {
        check_index(i, self.n())?;
        let mut ages = self.ages.as_slice().to_vec();
        ages[i] = age;
        Self::new(self.slot_lengths, ages)
    }
}

pub(crate) fn check_index(index: usize, n: usize) -> Result<()> {
    if index >= n {
        return Err(GameError::NodeIndexOutOfRange { index, n });
    }
    Ok(())
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(GameError::LengthMismatch { expected, got });
    }
    Ok(())
}

/// Product of `(1 - tau_k)` over all `k` not in `skip`.
fn silent_product<T: Scalar>(taus: &[T], skip: &[usize]) -> T {
    taus.iter()
        .enumerate()
        .filter(|(k, _)| !skip.contains(k))
        .fold(T::one(), |acc, (_, &t)| acc * (T::one() - t))
}

/// Probability that nobody transmits.
pub fn idle_probability<T: Scalar>(profile: &StrategyProfile<T>) -> T {
    silent_product(profile.taus(), &[])
}

/// Probability that node `i` is the only transmitter.
pub fn success_probability_of<T: Scalar>(i: usize, profile: &StrategyProfile<T>) -> Result<T> {
    check_index(i, profile.len())?;
    Ok(profile.tau(i) * silent_product(profile.taus(), &[i]))
}

/// Probability that exactly one node transmits.
pub fn total_success_probability<T: Scalar>(profile: &StrategyProfile<T>) -> T {
    (0..profile.len()).fold(T::zero(), |acc, i| {
        acc + profile.tau(i) * silent_product(profile.taus(), &[i])
    })
}

/// How the busy-slot probability seen by a node is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BusySeenReading {
    /// Node `i` stays silent and exactly one other node transmits.
    /// The age PMF sums to one under this reading.
    #[default]
    Normalized,
    /// Exactly one node other than `i` transmits, without conditioning on
    /// `i` staying silent. Kept for comparison only: it over-counts whenever
    /// `0 < tau_i`, and the age PMF built from it does not sum to one.
    Literal,
}

/// Probability that node `i` sees a busy slot: it stays silent while exactly one other node transmits.
pub fn busy_seen_probability<T: Scalar>(i: usize, profile: &StrategyProfile<T>) -> Result<T> {
    busy_seen_probability_with(i, profile, BusySeenReading::Normalized)
}

pub fn busy_seen_probability_with<T: Scalar>(
    i: usize,
    profile: &StrategyProfile<T>,
    reading: BusySeenReading,
) -> Result<T> {
    check_index(i, profile.len())?;
    let taus = profile.taus();
    let others = (0..taus.len())
        .filter(|&j| j != i)
        .fold(T::zero(), |acc, j| acc + taus[j] * silent_product(taus, &[i, j]));
    Ok(match reading {
        BusySeenReading::Normalized => (T::one() - taus[i]) * others,
        BusySeenReading::Literal => others,
    })
}

/// Probability of two or more simultaneous transmissions.
pub fn collision_probability<T: Scalar>(profile: &StrategyProfile<T>) -> T {
    let p = T::one() - idle_probability(profile) - total_success_probability(profile);
    p.max(T::zero()).min(T::one())
}

/// Distribution of a node's age at the end of the slot, with distinct support points.
#[derive(Debug, Clone, PartialEq)]
pub struct AgePmf<T> {
    support: Vec<(T, T)>,
}

impl<T: Scalar> AgePmf<T> {
    /// Builds a PMF from `(age, probability)` pairs. Equal ages are merged,
    /// zero-mass points dropped, and the support sorted by age.
    pub fn from_points(points: impl IntoIterator<Item = (T, T)>) -> Self {
        let mut support: Vec<(T, T)> = Vec::new();
        for (age, mass) in points {
            if mass == T::zero() {
                continue;
            }
            match support.iter_mut().find(|(a, _)| *a == age) {
                Some((_, m)) => *m = *m + mass,
                None => support.push((age, mass)),
            }
        }
        support.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite ages"));
        AgePmf { support }
    }

    pub fn support(&self) -> &[(T, T)] {
        &self.support
    }

    pub fn total_mass(&self) -> T {
        self.support.iter().fold(T::zero(), |acc, &(_, m)| acc + m)
    }

    pub fn mean(&self) -> T {
        self.support
            .iter()
            .fold(T::zero(), |acc, &(a, m)| acc + a * m)
    }

    /// Mass at exactly `age`, zero when `age` is not a support point.
    pub fn probability_of(&self, age: T) -> T {
        self.support
            .iter()
            .find(|(a, _)| *a == age)
            .map_or(T::zero(), |&(_, m)| m)
    }
}

/// Conditional PMF of node `i`'s age at the end of the slot given its age `age_before` at the start.
pub fn age_pmf<T: Scalar>(
    i: usize,
    age_before: T,
    profile: &StrategyProfile<T>,
    slots: &SlotLengths<T>,
) -> Result<AgePmf<T>> {
    check_index(i, profile.len())?;
    check_age(i, age_before, slots)?;
    let p_idle = idle_probability(profile);
    let p_collision = collision_probability(profile);
    let p_busy = busy_seen_probability(i, profile)?;
    let p_own = success_probability_of(i, profile)?;
    Ok(AgePmf::from_points([
        (age_before + slots.idle(), p_idle),
        (age_before + slots.collision(), p_collision),
        (age_before + slots.success(), p_busy),
        (slots.success(), p_own),
    ]))
}

/// Expected age of node `i` at the end of the slot given its age `age_before` at the start.
pub fn expected_age_after<T: Scalar>(
    i: usize,
    age_before: T,
    profile: &StrategyProfile<T>,
    slots: &SlotLengths<T>,
) -> Result<T> {
    check_index(i, profile.len())?;
    check_age(i, age_before, slots)?;
    let p_own = success_probability_of(i, profile)?;
    let mean_slot = idle_probability(profile) * slots.idle()
        + total_success_probability(profile) * slots.success()
        + collision_probability(profile) * slots.collision();
    Ok((T::one() - p_own) * age_before + mean_slot)
}

/// Expected payoff of node `i`: the negative expected age at the end of the slot.
pub fn mixed_payoff<T: Scalar>(
    i: usize,
    game: &GameInstance<T>,
    profile: &StrategyProfile<T>,
) -> Result<T> {
    check_len(game.n(), profile.len())?;
    check_index(i, game.n())?;
    Ok(-expected_age_after(i, game.age(i), profile, game.slot_lengths())?)
}

/// Payoff of node `i` when every node plays a pure action.
pub fn pure_payoff<T: Scalar>(i: usize, game: &GameInstance<T>, actions: &[Action]) -> Result<T> {
    check_len(game.n(), actions.len())?;
    check_index(i, game.n())?;
    let slots = game.slot_lengths();
    let age = game.age(i);
    let others = actions
        .iter()
        .enumerate()
        .filter(|&(j, &a)| j != i && a == Action::Transmit)
        .count();
    let age_after = match (actions[i], others) {
        (Action::Idle, 0) => age + slots.idle(),
        (Action::Transmit, 0) => slots.success(),
        (Action::Transmit, _) => age + slots.collision(),
        (Action::Idle, 1) => age + slots.success(),
        (Action::Idle, _) => age + slots.collision(),
    };
    Ok(-age_after)
}
