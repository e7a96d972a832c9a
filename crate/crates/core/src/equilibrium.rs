//! Equilibrium analysis of the one-shot access game: weak dominance, pure
//! Nash equilibria by exhaustive enumeration, the closed-form mixed
//! equilibrium with its feasibility region, and checks around it.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{GameError, Result};
use crate::game::{
    check_index, mixed_payoff, pure_payoff, Action, ActionProfile, CollisionRegime, GameInstance,
    StrategyProfile,
};
use crate::scalar::Scalar;

/// Largest node count accepted by the exhaustive pure-profile enumerations.
pub const MAX_ENUMERATION_NODES: usize = 20;

/// Absolute tolerance on indifference residuals, in payoff (duration) units.
pub const INDIFFERENCE_TOLERANCE: f64 = 1e-9;

fn check_enumerable(n: usize) -> Result<()> {
    if n > MAX_ENUMERATION_NODES {
        return Err(GameError::TooManyNodes {
            n,
            max: MAX_ENUMERATION_NODES,
        });
    }
    Ok(())
}

/// Outcome of comparing one pure action of a node against the other one over
/// every pure profile of its opponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DominanceReport {
    pub node: usize,
    pub strategy: Action,
    /// Payoff is at least that of the other action against every opponent profile.
    pub weakly_dominant_per_paper: bool,
    /// Payoff is strictly larger against at least one opponent profile.
    pub strictly_better_somewhere: bool,
}

impl DominanceReport {
    /// Weak dominance in the textbook sense: never worse and sometimes better.
    pub fn weakly_dominant_strict_sense(&self) -> bool {
        self.weakly_dominant_per_paper && self.strictly_better_somewhere
    }
}

/// Compares `strategy` against the other action for node `i` across all
/// `2^(N-1)` pure opponent profiles.
pub fn check_weak_dominance<T: Scalar>(
    game: &GameInstance<T>,
    i: usize,
    strategy: Action,
) -> Result<DominanceReport> {
    let n = game.n();
    check_index(i, n)?;
    check_enumerable(n)?;
    let mut never_worse = true;
    let mut better_somewhere = false;
    let mut actions = vec![Action::Idle; n];
    for mask in 0..1u64 << (n - 1) {
        let mut bit = 0;
        for (j, slot) in actions.iter_mut().enumerate() {
            if j == i {
                continue;
            }
            *slot = if mask >> bit & 1 == 1 {
                Action::Transmit
            } else {
                Action::Idle
            };
            bit += 1;
        }
        actions[i] = strategy;
        let with = pure_payoff(i, game, &actions)?;
        actions[i] = strategy.other();
        let without = pure_payoff(i, game, &actions)?;
        if with < without {
            never_worse = false;
        }
        if with > without {
            better_somewhere = true;
        }
    }
    Ok(DominanceReport {
        node: i,
        strategy,
        weakly_dominant_per_paper: never_worse,
        strictly_better_somewhere: better_somewhere,
    })
}

/// Set of pure profiles from which no node can strictly gain by switching its own action.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PureNashSet {
    profiles: BTreeSet<ActionProfile>,
}

impl PureNashSet {
    pub fn profiles(&self) -> &BTreeSet<ActionProfile> {
        &self.profiles
    }

    pub fn contains(&self, profile: &ActionProfile) -> bool {
        self.profiles.contains(profile)
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ActionProfile> {
        self.profiles.iter()
    }

    /// Set union, for merging enumerations split across workers.
    pub fn merge(mut self, other: PureNashSet) -> PureNashSet {
        self.profiles.extend(other.profiles);
        self
    }
}

impl FromIterator<ActionProfile> for PureNashSet {
    fn from_iter<I: IntoIterator<Item = ActionProfile>>(iter: I) -> Self {
        PureNashSet {
            profiles: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for PureNashSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, p) in self.profiles.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

/// True when no node has a strictly improving unilateral deviation. Ties do not disqualify.
pub fn is_pure_nash<T: Scalar>(game: &GameInstance<T>, profile: &ActionProfile) -> Result<bool> {
    for i in 0..game.n() {
        let stay = pure_payoff(i, game, profile.actions())?;
        let deviate = pure_payoff(i, game, profile.deviate(i).actions())?;
        if deviate > stay {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All pure Nash equilibria, by checking each of the `2^N` pure profiles.
pub fn enumerate_pure_nash<T: Scalar>(game: &GameInstance<T>) -> Result<PureNashSet> {
    let n = game.n();
    check_enumerable(n)?;
    let mut set = PureNashSet::default();
    for mask in 0..1u64 << n {
        let profile = ActionProfile::from_mask(n, mask);
        if is_pure_nash(game, &profile)? {
            set.profiles.insert(profile);
        }
    }
    Ok(set)
}

/// Closed-form mixed equilibrium candidate together with its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct MsneResult<T> {
    /// Closed-form transmit probabilities, reported as computed even outside `(0, 1)`.
    pub raw_taus: Vec<T>,
    /// Per-node feasibility inequality on the starting ages.
    pub feasible_per_node: Vec<bool>,
    /// Every node feasible and collisions longer than successes.
    pub feasible: bool,
    /// `u_i(1, tau_-i) - u_i(0, tau_-i)` at the candidate; present only when feasible.
    pub indifference_residuals: Option<Vec<T>>,
}

impl<T: Scalar> MsneResult<T> {
    /// The candidate as a strategy profile, when feasible.
    pub fn profile(&self) -> Option<StrategyProfile<T>> {
        if !self.feasible {
            return None;
        }
        StrategyProfile::new(self.raw_taus.clone()).ok()
    }
}

/// Numerator and denominator of the closed-form transmit probability of node `i`.
fn closed_form_terms<T: Scalar>(game: &GameInstance<T>, i: usize) -> (T, T) {
    let s = game.slot_lengths();
    let n = T::from_count(game.n());
    let n1 = n - T::one();
    // N times the mean age.
    let total_age = game.ages().sum();
    let own = n1 * game.age(i) - total_age;
    let numerator = s.success() - s.idle() + own;
    let denominator = n * s.success() - n1 * s.collision() - s.idle() + own;
    (numerator, denominator)
}

/// Whether node `i`'s starting age satisfies
/// `mean_age - (N-1) age_i / N > (sigma_success - sigma_idle) / N`.
pub fn feasibility_condition<T: Scalar>(game: &GameInstance<T>, i: usize) -> Result<bool> {
    check_index(i, game.n())?;
    let s = game.slot_lengths();
    let n = T::from_count(game.n());
    let lhs = game.mean_age() - (n - T::one()) * game.age(i) / n;
    Ok(lhs > (s.success() - s.idle()) / n)
}

/// Evaluates the closed-form mixed equilibrium of the game.
///
/// Every node's value is computed even when it falls outside `(0, 1)`; the
/// feasibility flags say whether the candidate is a genuine interior
/// equilibrium. Residuals of the indifference conditions are attached when
/// the candidate is feasible.
pub fn msne_closed_form<T: Scalar>(game: &GameInstance<T>) -> Result<MsneResult<T>> {
    let n = game.n();
    let mut raw_taus = Vec::with_capacity(n);
    for i in 0..n {
        let (num, den) = closed_form_terms(game, i);
        if den == T::zero() {
            return Err(GameError::SingularInstance { node: i });
        }
        raw_taus.push(num / den);
    }
    let feasible_per_node = (0..n)
        .map(|i| feasibility_condition(game, i))
        .collect::<Result<Vec<_>>>()?;
    let feasible =
        game.regime() == CollisionRegime::LongCollision && feasible_per_node.iter().all(|&f| f);
    let indifference_residuals = if feasible {
        let profile = StrategyProfile::new(raw_taus.clone())?;
        Some(verify_indifference(game, &profile)?)
    } else {
        None
    };
    Ok(MsneResult {
        raw_taus,
        feasible_per_node,
        feasible,
        indifference_residuals,
    })
}

/// For every node, the payoff of transmitting for sure minus the payoff of
/// idling for sure, with everyone else playing `profile`. All zero at a mixed
/// equilibrium where every node randomizes.
pub fn verify_indifference<T: Scalar>(
    game: &GameInstance<T>,
    profile: &StrategyProfile<T>,
) -> Result<Vec<T>> {
    if profile.len() != game.n() {
        return Err(GameError::LengthMismatch {
            expected: game.n(),
            got: profile.len(),
        });
    }
    (0..game.n())
        .map(|i| {
            let transmit = mixed_payoff(i, game, &profile.with_tau(i, T::one())?)?;
            let idle = mixed_payoff(i, game, &profile.with_tau(i, T::zero())?)?;
            Ok(transmit - idle)
        })
        .collect()
}

/// Result of a grid search over node `i`'s own transmit probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestResponse<T> {
    /// First grid point attaining the maximum payoff.
    pub tau: T,
    pub payoff: T,
    /// Largest minus smallest payoff over the grid.
    pub spread: T,
}

/// Evaluates node `i`'s payoff on `grid_size` evenly spaced values of its own
/// transmit probability in `[0, 1]`, others fixed at `opponents` (entry `i` ignored).
pub fn best_response_oracle<T: Scalar>(
    game: &GameInstance<T>,
    i: usize,
    opponents: &StrategyProfile<T>,
    grid_size: usize,
) -> Result<BestResponse<T>> {
    check_index(i, game.n())?;
    if grid_size < 3 {
        return Err(GameError::GridTooSmall(grid_size));
    }
    let last = T::from_count(grid_size - 1);
    let mut best: Option<(T, T)> = None;
    let mut lowest = T::infinity();
    for k in 0..grid_size {
        let tau = if k == grid_size - 1 {
            T::one()
        } else {
            T::from_count(k) / last
        };
        let payoff = mixed_payoff(i, game, &opponents.with_tau(i, tau)?)?;
        lowest = lowest.min(payoff);
        if best.is_none_or(|(_, p)| payoff > p) {
            best = Some((tau, payoff));
        }
    }
    let (tau, payoff) = best.expect("grid is non-empty");
    Ok(BestResponse {
        tau,
        payoff,
        spread: payoff - lowest,
    })
}

/// Partial derivatives of node `i`'s closed-form equilibrium probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MsneDerivatives<T> {
    /// With respect to node `i`'s own starting age.
    pub own: T,
    /// With respect to node `j`'s starting age.
    pub cross: T,
}

/// Derivatives of the closed-form probability of node `i` with respect to
/// its own starting age and that of node `j`. The mean age moves with every
/// age, which is where the `N - 2` factor on the own-age term comes from.
pub fn monotonicity_derivatives<T: Scalar>(
    game: &GameInstance<T>,
    i: usize,
    j: usize,
) -> Result<MsneDerivatives<T>> {
    check_index(i, game.n())?;
    check_index(j, game.n())?;
    if i == j {
        return Err(GameError::SameNode(i));
    }
    let (_, den) = closed_form_terms(game, i);
    if den == T::zero() {
        return Err(GameError::SingularInstance { node: i });
    }
    let s = game.slot_lengths();
    let n = T::from_count(game.n());
    let n1 = n - T::one();
    let n2 = n - T::lit(2.0);
    let den2 = den * den;
    Ok(MsneDerivatives {
        own: n1 * n2 * (s.success() - s.collision()) / den2,
        cross: n1 * (s.collision() - s.success()) / den2,
    })
}
