//! One-shot multiple access game for timely status updates over CSMA/CA.
//!
//! Nodes share a medium in which every node hears every other. In a slot
//! each node either transmits its freshest update or stays idle, and wants
//! to minimize the age of its update at the other nodes when the slot ends.
//! This crate provides:
//!
//! * [`game`]: slot probabilities, the one-slot age distribution, and the
//!   expected-age payoffs for mixed and pure profiles;
//! * [`equilibrium`]: weak dominance, pure Nash enumeration, the closed-form
//!   mixed equilibrium with its feasibility region and indifference check,
//!   a grid best-response oracle, and the equilibrium's age sensitivities;
//! * [`simulator`]: seeded Monte Carlo slots, one-slot restart statistics and
//!   multi-slot age sample paths;
//! * [`scenario`] and [`cli`]: TOML scenarios and the `aoi-game` commands.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`.
//!
//! ```
//! use csma_aoi_game::{msne_closed_form, Game, Slots};
//!
//! let s = 1.01;
//! let slots = Slots::new(0.01, s, 2.0 * s).unwrap();
//! let game = Game::new(slots, vec![2.0 * s, 3.0 * s, 3.0 * s]).unwrap();
//! let msne = msne_closed_form(&game).unwrap();
//! assert!(msne.feasible);
//! assert!((msne.raw_taus[0] - 0.6008).abs() < 5e-5);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod cli;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod scalar;
pub mod scenario;
pub mod simulator;

pub use equilibrium::{
    best_response_oracle, check_weak_dominance, enumerate_pure_nash, feasibility_condition,
    is_pure_nash, monotonicity_derivatives, msne_closed_form, verify_indifference, BestResponse,
    DominanceReport, MsneDerivatives, MsneResult, PureNashSet,
};
pub use error::{GameError, Result};
pub use game::{
    age_pmf, busy_seen_probability, busy_seen_probability_with, collision_probability,
    expected_age_after, idle_probability, mixed_payoff, pure_payoff, success_probability_of,
    total_success_probability, Action, ActionProfile, AgePmf, AgeVector, BusySeenReading,
    CollisionRegime, GameInstance, SlotLengths, StrategyProfile,
};
pub use scalar::Scalar;
pub use simulator::{
    run_monte_carlo, sample_slot, seeded_rng, simulate_age_trajectory, AgeTrajectory, SimStats,
    SlotKind, SlotOutcome, TrajectoryRun,
};

pub type Slots = SlotLengths<f64>;
pub type Ages = AgeVector<f64>;
pub type Profile = StrategyProfile<f64>;
pub type Game = GameInstance<f64>;
pub type Pmf = AgePmf<f64>;
pub type Msne = MsneResult<f64>;
pub type Stats = SimStats<f64>;
pub type Trajectory = AgeTrajectory<f64>;

pub type Slots32 = SlotLengths<f32>;
pub type Profile32 = StrategyProfile<f32>;
pub type Game32 = GameInstance<f32>;
