use thiserror::Error;

/// Errors raised when constructing or evaluating a game instance.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("slot length `{name}` must be positive and finite, got {value}")]
    NonPositiveSlotLength { name: &'static str, value: f64 },
    #[error("idle slot ({idle}) must be shorter than a successful transmission slot ({success})")]
    IdleNotShorterThanSuccess { idle: f64, success: f64 },
    #[error("the game needs at least 2 nodes, got {n}")]
    TooFewNodes { n: usize },
    #[error("age of node {node} is {age}, below the successful slot length {sigma_success}")]
    AgeBelowSuccessSlot {
        node: usize,
        age: f64,
        sigma_success: f64,
    },
    #[error("transmit probability of node {node} is {value}, outside [0, 1]")]
    ProbabilityOutOfRange { node: usize, value: f64 },
    #[error("node index {index} out of range for {n} nodes")]
    NodeIndexOutOfRange { index: usize, n: usize },
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("closed-form equilibrium is singular for node {node} (zero denominator)")]
    SingularInstance { node: usize },
    #[error("{n} nodes is too many for exhaustive enumeration (limit {max})")]
    TooManyNodes { n: usize, max: usize },
    #[error("grid size must be at least 3, got {0}")]
    GridTooSmall(usize),
    #[error("number of slots must be at least 1")]
    NoSlots,
    #[error("cross derivative requires two distinct nodes, got {0} twice")]
    SameNode(usize),
}

pub type Result<T> = std::result::Result<T, GameError>;
