use std::time::Duration;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed attractor file. `line` is 1-based; 0 means end of input.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid pair ({first}, {second}) for size {size}")]
    InvalidPair {
        first: usize,
        second: usize,
        size: usize,
    },

    #[error("node index {index} out of range 1..={n}")]
    NodeOutOfRange { index: usize, n: usize },

    #[error("shift {offset} out of range 0..{lcm}")]
    ShiftOutOfRange { offset: usize, lcm: usize },

    #[error("empty node subset")]
    EmptySubset,

    #[error("subset has {size} nodes, at least 2 are required")]
    SubsetTooSmall { size: usize },

    #[error("LCM of periods of attractors {first} and {second} is {lcm}, above the cap {cap}")]
    LcmTooLarge {
        first: usize,
        second: usize,
        lcm: usize,
        cap: usize,
    },

    #[error("singleton method on periodic instance (attractor {attractor} has period {period})")]
    NotSingleton { attractor: usize, period: usize },

    /// Some attractor pair cannot reach distance 2K+1 even when every node is observed.
    #[error(
        "INFEASIBLE: attractors {first} and {second} have distance {distance} over all nodes, \
         {required} required"
    )]
    Infeasible {
        first: usize,
        second: usize,
        distance: usize,
        required: usize,
    },

    #[error("BUDGET_EXCEEDED: {0}")]
    BudgetExceeded(Budget),

    #[error("brute force limited to n <= {cap}, instance has n = {n}")]
    TooLarge { n: usize, cap: usize },

    #[error("instance generation failed: {0}")]
    Generation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    SubsetSize(usize),
    Time(Duration),
}

impl std::fmt::Display for Budget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Budget::SubsetSize(k) => write!(f, "no discriminator with at most {k} nodes"),
            Budget::Time(d) => write!(f, "time limit of {:.3}s reached", d.as_secs_f64()),
        }
    }
}
