//! Minimal observed-node sets that tell Boolean network attractors apart
//! under bounded observation noise.
//!
//! An instance is a list of attractors over `n` nodes together with a noise
//! bound `K`. A node set discriminates the attractors when every pair stays at
//! distance at least `2K+1` over it, for every alignment of their cycles.
//!
//! Nodes and attractors are 0-based throughout the library; [`PairIndex`] and
//! the text formats are 1-based.

pub mod bitset;
pub mod clique;
pub mod distance;
pub mod error;
pub mod instance;
pub mod pair;
pub mod periodic;
pub mod singleton;
pub mod solution;

pub use bitset::BitSet;
pub use clique::{build_agreement_graph, clique_dist, max_clique_size, AgreementGraph};
pub use distance::{
    build_diff_matrix, build_pair_distance_matrix, dist, DiffMatrix, PairDistanceMatrix,
    PairTables, ShiftTable, DEFAULT_LCM_CAP,
};
pub use error::{Budget, Error, Result};
pub use instance::{parse_instance, Attractor, Instance};
pub use pair::{pair_count, triangular_index, PairIndex};
pub use periodic::{
    brute_force_periodic, run_greedy_periodic, solve_exact_periodic, solve_greedy_periodic,
    PeriodicGreedyRun, PeriodicStep,
};
pub use singleton::{
    brute_force_singleton, run_greedy_singleton, solve_exact_singleton, solve_greedy_singleton,
    MultiCoverProblem, SingletonGreedyRun, SingletonStep, BRUTE_FORCE_MAX_N,
};
pub use solution::{verify, Discriminator, Method, SolveOptions, Verification};

/// Run the solver selected by `method`. Brute force picks the singleton or
/// periodic variant from the instance.
pub fn solve(instance: &Instance, method: Method, opts: &SolveOptions) -> Result<Discriminator> {
    match method {
        Method::ExactPeriodic => solve_exact_periodic(instance, opts),
        Method::GreedyPeriodic => solve_greedy_periodic(instance, opts),
        Method::ExactSingleton => solve_exact_singleton(instance, opts),
        Method::GreedySingleton => solve_greedy_singleton(instance, opts),
        Method::BruteForce if instance.is_singleton() => {
            brute_force_singleton(instance, BRUTE_FORCE_MAX_N)
        }
        Method::BruteForce => {
            periodic::brute_force_periodic(instance, periodic::BRUTE_FORCE_MAX_N, opts)
        }
    }
}
