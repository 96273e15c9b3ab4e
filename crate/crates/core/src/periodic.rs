//! Solvers for the general (periodic) discrimination problem.
//!
//! [`solve_exact_periodic`] scans node subsets by increasing size in
//! lexicographic order and checks each attractor pair through the
//! agreement-graph reduction, stopping at the first failing pair.
//! [`solve_greedy_periodic`] adds one node pair per iteration, always the pair
//! that separates the most still-unsatisfied attractor pairs.

use rayon::prelude::*;

use crate::bitset::BitSet;
use crate::clique::clique_dist_nodes;
use crate::distance::{check_feasible, PairDistanceMatrix, PairTables};
use crate::error::{Budget, Error, Result};
use crate::instance::Instance;
use crate::pair::{pair_count, pairs};
use crate::solution::{Discriminator, Method, SolveOptions};

const BATCH: usize = 2048;

/// Default node-count cap for [`brute_force_periodic`].
pub const BRUTE_FORCE_MAX_N: usize = 20;

/// Lexicographic k-subsets of `0..n`.
#[derive(Debug, Clone)]
pub struct Combinations {
    n: usize,
    current: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            current: (0..k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let k = self.current.len();
        match (0..k).rev().find(|&i| self.current[i] < self.n - k + i) {
            Some(i) => {
                self.current[i] += 1;
                for t in i + 1..k {
                    self.current[t] = self.current[t - 1] + 1;
                }
            }
            None => self.done = true,
        }
        Some(out)
    }
}

/// First item of `stream` satisfying `accept`, in stream order; batches are
/// checked in parallel.
fn first_in_order<I, F>(
    mut stream: I,
    deadline: &crate::solution::Deadline,
    accept: F,
) -> Result<Option<Vec<usize>>>
where
    I: Iterator<Item = Vec<usize>>,
    F: Fn(&[usize]) -> bool + Sync,
{
    loop {
        deadline.check()?;
        let batch: Vec<Vec<usize>> = stream.by_ref().take(BATCH).collect();
        if batch.is_empty() {
            return Ok(None);
        }
        if let Some(pos) = batch.par_iter().position_first(|c| accept(c)) {
            return Ok(Some(batch[pos].clone()));
        }
    }
}

pub fn solve_exact_periodic(instance: &Instance, opts: &SolveOptions) -> Result<Discriminator> {
    let deadline = opts.deadline();
    let tables = PairTables::build(instance, opts.lcm_cap)?;
    let required = instance.required_distance();
    check_feasible(&tables, required)?;
    let d = PairDistanceMatrix::from_tables(&tables);
    let n = instance.n();
    let rows = tables.len();

    let accept = |subset: &[usize]| {
        if subset.len() == 1 {
            let s = BitSet::from_indices(n, subset.iter().copied());
            return (0..rows).all(|r| tables.get(r).dist(&s) >= required);
        }
        (0..rows).all(|r| clique_dist_nodes(&d, r, subset) >= required)
    };

    let cap = opts.max_size.unwrap_or(n).min(n);
    for k in required.max(1)..=cap {
        if let Some(found) = first_in_order(Combinations::new(n, k), &deadline, accept)? {
            let set = BitSet::from_indices(n, found);
            return Ok(Discriminator::new(
                Method::ExactPeriodic,
                &tables,
                &set,
                required,
            ));
        }
    }
    if cap < n {
        return Err(Error::BudgetExceeded(Budget::SubsetSize(cap)));
    }
    unreachable!("all nodes reach the required distance after the feasibility check")
}

/// Exhaustive minimum using only definition-based distances: subsets in
/// size-then-lexicographic order, `n <= max_n`.
pub fn brute_force_periodic(
    instance: &Instance,
    max_n: usize,
    opts: &SolveOptions,
) -> Result<Discriminator> {
    let n = instance.n();
    if n > max_n {
        return Err(Error::TooLarge { n, cap: max_n });
    }
    let deadline = opts.deadline();
    let tables = PairTables::build(instance, opts.lcm_cap)?;
    let required = instance.required_distance();
    check_feasible(&tables, required)?;
    for k in 1..=n {
        let found = first_in_order(Combinations::new(n, k), &deadline, |c| {
            let s = BitSet::from_indices(n, c.iter().copied());
            (0..tables.len()).all(|r| tables.get(r).dist(&s) >= required)
        })?;
        if let Some(found) = found {
            let set = BitSet::from_indices(n, found);
            return Ok(Discriminator::new(
                Method::BruteForce,
                &tables,
                &set,
                required,
            ));
        }
    }
    unreachable!("all nodes reach the required distance after the feasibility check")
}

/// One iteration of the pair-adding greedy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicStep {
    /// 0-based nodes of the chosen pair.
    pub pair: (usize, usize),
    /// Number of unsatisfied attractor pairs the chosen node pair separates.
    pub coverage: usize,
    /// 0-based rows of attractor pairs still unsatisfied after the step.
    pub uncovered: Vec<usize>,
    /// 0-based node-pair columns still available after the step.
    pub candidates: Vec<usize>,
    /// Chosen nodes after the step, in insertion order.
    pub chosen: Vec<usize>,
    /// Lower bounds `r` after the step.
    pub lower_bounds: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct PeriodicGreedyRun {
    pub discriminator: Discriminator,
    pub steps: Vec<PeriodicStep>,
    /// Whether the candidate pairs ran out before every pair was satisfied,
    /// in which case all nodes are returned.
    pub fell_back_to_all: bool,
}

/// Greedy bookkeeping: unsatisfied pairs, available node pairs, chosen nodes
/// and the running lower bounds.
#[derive(Debug, Clone)]
pub struct GreedyState {
    pub uncovered: Vec<usize>,
    pub candidates: Vec<usize>,
    pub chosen: Vec<usize>,
    pub lower_bounds: Vec<usize>,
}

pub fn solve_greedy_periodic(instance: &Instance, opts: &SolveOptions) -> Result<Discriminator> {
    Ok(run_greedy_periodic(instance, opts, false)?.discriminator)
}

/// Greedy with a full per-step trace. `record_candidates` keeps the list of
/// available node pairs per step, which is `O(n^2)` per step.
pub fn run_greedy_periodic(
    instance: &Instance,
    opts: &SolveOptions,
    record_candidates: bool,
) -> Result<PeriodicGreedyRun> {
    let tables = PairTables::build(instance, opts.lcm_cap)?;
    let required = instance.required_distance();
    check_feasible(&tables, required)?;
    let d = PairDistanceMatrix::from_tables(&tables);
    let n = instance.n();
    let node_pairs: Vec<(usize, usize)> = pairs(n).collect();

    let mut state = GreedyState {
        uncovered: (0..tables.len()).collect(),
        candidates: (0..pair_count(n)).collect(),
        chosen: Vec::new(),
        lower_bounds: vec![0; tables.len()],
    };
    let mut steps = Vec::new();

    while !state.uncovered.is_empty() && !state.candidates.is_empty() {
        let mut best = (0usize, state.candidates[0]);
        for &col in &state.candidates {
            let cov = state
                .uncovered
                .iter()
                .filter(|&&r| d.at(r, col) != 0)
                .count();
            if cov > best.0 {
                best = (cov, col);
            }
        }
        let (coverage, col) = best;
        let (j1, j2) = node_pairs[col];
        state.chosen.extend([j1, j2]);
        state.candidates.retain(|&c| {
            let (a, b) = node_pairs[c];
            a != j1 && a != j2 && b != j1 && b != j2
        });
        for r in 0..tables.len() {
            if state.lower_bounds[r] < required && d.at(r, col) != 0 {
                state.lower_bounds[r] += d.at(r, col) as usize;
            }
        }
        state
            .uncovered
            .retain(|&r| state.lower_bounds[r] < required);
        steps.push(PeriodicStep {
            pair: (j1, j2),
            coverage,
            uncovered: state.uncovered.clone(),
            candidates: if record_candidates {
                state.candidates.clone()
            } else {
                Vec::new()
            },
            chosen: state.chosen.clone(),
            lower_bounds: state.lower_bounds.clone(),
        });
    }

    let fell_back_to_all = !state.uncovered.is_empty();
    let set = if fell_back_to_all {
        BitSet::full(n)
    } else {
        BitSet::from_indices(n, state.chosen.iter().copied())
    };
    Ok(PeriodicGreedyRun {
        discriminator: Discriminator::new(Method::GreedyPeriodic, &tables, &set, required),
        steps,
        fell_back_to_all,
    })
}

/// Iterations `j` (1-based) and 0-based pair rows at which
/// `dist(V_{j-1}) + dist(V* \ V_{j-1}) >= 2K+1` fails, where `V_{j-1}` is the
/// greedy set before iteration `j` and `V*` an optimum. The approximation
/// guarantee of the pair greedy assumes this never fails.
pub fn ratio_hypothesis_violations(
    instance: &Instance,
    run: &PeriodicGreedyRun,
    optimum: &[usize],
    opts: &SolveOptions,
) -> Result<Vec<(usize, usize)>> {
    let tables = PairTables::build(instance, opts.lcm_cap)?;
    let n = instance.n();
    let required = instance.required_distance();
    let opt = BitSet::from_indices(n, optimum.iter().copied());
    let mut violations = Vec::new();
    let mut before = BitSet::new(n);
    for (j, step) in run.steps.iter().enumerate() {
        let rest = opt.difference(&before);
        for r in 0..tables.len() {
            let t = tables.get(r);
            if t.dist(&before) + t.dist(&rest) < required {
                violations.push((j + 1, r));
            }
        }
        before.insert(step.pair.0);
        before.insert(step.pair.1);
    }
    Ok(violations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::parse_instance;

    fn example1(k: usize) -> Instance {
        parse_instance("3 5\n2\n00001\n11100\n1\n10100\n1\n11001\n")
            .unwrap()
            .with_noise_bound(k)
    }

    #[test]
    fn combinations_in_lex_order() {
        let all: Vec<Vec<usize>> = Combinations::new(4, 2).collect();
        assert_eq!(
            all,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(Combinations::new(5, 0).count(), 1);
        assert_eq!(Combinations::new(2, 3).count(), 0);
        assert_eq!(Combinations::new(10, 4).count(), 210);
    }

    #[test]
    fn exact_worked_example() {
        let sol = solve_exact_periodic(&example1(1), &SolveOptions::default()).unwrap();
        // {v2, v3, v5} already separates every pair on three nodes.
        assert_eq!(sol.nodes, vec![1, 2, 4]);
        assert_eq!(sol.per_pair_distance, vec![3, 3, 3]);
        assert!(sol.feasible);
        let bf = brute_force_periodic(&example1(1), 20, &SolveOptions::default()).unwrap();
        assert_eq!(sol.nodes, bf.nodes);
    }

    #[test]
    fn exact_infeasible_for_large_noise() {
        let err = solve_exact_periodic(&example1(2), &SolveOptions::default()).unwrap_err();
        assert!(matches!(
            err,
            Error::Infeasible {
                first: 1,
                second: 2,
                distance: 4,
                required: 5
            }
        ));
        assert!(solve_greedy_periodic(&example1(2), &SolveOptions::default()).is_err());
    }

    #[test]
    fn exact_clean_case_single_node() {
        let mut a = vec![0u8; 8];
        let b = a.clone();
        a[6] = 1;
        let inst = Instance::from_singleton_matrix(&[a, b], 0).unwrap();
        let sol = solve_exact_periodic(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(sol.nodes, vec![6]);
    }

    #[test]
    fn exact_respects_size_budget() {
        let err = solve_exact_periodic(&example1(1), &SolveOptions::default().with_max_size(2))
            .unwrap_err();
        assert_eq!(err, Error::BudgetExceeded(Budget::SubsetSize(2)));
    }

    #[test]
    fn greedy_single_pair_suffices() {
        let inst =
            Instance::from_singleton_matrix(&[vec![0, 0, 0], vec![1, 1, 0], vec![0, 1, 1]], 0)
                .unwrap();
        let run = run_greedy_periodic(&inst, &SolveOptions::default(), true).unwrap();
        assert_eq!(run.steps.len(), 1);
        assert_eq!(run.discriminator.cardinality(), 2);
        assert!(run.discriminator.feasible);
    }

    #[test]
    fn greedy_worked_example_is_feasible() {
        let sol = solve_greedy_periodic(&example1(1), &SolveOptions::default()).unwrap();
        assert!(sol.feasible);
        assert!(sol.cardinality() == 4 || sol.cardinality() == 5);
    }
}
