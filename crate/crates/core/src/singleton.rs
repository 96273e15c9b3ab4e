//! Solvers for singleton attractors, where the distance of a pair over a
//! column set is the Hamming distance of the two rows restricted to it.
//!
//! Each attractor pair is an element that must be covered `2K+1` times, each
//! column covers the pairs it separates: a set multi-cover problem.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;

use crate::bitset::BitSet;
use crate::distance::{build_diff_matrix, DiffMatrix, PairTables};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::pair::PairIndex;
use crate::periodic::Combinations;
use crate::solution::{Deadline, Discriminator, Method, SolveOptions};

/// Default node-count cap for [`brute_force_singleton`].
pub const BRUTE_FORCE_MAX_N: usize = 20;

/// Columns of the difference matrix as covering sets over attractor pairs,
/// each pair demanding `demand` distinct covering columns.
#[derive(Debug, Clone)]
pub struct MultiCoverProblem {
    /// `columns[j]`: 0-based pair rows separated by node `j`.
    columns: Vec<BitSet>,
    rows: usize,
    demand: usize,
}

impl MultiCoverProblem {
    pub fn new(diff: &DiffMatrix, demand: usize) -> Self {
        let rows = diff.row_len();
        let mut columns = vec![BitSet::new(rows); diff.n()];
        for (r, row) in diff.rows().iter().enumerate() {
            for j in row.iter() {
                columns[j].insert(r);
            }
        }
        MultiCoverProblem {
            columns,
            rows,
            demand,
        }
    }

    pub fn from_instance(instance: &Instance) -> Result<Self> {
        let diff = build_diff_matrix(instance)?;
        Ok(MultiCoverProblem::new(&diff, instance.required_distance()))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn columns(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &BitSet {
        &self.columns[j]
    }

    pub fn demand(&self) -> usize {
        self.demand
    }

    /// Number of selected columns covering each row.
    pub fn coverage(&self, selected: &[usize]) -> Vec<usize> {
        let mut cov = vec![0; self.rows];
        for &j in selected {
            for r in self.columns[j].iter() {
                cov[r] += 1;
            }
        }
        cov
    }

    pub fn is_satisfied(&self, selected: &[usize]) -> bool {
        self.coverage(selected).iter().all(|&c| c >= self.demand)
    }

    /// First row whose total coverage is below the demand.
    pub fn first_deficient_row(&self) -> Option<(usize, usize)> {
        let all: Vec<usize> = (0..self.columns()).collect();
        self.coverage(&all)
            .into_iter()
            .enumerate()
            .find(|&(_, c)| c < self.demand)
    }
}

fn singleton_setup(
    instance: &Instance,
    opts: &SolveOptions,
) -> Result<(MultiCoverProblem, PairTables)> {
    instance.require_singleton()?;
    let problem = MultiCoverProblem::from_instance(instance)?;
    if let Some((row, have)) = problem.first_deficient_row() {
        let poa = PairIndex::from_flat(row + 1, instance.m())?;
        return Err(Error::Infeasible {
            first: poa.first,
            second: poa.second,
            distance: have,
            required: problem.demand(),
        });
    }
    let tables = PairTables::build(instance, opts.lcm_cap)?;
    Ok((problem, tables))
}

/// One iteration of the column greedy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingletonStep {
    /// 0-based column added.
    pub column: usize,
    /// Number of unsatisfied pairs the column separates.
    pub coverage: usize,
    /// 0-based rows still unsatisfied after the step.
    pub uncovered: Vec<usize>,
    /// Chosen columns after the step, in insertion order.
    pub chosen: Vec<usize>,
    /// Per-pair coverage counts `r` after the step.
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct SingletonGreedyRun {
    pub discriminator: Discriminator,
    pub steps: Vec<SingletonStep>,
}

impl SingletonGreedyRun {
    /// Remaining candidate columns after step `i` (0-based), ascending.
    pub fn candidates_after(&self, i: usize, n: usize) -> Vec<usize> {
        let chosen = &self.steps[i].chosen;
        (0..n).filter(|j| !chosen.contains(j)).collect()
    }
}

/// Greedy on a multi-cover problem; returns the chosen columns in order
/// with the trace. The problem must be satisfiable.
pub fn greedy_multicover(problem: &MultiCoverProblem) -> Vec<SingletonStep> {
    let demand = problem.demand();
    let mut uncovered = BitSet::full(problem.rows());
    let mut counts = vec![0usize; problem.rows()];
    let mut available = BitSet::full(problem.columns());
    let mut chosen = Vec::new();
    let mut steps = Vec::new();
    while !uncovered.is_empty() {
        let mut best: Option<(usize, usize)> = None;
        for j in available.iter() {
            let cov = problem.column(j).intersection_len(&uncovered);
            if best.is_none_or(|(c, _)| cov > c) {
                best = Some((cov, j));
            }
        }
        let Some((coverage, col)) = best.filter(|&(c, _)| c > 0) else {
            panic!("greedy multi-cover on an unsatisfiable problem");
        };
        available.remove(col);
        chosen.push(col);
        for r in problem.column(col).iter() {
            if counts[r] < demand {
                counts[r] += 1;
                if counts[r] == demand {
                    uncovered.remove(r);
                }
            }
        }
        steps.push(SingletonStep {
            column: col,
            coverage,
            uncovered: uncovered.iter().collect(),
            chosen: chosen.clone(),
            counts: counts.clone(),
        });
    }
    steps
}

pub fn run_greedy_singleton(
    instance: &Instance,
    opts: &SolveOptions,
) -> Result<SingletonGreedyRun> {
    let (problem, tables) = singleton_setup(instance, opts)?;
    let steps = greedy_multicover(&problem);
    let chosen = steps.last().map(|s| s.chosen.clone()).unwrap_or_default();
    let set = BitSet::from_indices(instance.n(), chosen);
    Ok(SingletonGreedyRun {
        discriminator: Discriminator::new(Method::GreedySingleton, &tables, &set, problem.demand()),
        steps,
    })
}

pub fn solve_greedy_singleton(instance: &Instance, opts: &SolveOptions) -> Result<Discriminator> {
    Ok(run_greedy_singleton(instance, opts)?.discriminator)
}

/// Iterations (1-based) at which the per-iteration price bound
/// `1/|s_t(j) ∩ U_j| <= |J*| / (M(2K+1) - Σ_{k<j} |s_t(k) ∩ U_k|)` fails.
pub fn price_bound_violations(
    steps: &[SingletonStep],
    optimum_size: usize,
    pair_count: usize,
    demand: usize,
) -> Vec<usize> {
    let total = pair_count * demand;
    let mut consumed = 0usize;
    let mut violations = Vec::new();
    for (j, step) in steps.iter().enumerate() {
        // Cross-multiplied: remaining <= |J*| * coverage.
        let remaining = total - consumed;
        if remaining > optimum_size * step.coverage {
            violations.push(j + 1);
        }
        consumed += step.coverage;
    }
    violations
}

/// Columns with identical covering sets, in ascending order of first index.
#[derive(Debug, Clone)]
struct ColumnClass {
    rows: BitSet,
    members: Vec<usize>,
}

fn column_classes(problem: &MultiCoverProblem) -> Vec<ColumnClass> {
    let mut by_rows: HashMap<&BitSet, usize> = HashMap::new();
    let mut classes: Vec<ColumnClass> = Vec::new();
    for j in 0..problem.columns() {
        let rows = problem.column(j);
        if rows.is_empty() {
            continue;
        }
        match by_rows.get(rows) {
            Some(&c) => classes[c].members.push(j),
            None => {
                by_rows.insert(rows, classes.len());
                classes.push(ColumnClass {
                    rows: rows.clone(),
                    members: vec![j],
                });
            }
        }
    }
    classes
}

struct Search<'a> {
    rows: Vec<Vec<usize>>,
    caps: &'a [usize],
    best: &'a AtomicUsize,
    aborted: &'a AtomicBool,
    deadline: Deadline,
    nodes: usize,
}

impl Search<'_> {
    /// Smallest total count `< best` satisfying `residual`, using classes
    /// not yet in `decided`. Records improvements in `best` and `incumbent`.
    fn dfs(
        &mut self,
        residual: &mut [usize],
        decided: &mut [bool],
        counts: &mut [usize],
        used: usize,
        incumbent: &mut Option<Vec<usize>>,
    ) {
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) && self.deadline.expired() {
            self.aborted.store(true, Ordering::Relaxed);
        }
        if self.aborted.load(Ordering::Relaxed) {
            return;
        }
        let best = self.best.load(Ordering::Relaxed);
        let max_residual = residual.iter().copied().max().unwrap_or(0);
        if max_residual == 0 {
            if used < best {
                self.best.fetch_min(used, Ordering::Relaxed);
                *incumbent = Some(counts.to_vec());
            }
            return;
        }
        // Each column covers a row at most once.
        if used + max_residual >= best {
            return;
        }
        let total: usize = residual.iter().sum();
        let mut branch: Option<(usize, usize)> = None;
        let mut supply = vec![0usize; residual.len()];
        for (c, &done) in decided.iter().enumerate() {
            if done || self.caps[c] == 0 {
                continue;
            }
            let cov = self.rows[c].iter().filter(|&&r| residual[r] > 0).count();
            for &r in &self.rows[c] {
                supply[r] += self.caps[c];
            }
            if cov > 0 && branch.is_none_or(|(bc, _)| cov > bc) {
                branch = Some((cov, c));
            }
        }
        let Some((max_cov, class)) = branch else {
            return;
        };
        if residual
            .iter()
            .zip(&supply)
            .any(|(&need, &have)| need > have)
        {
            return;
        }
        if used + total.div_ceil(max_cov) >= best {
            return;
        }
        match lp_bound(&self.rows, self.caps, decided, residual) {
            Some(lb) if used + lb < best => {}
            _ => return,
        }
        let useful = self.rows[class]
            .iter()
            .map(|&r| residual[r])
            .max()
            .unwrap_or(0)
            .min(self.caps[class]);
        decided[class] = true;
        let saved: Vec<usize> = self.rows[class].iter().map(|&r| residual[r]).collect();
        for take in (0..=useful).rev() {
            for &r in &self.rows[class] {
                residual[r] = residual[r].saturating_sub(take);
            }
            counts[class] = take;
            self.dfs(residual, decided, counts, used + take, incumbent);
            for (&r, &b) in self.rows[class].iter().zip(&saved) {
                residual[r] = b;
            }
            counts[class] = 0;
            if self.aborted.load(Ordering::Relaxed) {
                break;
            }
        }
        decided[class] = false;
    }
}

/// Ceiling of the LP relaxation over the undecided classes, `None` when even
/// the relaxation cannot meet `residual`.
fn lp_bound(
    rows: &[Vec<usize>],
    caps: &[usize],
    decided: &[bool],
    residual: &[usize],
) -> Option<usize> {
    use minilp::{ComparisonOp, OptimizationDirection, Problem};

    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let mut terms: Vec<Vec<(minilp::Variable, f64)>> = vec![Vec::new(); residual.len()];
    for (c, class_rows) in rows.iter().enumerate() {
        if decided[c] || caps[c] == 0 {
            continue;
        }
        let useful = class_rows.iter().map(|&r| residual[r]).max().unwrap_or(0);
        if useful == 0 {
            continue;
        }
        let x = lp.add_var(1.0, (0.0, useful.min(caps[c]) as f64));
        for &r in class_rows {
            terms[r].push((x, 1.0));
        }
    }
    for (r, t) in terms.iter().enumerate() {
        if residual[r] > 0 {
            if t.is_empty() {
                return None;
            }
            lp.add_constraint(t.as_slice(), ComparisonOp::Ge, residual[r] as f64);
        }
    }
    let value = lp.solve().ok()?.objective();
    Some((value - 1e-6).ceil().max(0.0) as usize)
}

/// Branch-and-bound minimum of the class-count program: choose `x_c <= caps[c]`
/// minimizing `Σ x_c` with every row `r` covered `demand[r]` times. Returns
/// `Ok(None)` when no solution with at most `limit` columns exists.
fn min_class_cover(
    classes: &[ColumnClass],
    caps: &[usize],
    residual: &[usize],
    limit: usize,
    deadline: Deadline,
    parallel: bool,
) -> Result<Option<(usize, Vec<usize>)>> {
    let rows: Vec<Vec<usize>> = classes.iter().map(|c| c.rows.iter().collect()).collect();
    let best = AtomicUsize::new(limit + 1);
    let aborted = AtomicBool::new(false);
    let k = classes.len();
    let result: Mutex<Option<(usize, Vec<usize>)>> = Mutex::new(None);

    let run_from = |residual: &mut Vec<usize>,
                    decided: &mut Vec<bool>,
                    counts: &mut Vec<usize>,
                    used: usize| {
        let mut search = Search {
            rows: rows.clone(),
            caps,
            best: &best,
            aborted: &aborted,
            deadline,
            nodes: 0,
        };
        let mut incumbent = None;
        search.dfs(residual, decided, counts, used, &mut incumbent);
        if let Some(counts) = incumbent {
            let total: usize = counts.iter().sum();
            let mut guard = result.lock().unwrap();
            if guard.as_ref().is_none_or(|(t, _)| total < *t) {
                *guard = Some((total, counts));
            }
        }
    };

    // Split on the most covering class at the root when running in parallel.
    let root = (0..k).filter(|&c| caps[c] > 0).max_by_key(|&c| {
        (
            rows[c].iter().filter(|&&r| residual[r] > 0).count(),
            std::cmp::Reverse(c),
        )
    });
    match root {
        Some(c) if parallel && residual.iter().any(|&r| r > 0) => {
            let useful = rows[c]
                .iter()
                .map(|&r| residual[r])
                .max()
                .unwrap_or(0)
                .min(caps[c]);
            (0..=useful)
                .rev()
                .collect::<Vec<_>>()
                .into_par_iter()
                .for_each(|take| {
                    let mut res = residual.to_vec();
                    for &r in &rows[c] {
                        res[r] = res[r].saturating_sub(take);
                    }
                    let mut decided = vec![false; k];
                    decided[c] = true;
                    let mut counts = vec![0; k];
                    counts[c] = take;
                    run_from(&mut res, &mut decided, &mut counts, take);
                });
        }
        _ => {
            let mut res = residual.to_vec();
            run_from(&mut res, &mut vec![false; k], &mut vec![0; k], 0);
        }
    }
    if aborted.load(Ordering::Relaxed) {
        deadline.check()?;
    }
    Ok(result.into_inner().unwrap())
}

/// Minimum-cardinality column set; among optima the lexicographically
/// smallest sorted index sequence is returned.
pub fn solve_exact_singleton(instance: &Instance, opts: &SolveOptions) -> Result<Discriminator> {
    let deadline = opts.deadline();
    let (problem, tables) = singleton_setup(instance, opts)?;
    let columns = exact_multicover(&problem, deadline)?;
    let set = BitSet::from_indices(instance.n(), columns);
    Ok(Discriminator::new(
        Method::ExactSingleton,
        &tables,
        &set,
        problem.demand(),
    ))
}

fn exact_multicover(problem: &MultiCoverProblem, deadline: Deadline) -> Result<Vec<usize>> {
    let classes = column_classes(problem);
    let caps: Vec<usize> = classes.iter().map(|c| c.members.len()).collect();
    let demand = vec![problem.demand(); problem.rows()];

    let greedy = greedy_multicover(problem);
    let upper = greedy.last().map_or(0, |s| s.chosen.len());
    let optimum = match min_class_cover(
        &classes,
        &caps,
        &demand,
        upper.saturating_sub(1),
        deadline,
        true,
    )? {
        Some((size, _)) => size,
        None => upper,
    };

    // Fix columns one at a time, smallest index first, keeping a completion
    // of the optimal size available.
    let mut residual = demand;
    let mut chosen: Vec<usize> = Vec::with_capacity(optimum);
    let mut next_free = vec![0usize; classes.len()];
    for slot in 0..optimum {
        let remaining = optimum - slot - 1;
        let mut candidates: Vec<(usize, usize)> = classes
            .iter()
            .enumerate()
            .filter_map(|(c, cls)| cls.members.get(next_free[c]).map(|&j| (j, c)))
            .collect();
        candidates.sort_unstable();
        let mut placed = false;
        for (j, c) in candidates {
            let mut trial = residual.clone();
            for r in classes[c].rows.iter() {
                trial[r] = trial[r].saturating_sub(1);
            }
            // Columns after `j` only.
            let caps_after: Vec<usize> = classes
                .iter()
                .map(|cls| cls.members.len() - cls.members.partition_point(|&x| x <= j))
                .collect();
            if min_class_cover(&classes, &caps_after, &trial, remaining, deadline, false)?.is_some()
            {
                residual = trial;
                chosen.push(j);
                for (c2, cls) in classes.iter().enumerate() {
                    next_free[c2] = cls.members.partition_point(|&x| x <= j);
                }
                placed = true;
                break;
            }
        }
        assert!(placed, "an optimal completion always exists");
    }
    Ok(chosen)
}

/// Exhaustive minimum over all column subsets, by size then lexicographic.
pub fn brute_force_singleton(instance: &Instance, max_n: usize) -> Result<Discriminator> {
    let n = instance.n();
    if n > max_n {
        return Err(Error::TooLarge { n, cap: max_n });
    }
    let (problem, tables) = singleton_setup(instance, &SolveOptions::default())?;
    assert!(n <= 64, "brute force uses 64-bit masks");
    let row_masks: Vec<u64> = (0..problem.rows())
        .map(|r| {
            (0..n)
                .filter(|&j| problem.column(j).contains(r))
                .fold(0u64, |m, j| m | 1 << j)
        })
        .collect();
    let demand = problem.demand() as u32;
    for k in 0..=n {
        for combo in Combinations::new(n, k) {
            let mask = combo.iter().fold(0u64, |m, &j| m | 1 << j);
            if row_masks
                .iter()
                .all(|&rm| (rm & mask).count_ones() >= demand)
            {
                let set = BitSet::from_indices(n, combo);
                return Ok(Discriminator::new(
                    Method::BruteForce,
                    &tables,
                    &set,
                    problem.demand(),
                ));
            }
        }
    }
    unreachable!("all columns satisfy every row after the feasibility check")
}
