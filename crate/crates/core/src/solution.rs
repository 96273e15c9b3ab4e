use std::fmt;
use std::time::{Duration, Instant};

use crate::bitset::BitSet;
use crate::distance::{PairTables, DEFAULT_LCM_CAP};
use crate::error::{Budget, Error, Result};
use crate::instance::Instance;
use crate::pair::PairIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ExactPeriodic,
    GreedyPeriodic,
    ExactSingleton,
    GreedySingleton,
    BruteForce,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::ExactPeriodic,
        Method::GreedyPeriodic,
        Method::ExactSingleton,
        Method::GreedySingleton,
        Method::BruteForce,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::ExactPeriodic => "exact-periodic",
            Method::GreedyPeriodic => "greedy-periodic",
            Method::ExactSingleton => "exact-singleton",
            Method::GreedySingleton => "greedy-singleton",
            Method::BruteForce => "brute-force",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown method `{s}`"))
    }
}

/// Limits shared by the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// Largest subset size the exhaustive periodic search may try.
    pub max_size: Option<usize>,
    pub time_limit: Option<Duration>,
    pub lcm_cap: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_size: None,
            time_limit: None,
            lcm_cap: DEFAULT_LCM_CAP,
        }
    }
}

impl SolveOptions {
    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    pub fn with_max_size(mut self, k: usize) -> Self {
        self.max_size = Some(k);
        self
    }

    pub(crate) fn deadline(&self) -> Deadline {
        Deadline {
            start: Instant::now(),
            limit: self.time_limit,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Deadline {
    start: Instant,
    limit: Option<Duration>,
}

impl Deadline {
    pub(crate) fn expired(&self) -> bool {
        self.limit.is_some_and(|l| self.start.elapsed() >= l)
    }

    pub(crate) fn check(&self) -> Result<()> {
        match self.limit {
            Some(l) if self.start.elapsed() >= l => Err(Error::BudgetExceeded(Budget::Time(l))),
            _ => Ok(()),
        }
    }
}

/// Distances of every attractor pair over a node set, recomputed from the
/// definition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    /// 0-based, ascending.
    pub nodes: Vec<usize>,
    /// Indexed by 0-based flat pair row.
    pub per_pair_distance: Vec<usize>,
    pub required: usize,
    pub feasible: bool,
    pub m: usize,
}

impl Verification {
    pub fn from_tables(tables: &PairTables, nodes: &BitSet, required: usize) -> Self {
        let per_pair_distance = tables.distances(nodes);
        let feasible = per_pair_distance.iter().all(|&d| d >= required);
        Verification {
            nodes: nodes.iter().collect(),
            per_pair_distance,
            required,
            feasible,
            m: tables.m(),
        }
    }

    pub fn min_distance(&self) -> usize {
        self.per_pair_distance.iter().copied().min().unwrap_or(0)
    }

    /// `(pair, distance)` in flat order.
    pub fn per_pair(&self) -> impl Iterator<Item = (PairIndex, usize)> + '_ {
        self.per_pair_distance
            .iter()
            .enumerate()
            .map(|(r, &d)| (PairIndex::from_flat(r + 1, self.m).unwrap(), d))
    }
}

/// Check a proposed node set (0-based) against the instance's noise bound.
pub fn verify(instance: &Instance, nodes: &[usize], lcm_cap: usize) -> Result<Verification> {
    let n = instance.n();
    if let Some(&j) = nodes.iter().find(|&&j| j >= n) {
        return Err(Error::NodeOutOfRange { index: j + 1, n });
    }
    let tables = PairTables::build(instance, lcm_cap)?;
    let set = BitSet::from_indices(n, nodes.iter().copied());
    Ok(Verification::from_tables(
        &tables,
        &set,
        instance.required_distance(),
    ))
}

/// A solver result with distances recomputed from the definition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discriminator {
    pub method: Method,
    /// 0-based, ascending.
    pub nodes: Vec<usize>,
    pub per_pair_distance: Vec<usize>,
    pub feasible: bool,
    pub required: usize,
    pub m: usize,
}

impl Discriminator {
    pub(crate) fn new(
        method: Method,
        tables: &PairTables,
        nodes: &BitSet,
        required: usize,
    ) -> Self {
        let v = Verification::from_tables(tables, nodes, required);
        Discriminator {
            method,
            nodes: v.nodes,
            per_pair_distance: v.per_pair_distance,
            feasible: v.feasible,
            required,
            m: v.m,
        }
    }

    pub fn cardinality(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes_one_based(&self) -> Vec<usize> {
        self.nodes.iter().map(|j| j + 1).collect()
    }

    pub fn per_pair(&self) -> impl Iterator<Item = (PairIndex, usize)> + '_ {
        self.per_pair_distance
            .iter()
            .enumerate()
            .map(|(r, &d)| (PairIndex::from_flat(r + 1, self.m).unwrap(), d))
    }
}
