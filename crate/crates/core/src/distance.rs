//! Distances between periodic attractors observed through a node subset.
//!
//! For attractors `a`, `b` with periods `p(a)`, `p(b)` and `L = lcm(p(a), p(b))`,
//! node `j` *differs at shift t* when the infinite series of `a` at `j`
//! starting at 0 differs from that of `b` starting at `t`. Both series are
//! periodic with joint period `L`, so comparing one window of `L` positions
//! decides it. The distance over a subset `S` is the minimum over shifts of
//! the number of nodes in `S` that differ.

use rayon::prelude::*;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::instance::{Attractor, Instance};
use crate::pair::{flat0, pair_count, pairs, PairIndex};

/// Default upper bound on `lcm(p(a), p(b))` for any attractor pair.
pub const DEFAULT_LCM_CAP: usize = 4096;

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Whether node `node` (0-based) of `a` from time 0 and of `b` from time
/// `offset` produce different infinite series.
pub fn node_sequence_differs(
    a: &Attractor,
    b: &Attractor,
    node: usize,
    offset: usize,
) -> Result<bool> {
    let window = lcm(a.period(), b.period());
    if offset >= window {
        return Err(Error::ShiftOutOfRange {
            offset,
            lcm: window,
        });
    }
    if node >= a.n() || node >= b.n() {
        return Err(Error::NodeOutOfRange {
            index: node + 1,
            n: a.n(),
        });
    }
    Ok(series_differ(a, b, node, offset, window))
}

#[inline]
fn series_differ(a: &Attractor, b: &Attractor, node: usize, offset: usize, window: usize) -> bool {
    (0..window).any(|s| a.value(s, node) != b.value(s + offset, node))
}

/// Per-pair shift table.
///
/// Shifts that are congruent modulo `p(b)` give the same series for `b`, so
/// only `p(b)` shifts are stored.
#[derive(Debug, Clone)]
pub struct ShiftTable {
    /// `differs[t]`: nodes that differ at shift `t`.
    differs: Vec<BitSet>,
    /// `agrees[j]`: shifts at which node `j` agrees.
    agrees: Vec<BitSet>,
    window: usize,
}

impl ShiftTable {
    pub fn new(a: &Attractor, b: &Attractor) -> Self {
        let n = a.n();
        let window = lcm(a.period(), b.period());
        let shifts = b.period();
        let mut differs = vec![BitSet::new(n); shifts];
        let mut agrees = vec![BitSet::new(shifts); n];
        for (t, row) in differs.iter_mut().enumerate() {
            for (j, agree) in agrees.iter_mut().enumerate() {
                if series_differ(a, b, j, t, window) {
                    row.insert(j);
                } else {
                    agree.insert(t);
                }
            }
        }
        ShiftTable {
            differs,
            agrees,
            window,
        }
    }

    /// LCM of the two periods.
    pub fn window(&self) -> usize {
        self.window
    }

    pub fn shifts(&self) -> usize {
        self.differs.len()
    }

    pub fn differs_at(&self, t: usize) -> &BitSet {
        &self.differs[t % self.differs.len()]
    }

    pub fn agreeing_shifts(&self, node: usize) -> &BitSet {
        &self.agrees[node]
    }

    /// Distance over `subset`; 0 for the empty set.
    pub fn dist(&self, subset: &BitSet) -> usize {
        self.differs
            .iter()
            .map(|d| d.intersection_len(subset))
            .min()
            .unwrap_or(0)
    }

    /// Distance over the node pair `{j1, j2}` (0-based), in `{0, 1, 2}`.
    pub fn pair_dist(&self, j1: usize, j2: usize) -> u8 {
        let (x, y) = (&self.agrees[j1], &self.agrees[j2]);
        if x.intersection_len(y) > 0 {
            0
        } else if !x.is_empty() || !y.is_empty() {
            1
        } else {
            2
        }
    }
}

/// Distance between `a` and `b` over a non-empty node subset.
pub fn dist(a: &Attractor, b: &Attractor, subset: &BitSet) -> Result<usize> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    if let Some(j) = subset.iter().find(|&j| j >= a.n()) {
        return Err(Error::NodeOutOfRange {
            index: j + 1,
            n: a.n(),
        });
    }
    Ok(ShiftTable::new(a, b).dist(subset))
}

/// Reject instances whose pairwise LCM exceeds `cap`.
pub fn check_lcm(instance: &Instance, cap: usize) -> Result<()> {
    let atts = instance.attractors();
    for (i, j) in pairs(atts.len()) {
        let l = lcm(atts[i].period(), atts[j].period());
        if l > cap {
            return Err(Error::LcmTooLarge {
                first: atts[i].id(),
                second: atts[j].id(),
                lcm: l,
                cap,
            });
        }
    }
    Ok(())
}

/// Shift tables for every attractor pair, indexed by 0-based flat pair row.
#[derive(Debug, Clone)]
pub struct PairTables {
    tables: Vec<ShiftTable>,
    m: usize,
    n: usize,
}

impl PairTables {
    pub fn build(instance: &Instance, lcm_cap: usize) -> Result<Self> {
        check_lcm(instance, lcm_cap)?;
        let atts = instance.attractors();
        let tables = pairs(atts.len())
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(i, j)| ShiftTable::new(&atts[i], &atts[j]))
            .collect();
        Ok(PairTables {
            tables,
            m: instance.m(),
            n: instance.n(),
        })
    }

    pub fn get(&self, row: usize) -> &ShiftTable {
        &self.tables[row]
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Per-pair distances over `subset`, in flat order.
    pub fn distances(&self, subset: &BitSet) -> Vec<usize> {
        self.tables.iter().map(|t| t.dist(subset)).collect()
    }

    /// First pair (in flat order) whose distance over all nodes is below
    /// `required`, with that distance.
    pub fn first_unreachable(&self, required: usize) -> Option<(PairIndex, usize)> {
        let all = BitSet::full(self.n);
        self.tables.iter().enumerate().find_map(|(row, t)| {
            let d = t.dist(&all);
            (d < required).then(|| (PairIndex::from_flat(row + 1, self.m).unwrap(), d))
        })
    }
}

/// Fails with [`Error::Infeasible`] when some pair cannot reach `2K+1` over all nodes.
pub fn check_feasible(tables: &PairTables, required: usize) -> Result<()> {
    match tables.first_unreachable(required) {
        Some((poa, d)) => Err(Error::Infeasible {
            first: poa.first,
            second: poa.second,
            distance: d,
            required,
        }),
        None => Ok(()),
    }
}

/// `C(m,2) x C(n,2)` matrix of attractor-pair distances over node pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairDistanceMatrix {
    values: Vec<u8>,
    m: usize,
    n: usize,
}

impl PairDistanceMatrix {
    pub fn from_tables(tables: &PairTables) -> Self {
        let n = tables.n();
        let cols = pair_count(n);
        let mut values = vec![0u8; tables.len() * cols];
        if cols > 0 {
            values
                .par_chunks_mut(cols)
                .zip(tables.tables.par_iter())
                .for_each(|(row, table)| {
                    for (c, (j1, j2)) in pairs(n).enumerate() {
                        row[c] = table.pair_dist(j1, j2);
                    }
                });
        }
        PairDistanceMatrix {
            values,
            m: tables.m(),
            n,
        }
    }

    pub fn rows(&self) -> usize {
        pair_count(self.m)
    }

    pub fn cols(&self) -> usize {
        pair_count(self.n)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry for 0-based attractor-pair row and 0-based nodes `j1 != j2`.
    #[inline]
    pub fn get(&self, row: usize, j1: usize, j2: usize) -> u8 {
        let (lo, hi) = if j1 < j2 { (j1, j2) } else { (j2, j1) };
        self.values[row * self.cols() + flat0(lo, hi, self.n)]
    }

    /// Entry by 0-based row and 0-based node-pair column.
    #[inline]
    pub fn at(&self, row: usize, col: usize) -> u8 {
        self.values[row * self.cols() + col]
    }

    pub fn row(&self, row: usize) -> &[u8] {
        let c = self.cols();
        &self.values[row * c..(row + 1) * c]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("poa");
        for (j1, j2) in pairs(self.n) {
            out.push_str(&format!(",v{}-v{}", j1 + 1, j2 + 1));
        }
        out.push('\n');
        for (r, (i1, i2)) in pairs(self.m).enumerate() {
            out.push_str(&format!("Att{}-Att{}", i1 + 1, i2 + 1));
            for v in self.row(r) {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

pub fn build_pair_distance_matrix(instance: &Instance) -> Result<PairDistanceMatrix> {
    let tables = PairTables::build(instance, DEFAULT_LCM_CAP)?;
    Ok(PairDistanceMatrix::from_tables(&tables))
}

/// `C(m,2) x n` 0/1 matrix: row `T(i1,i2)`, column `j` is set iff the two
/// singleton attractors differ at node `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffMatrix {
    rows: Vec<BitSet>,
    m: usize,
    n: usize,
}

impl DiffMatrix {
    pub fn rows(&self) -> &[BitSet] {
        &self.rows
    }

    pub fn row(&self, r: usize) -> &BitSet {
        &self.rows[r]
    }

    pub fn get(&self, r: usize, j: usize) -> bool {
        self.rows[r].contains(j)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row_len(&self) -> usize {
        self.rows.len()
    }

    /// Row `r` as a 0/1 vector.
    pub fn row_vec(&self, r: usize) -> Vec<u8> {
        (0..self.n).map(|j| self.get(r, j) as u8).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("poa");
        for j in 0..self.n {
            out.push_str(&format!(",v{}", j + 1));
        }
        out.push('\n');
        for (r, (i1, i2)) in pairs(self.m).enumerate() {
            out.push_str(&format!("Att{}-Att{}", i1 + 1, i2 + 1));
            for v in self.row_vec(r) {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

pub fn build_diff_matrix(instance: &Instance) -> Result<DiffMatrix> {
    instance.require_singleton()?;
    let atts = instance.attractors();
    let rows = pairs(atts.len())
        .map(|(i, j)| atts[i].state(0).symmetric_difference(atts[j].state(0)))
        .collect();
    Ok(DiffMatrix {
        rows,
        m: instance.m(),
        n: instance.n(),
    })
}
