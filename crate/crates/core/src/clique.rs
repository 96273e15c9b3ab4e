//! Agreement graphs and exact maximum clique.
//!
//! For a fixed attractor pair, two observed nodes are adjacent when the pair
//! cannot be told apart through those two nodes alone (pair distance 0). The
//! nodes that agree at one common shift form a clique, and conversely the
//! agreeing shifts of a node form a coset of a subgroup of `Z_L`, so pairwise
//! intersecting cosets share a common shift. Hence the distance over a subset
//! equals `|subset| - max clique`, unless no node agrees at any shift.

use crate::bitset::BitSet;
use crate::distance::PairDistanceMatrix;
use crate::error::{Error, Result};
use crate::pair::PairIndex;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgreementGraph {
    /// 0-based node ids; local vertex `v` is node `vertices[v]`.
    vertices: Vec<usize>,
    adjacency: Vec<BitSet>,
}

impl AgreementGraph {
    pub fn from_edges(order: usize, edges: &[(usize, usize)]) -> Self {
        let mut adjacency = vec![BitSet::new(order); order];
        for &(u, v) in edges {
            if u != v {
                adjacency[u].insert(v);
                adjacency[v].insert(u);
            }
        }
        AgreementGraph {
            vertices: (0..order).collect(),
            adjacency,
        }
    }

    pub fn order(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn neighbors(&self, v: usize) -> &BitSet {
        &self.adjacency[v]
    }

    /// Edges as pairs of 0-based node ids, `(lo, hi)` sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, adj) in self.adjacency.iter().enumerate() {
            for v in adj.iter().filter(|&v| v > u) {
                out.push((self.vertices[u], self.vertices[v]));
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(BitSet::len).sum::<usize>() / 2
    }
}

pub fn build_agreement_graph(
    d: &PairDistanceMatrix,
    poa: PairIndex,
    subset: &BitSet,
) -> Result<AgreementGraph> {
    let vertices: Vec<usize> = subset.iter().collect();
    if vertices.len() < 2 {
        return Err(Error::SubsetTooSmall {
            size: vertices.len(),
        });
    }
    if let Some(&j) = vertices.iter().find(|&&j| j >= d.n()) {
        return Err(Error::NodeOutOfRange {
            index: j + 1,
            n: d.n(),
        });
    }
    Ok(agreement_graph(d, poa.row(), &vertices))
}

fn agreement_graph(d: &PairDistanceMatrix, row: usize, vertices: &[usize]) -> AgreementGraph {
    let k = vertices.len();
    let mut adjacency = vec![BitSet::new(k); k];
    for u in 0..k {
        for v in u + 1..k {
            if d.get(row, vertices[u], vertices[v]) == 0 {
                adjacency[u].insert(v);
                adjacency[v].insert(u);
            }
        }
    }
    AgreementGraph {
        vertices: vertices.to_vec(),
        adjacency,
    }
}

/// Size of a maximum clique: Bron–Kerbosch with Tomita pivoting, outer loop
/// in degeneracy order.
pub fn max_clique_size(g: &AgreementGraph) -> Result<usize> {
    let k = g.order();
    if k == 0 {
        return Err(Error::EmptySubset);
    }
    if g.edge_count() == 0 {
        return Ok(1);
    }
    let order = degeneracy_order(&g.adjacency);
    let mut later = BitSet::full(k);
    let mut earlier = BitSet::new(k);
    let mut best = 1;
    for v in order {
        later.remove(v);
        let p = g.adjacency[v].intersection(&later);
        let x = g.adjacency[v].intersection(&earlier);
        expand(&g.adjacency, 1, p, x, &mut best);
        earlier.insert(v);
    }
    Ok(best)
}

fn expand(adj: &[BitSet], depth: usize, mut p: BitSet, mut x: BitSet, best: &mut usize) {
    if p.is_empty() {
        if x.is_empty() && depth > *best {
            *best = depth;
        }
        return;
    }
    if depth + p.len() <= *best {
        return;
    }
    let pivot = p
        .iter()
        .chain(x.iter())
        .max_by_key(|&u| adj[u].intersection_len(&p))
        .expect("p is non-empty");
    let candidates = p.difference(&adj[pivot]);
    for v in candidates.iter() {
        expand(
            adj,
            depth + 1,
            p.intersection(&adj[v]),
            x.intersection(&adj[v]),
            best,
        );
        p.remove(v);
        x.insert(v);
        if depth + p.len() <= *best {
            return;
        }
    }
}

/// Vertices in smallest-last order.
fn degeneracy_order(adj: &[BitSet]) -> Vec<usize> {
    let k = adj.len();
    let mut remaining = BitSet::full(k);
    let mut degree: Vec<usize> = adj.iter().map(BitSet::len).collect();
    let mut order = Vec::with_capacity(k);
    for _ in 0..k {
        let v = remaining
            .iter()
            .min_by_key(|&v| degree[v])
            .expect("vertices remain");
        remaining.remove(v);
        for u in adj[v].iter() {
            if remaining.contains(u) {
                degree[u] -= 1;
            }
        }
        order.push(v);
    }
    order
}

/// Distance over `subset` through the agreement-graph reduction.
pub fn clique_dist(d: &PairDistanceMatrix, poa: PairIndex, subset: &BitSet) -> Result<usize> {
    let vertices: Vec<usize> = subset.iter().collect();
    if vertices.len() < 2 {
        return Err(Error::SubsetTooSmall {
            size: vertices.len(),
        });
    }
    Ok(clique_dist_nodes(d, poa.row(), &vertices))
}

/// `vertices` must hold at least two distinct 0-based nodes.
pub(crate) fn clique_dist_nodes(d: &PairDistanceMatrix, row: usize, vertices: &[usize]) -> usize {
    let k = vertices.len();
    let mut total = 0usize;
    for u in 0..k {
        for v in u + 1..k {
            total += d.get(row, vertices[u], vertices[v]) as usize;
        }
    }
    // Every pair at distance 2: no node agrees at any shift.
    if total == k * (k - 1) {
        return k;
    }
    let g = agreement_graph(d, row, vertices);
    k - max_clique_size(&g).expect("non-empty graph")
}
