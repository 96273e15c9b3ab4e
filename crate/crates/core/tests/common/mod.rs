//! Reference implementations straight from the definitions, used as oracles.
#![allow(dead_code)]

use attdisc_core::Instance;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Attractor as raw state rows, `rows[t][j]`.
pub type Rows = Vec<Vec<u8>>;

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Distance by enumerating every shift of `b` against `a` over one full
/// common period.
pub fn naive_dist(a: &Rows, b: &Rows, nodes: &[usize]) -> usize {
    let (pa, pb) = (a.len(), b.len());
    let l = pa / gcd(pa, pb) * pb;
    (0..l)
        .map(|t| {
            nodes
                .iter()
                .filter(|&&j| (0..l).any(|s| a[s % pa][j] != b[(s + t) % pb][j]))
                .count()
        })
        .min()
        .unwrap_or(0)
}

pub fn hamming(a: &[u8], b: &[u8], nodes: &[usize]) -> usize {
    nodes.iter().filter(|&&j| a[j] != b[j]).count()
}

pub fn instance_rows(inst: &Instance) -> Vec<Rows> {
    inst.attractors().iter().map(|a| a.rows()).collect()
}

pub fn pairs(m: usize) -> Vec<(usize, usize)> {
    (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .collect()
}

pub fn feasible(atts: &[Rows], nodes: &[usize], required: usize) -> bool {
    pairs(atts.len())
        .into_iter()
        .all(|(i, j)| naive_dist(&atts[i], &atts[j], nodes) >= required)
}

/// Subsets of `0..n` of size `k` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            if n - j < k - cur.len() {
                break;
            }
            cur.push(j);
            rec(j + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Size-then-lex first feasible node set, or `None` if even all nodes fail.
pub fn brute_min(atts: &[Rows], n: usize, required: usize) -> Option<Vec<usize>> {
    (0..=n).find_map(|k| {
        subsets(n, k)
            .into_iter()
            .find(|s| feasible(atts, s, required))
    })
}

/// Singleton brute force using masks and Hamming distance only.
pub fn brute_min_singleton(rows: &[Vec<u8>], required: usize) -> Option<Vec<usize>> {
    let n = rows[0].len();
    let diffs: Vec<u32> = pairs(rows.len())
        .into_iter()
        .map(|(i, j)| {
            (0..n)
                .filter(|&c| rows[i][c] != rows[j][c])
                .fold(0, |m, c| m | 1 << c)
        })
        .collect();
    (0..=n).find_map(|k| {
        subsets(n, k).into_iter().find(|s| {
            let mask = s.iter().fold(0u32, |m, &c| m | 1 << c);
            diffs
                .iter()
                .all(|d| (d & mask).count_ones() as usize >= required)
        })
    })
}

fn random_cycle(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Option<Rows> {
    let mut rows: Rows = Vec::with_capacity(p);
    for _ in 0..p {
        let mut tries = 0;
        loop {
            let row: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
            if !rows.contains(&row) {
                rows.push(row);
                break;
            }
            tries += 1;
            if tries > 50 {
                return None;
            }
        }
    }
    Some(rows)
}

/// Random valid instance with `m` attractors of period in `1..=max_period`.
pub fn random_instance(
    rng: &mut ChaCha8Rng,
    n: usize,
    m: usize,
    max_period: usize,
    k: usize,
) -> Instance {
    for _ in 0..10_000 {
        let atts: Option<Vec<Rows>> = (0..m)
            .map(|_| {
                let p = rng.gen_range(1..=max_period);
                random_cycle(rng, n, p)
            })
            .collect();
        if let Some(atts) = atts {
            if let Ok(inst) = Instance::from_rows(&atts, k) {
                return inst;
            }
        }
    }
    panic!("no valid instance with n = {n}, m = {m}");
}

/// Random pairwise-distinct singleton rows.
pub fn random_singleton(rng: &mut ChaCha8Rng, n: usize, m: usize, k: usize) -> Instance {
    random_instance(rng, n, m, 1, k)
}
