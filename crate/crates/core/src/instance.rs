//! Attractors, instances and the plain-text attractor file format.
//!
//! File layout: a header line `m n`, then for each of the `m` attractors a
//! line holding its period `p` followed by `p` state rows of `n` symbols over
//! `{0,1}`. Blank lines are ignored, `#` starts a comment, whitespace inside a
//! state row is ignored.

use std::fmt;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::pair::pair_count;

/// One attractor: a cycle of `period` distinct states over `n` nodes.
///
/// States are kept both row-wise (as given) and node-wise: `series(j)` is the
/// periodic time series of node `j`, which is what every distance computation
/// walks.
#[derive(Clone, PartialEq, Eq)]
pub struct Attractor {
    id: usize,
    n: usize,
    states: Vec<BitSet>,
    series: Vec<BitSet>,
}

impl Attractor {
    /// `id` is the 1-based label; rows are 0/1 vectors of equal length.
    pub fn new(id: usize, rows: &[Vec<u8>]) -> Result<Self> {
        let invalid = |msg: String| Error::InvalidInstance(format!("attractor {id}: {msg}"));
        let Some(first) = rows.first() else {
            return Err(invalid("period must be at least 1".into()));
        };
        let n = first.len();
        if n == 0 {
            return Err(invalid("states must have at least one node".into()));
        }
        let mut states = Vec::with_capacity(rows.len());
        for (t, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(invalid(format!(
                    "state {t} has {} entries, expected {n}",
                    row.len()
                )));
            }
            let mut bits = BitSet::new(n);
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => bits.insert(j),
                    other => return Err(invalid(format!("state {t} node {} is {other}", j + 1))),
                }
            }
            if let Some(prev) = states.iter().position(|s| *s == bits) {
                return Err(invalid(format!("state {t} repeats state {prev}")));
            }
            states.push(bits);
        }
        Ok(Self::from_states(id, n, states))
    }

    fn from_states(id: usize, n: usize, states: Vec<BitSet>) -> Self {
        let p = states.len();
        let series = (0..n)
            .map(|j| BitSet::from_indices(p, (0..p).filter(|&t| states[t].contains(j))))
            .collect();
        Attractor {
            id,
            n,
            states,
            series,
        }
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> usize {
        self.states.len()
    }

    pub fn is_singleton(&self) -> bool {
        self.states.len() == 1
    }

    /// Value of 0-based node `node` at time `t` (taken modulo the period).
    #[inline]
    pub fn value(&self, t: usize, node: usize) -> bool {
        self.series[node].contains(t % self.period())
    }

    pub fn state(&self, t: usize) -> &BitSet {
        &self.states[t % self.period()]
    }

    /// Time series of 0-based node `node` over one period.
    pub fn series(&self, node: usize) -> &BitSet {
        &self.series[node]
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        self.states
            .iter()
            .map(|s| (0..self.n).map(|j| s.contains(j) as u8).collect())
            .collect()
    }

    /// Equal as state cycles, i.e. one is a rotation of the other.
    pub fn cyclically_equal(&self, other: &Attractor) -> bool {
        let p = self.period();
        p == other.period()
            && self.n == other.n
            && (0..p).any(|r| (0..p).all(|t| self.states[(t + r) % p] == other.states[t]))
    }
}

impl fmt::Debug for Attractor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| r.iter().map(|&b| char::from(b'0' + b)).collect())
            .collect();
        write!(f, "Att{}{:?}", self.id, rows)
    }
}

/// `m >= 2` attractors over a common node set plus the noise bound `K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    attractors: Vec<Attractor>,
    n: usize,
    noise_bound: usize,
}

impl Instance {
    pub fn new(attractors: Vec<Attractor>, noise_bound: usize) -> Result<Self> {
        if attractors.len() < 2 {
            return Err(Error::InvalidInstance(format!(
                "m < 2: {} attractor(s), nothing to discriminate",
                attractors.len()
            )));
        }
        let n = attractors[0].n();
        for a in &attractors {
            if a.n() != n {
                return Err(Error::InvalidInstance(format!(
                    "attractor {} has {} nodes, attractor {} has {n}",
                    a.id(),
                    a.n(),
                    attractors[0].id()
                )));
            }
        }
        for (i, a) in attractors.iter().enumerate() {
            if let Some(b) = attractors[i + 1..].iter().find(|b| a.cyclically_equal(b)) {
                return Err(Error::InvalidInstance(format!(
                    "attractors {} and {} are identical state cycles",
                    a.id(),
                    b.id()
                )));
            }
        }
        Ok(Instance {
            attractors,
            n,
            noise_bound,
        })
    }

    /// Builds an instance from per-attractor row lists, labelling them `1..=m`.
    pub fn from_rows(attractors: &[Vec<Vec<u8>>], noise_bound: usize) -> Result<Self> {
        let atts = attractors
            .iter()
            .enumerate()
            .map(|(i, rows)| Attractor::new(i + 1, rows))
            .collect::<Result<Vec<_>>>()?;
        Instance::new(atts, noise_bound)
    }

    /// Singleton instance from an `m x n` 0/1 matrix, one attractor per row.
    pub fn from_singleton_matrix(matrix: &[Vec<u8>], noise_bound: usize) -> Result<Self> {
        let atts: Vec<Vec<Vec<u8>>> = matrix.iter().map(|r| vec![r.clone()]).collect();
        Instance::from_rows(&atts, noise_bound)
    }

    pub fn with_noise_bound(mut self, noise_bound: usize) -> Self {
        self.noise_bound = noise_bound;
        self
    }

    pub fn attractors(&self) -> &[Attractor] {
        &self.attractors
    }

    pub fn attractor(&self, i: usize) -> &Attractor {
        &self.attractors[i]
    }

    pub fn m(&self) -> usize {
        self.attractors.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of attractor pairs, `C(m, 2)`.
    pub fn pair_count(&self) -> usize {
        pair_count(self.m())
    }

    pub fn noise_bound(&self) -> usize {
        self.noise_bound
    }

    /// `2K + 1`.
    pub fn required_distance(&self) -> usize {
        2 * self.noise_bound + 1
    }

    pub fn is_singleton(&self) -> bool {
        self.attractors.iter().all(Attractor::is_singleton)
    }

    pub fn max_period(&self) -> usize {
        self.attractors
            .iter()
            .map(Attractor::period)
            .max()
            .unwrap_or(1)
    }

    pub fn require_singleton(&self) -> Result<()> {
        match self.attractors.iter().find(|a| !a.is_singleton()) {
            Some(a) => Err(Error::NotSingleton {
                attractor: a.id(),
                period: a.period(),
            }),
            None => Ok(()),
        }
    }

    /// Serialize in the attractor file format.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.m(), self.n)?;
        for a in &self.attractors {
            writeln!(f, "{}", a.period())?;
            for row in a.rows() {
                let s: String = row.iter().map(|&b| char::from(b'0' + b)).collect();
                writeln!(f, "{s}")?;
            }
        }
        Ok(())
    }
}

/// Parse an attractor file. The noise bound is set to 0; use
/// [`Instance::with_noise_bound`] to change it.
pub fn parse_instance(input: &str) -> Result<Instance> {
    let mut lines = input.lines().enumerate().filter_map(|(i, raw)| {
        let content = raw.split('#').next().unwrap_or("").trim();
        (!content.is_empty()).then_some((i + 1, content))
    });
    let perr = |line: usize, message: String| Error::Parse { line, message };

    let (hline, header) = lines
        .next()
        .ok_or_else(|| perr(0, "empty input, expected header `m n`".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [m, n] = fields[..] else {
        return Err(perr(
            hline,
            format!("expected header `m n`, found `{header}`"),
        ));
    };
    let parse_count = |s: &str, what: &str| {
        s.parse::<usize>()
            .map_err(|_| perr(hline, format!("{what} `{s}` is not a non-negative integer")))
    };
    let m = parse_count(m, "m")?;
    let n = parse_count(n, "n")?;
    if m < 2 {
        return Err(perr(
            hline,
            format!("m < 2 (m = {m}), nothing to discriminate"),
        ));
    }
    if n == 0 {
        return Err(perr(hline, "n must be at least 1".into()));
    }

    let mut attractors = Vec::with_capacity(m);
    for a in 1..=m {
        let (pline, ptext) = lines.next().ok_or_else(|| {
            perr(
                0,
                format!("unexpected end of input, expected period of attractor {a}"),
            )
        })?;
        let p: usize = ptext.parse().map_err(|_| {
            perr(
                pline,
                format!("attractor {a}: expected period, found `{ptext}`"),
            )
        })?;
        if p == 0 {
            return Err(perr(
                pline,
                format!("attractor {a}: period must be at least 1"),
            ));
        }
        let mut states: Vec<(usize, BitSet)> = Vec::with_capacity(p);
        for t in 0..p {
            let (rline, rtext) = lines.next().ok_or_else(|| {
                perr(
                    0,
                    format!("unexpected end of input in attractor {a}, state {}", t + 1),
                )
            })?;
            let symbols: Vec<char> = rtext.chars().filter(|c| !c.is_whitespace()).collect();
            if symbols.len() != n {
                return Err(perr(
                    rline,
                    format!(
                        "attractor {a}: state row has {} symbols, expected n = {n}",
                        symbols.len()
                    ),
                ));
            }
            let mut bits = BitSet::new(n);
            for (j, c) in symbols.iter().enumerate() {
                match c {
                    '0' => {}
                    '1' => bits.insert(j),
                    other => {
                        return Err(perr(
                            rline,
                            format!(
                                "attractor {a}: non-binary symbol `{other}` at node {}",
                                j + 1
                            ),
                        ))
                    }
                }
            }
            if let Some((prev_line, _)) = states.iter().find(|(_, s)| *s == bits) {
                return Err(perr(
                    rline,
                    format!("attractor {a}: duplicate state, same as line {prev_line}"),
                ));
            }
            states.push((rline, bits));
        }
        attractors.push(Attractor::from_states(
            a,
            n,
            states.into_iter().map(|(_, s)| s).collect(),
        ));
    }
    if let Some((line, extra)) = lines.next() {
        return Err(perr(
            line,
            format!("trailing content after {m} attractors: `{extra}`"),
        ));
    }
    Instance::new(attractors, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE1: &str =
        "# three attractors over five nodes\n3 5\n2\n00001\n11100\n1\n10100\n1\n11001\n";

    #[test]
    fn parses_three_attractor_file() {
        let inst = parse_instance(EXAMPLE1).unwrap();
        assert_eq!(inst.m(), 3);
        assert_eq!(inst.n(), 5);
        let periods: Vec<_> = inst.attractors().iter().map(Attractor::period).collect();
        assert_eq!(periods, vec![2, 1, 1]);
        assert!(inst.attractor(0).value(1, 0));
        assert!(!inst.attractor(0).value(0, 0));
        assert!(inst.attractor(0).value(2, 4));
        assert!(!inst.is_singleton());
    }

    #[test]
    fn whitespace_and_comments() {
        let text = "  2   3  # header\n\n1\n0 1 0\n1 # one state\n1 1 0\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.attractor(1).rows(), vec![vec![1, 1, 0]]);
    }

    #[test]
    fn rejects_single_attractor() {
        let err = parse_instance("1 3\n1\n010\n").unwrap_err();
        assert!(err.to_string().contains("m < 2"), "{err}");
    }

    #[test]
    fn rejects_non_binary_symbol() {
        let err = parse_instance("2 5\n1\n0010a\n1\n00000\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 3,
                message: "attractor 1: non-binary symbol `a` at node 5".into()
            }
        );
    }

    #[test]
    fn rejects_ragged_row() {
        let err = parse_instance("2 3\n1\n010\n1\n0110\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 5, .. }), "{err}");
        assert!(err.to_string().contains("expected n = 3"));
    }

    #[test]
    fn rejects_duplicate_state() {
        let err = parse_instance("2 3\n2\n010\n010\n1\n111\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err}");
        assert!(err.to_string().contains("duplicate state"));
    }

    #[test]
    fn rejects_rotated_duplicate_attractor() {
        let err = parse_instance("2 2\n2\n01\n10\n2\n10\n01\n").unwrap_err();
        assert!(err.to_string().contains("identical state cycles"), "{err}");
    }

    #[test]
    fn rejects_truncated_and_trailing() {
        assert!(parse_instance("2 3\n1\n010\n").is_err());
        assert!(parse_instance("2 3\n1\n010\n1\n011\n1\n").is_err());
        assert!(parse_instance("").is_err());
        assert!(parse_instance("2\n").is_err());
    }

    #[test]
    fn mismatched_node_counts_rejected() {
        let err = Instance::from_rows(&[vec![vec![0, 1]], vec![vec![0, 1, 1]]], 0).unwrap_err();
        assert!(err.to_string().contains("nodes"));
    }

    #[test]
    fn text_round_trip() {
        let inst = parse_instance(EXAMPLE1).unwrap();
        assert_eq!(parse_instance(&inst.to_text()).unwrap(), inst);
    }
}
