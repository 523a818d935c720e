//! Simple labeled graphs stored as a packed upper triangle, plus edge-list I/O.
//!
//! The upper triangle is linearized row-major: `A_12, A_13, ..., A_1n, A_23,
//! ..., A_{n-1,n}`. Every other module indexes the adjacency matrix through
//! this order.

use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};

/// A simple undirected graph on vertices `1..=n`.
///
/// Only `A_ij` for `i < j` is stored, so symmetry and the zero diagonal hold
/// by construction.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LabeledGraph {
    n: usize,
    words: Vec<u64>,
}

impl std::fmt::Debug for LabeledGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LabeledGraph")
            .field("n", &self.n)
            .field("edges", &self.edge_count())
            .finish()
    }
}

/// Number of vertex pairs `n(n-1)/2`.
#[inline]
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

impl LabeledGraph {
    /// The edgeless graph on `n >= 1` vertices.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        Ok(Self {
            n,
            words: vec![0; pair_count(n).div_ceil(64)],
        })
    }

    /// The complete graph `K_n`.
    pub fn complete(n: usize) -> Result<Self> {
        let mut g = Self::empty(n)?;
        let len = pair_count(n);
        for w in g.words.iter_mut() {
            *w = u64::MAX;
        }
        if !len.is_multiple_of(64) {
            if let Some(last) = g.words.last_mut() {
                *last = (1u64 << (len % 64)) - 1;
            }
        }
        Ok(g)
    }

    /// Builds a graph from 1-indexed edges. Self-loops and out-of-range
    /// endpoints are rejected; repeated edges are idempotent.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::empty(n)?;
        for (i, j) in edges {
            if i == 0 || j == 0 || i > n || j > n || i == j {
                return Err(Error::VertexOutOfRange { i, j, n });
            }
            g.set(i - 1, j - 1, true);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Length of the stored upper-triangle bit vector.
    pub fn pair_count(&self) -> usize {
        pair_count(self.n)
    }

    /// Popcount of the upper triangle.
    pub fn edge_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Position of `(u, v)`, `u < v`, 0-based, in the row-major upper triangle.
    #[inline]
    pub fn pair_index(&self, u: usize, v: usize) -> usize {
        debug_assert!(u < v && v < self.n);
        u * (2 * self.n - u - 1) / 2 + (v - u - 1)
    }

    /// `A_ij` for 1-based `i, j`. Symmetric, zero on the diagonal.
    pub fn get_edge(&self, i: usize, j: usize) -> Result<bool> {
        if i == 0 || j == 0 || i > self.n || j > self.n {
            return Err(Error::VertexOutOfRange { i, j, n: self.n });
        }
        Ok(self.adjacent(i - 1, j - 1))
    }

    /// 0-based adjacency test. Panics if either index is `>= n`.
    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        assert!(u < self.n && v < self.n, "vertex out of range");
        match u.cmp(&v) {
            std::cmp::Ordering::Equal => false,
            std::cmp::Ordering::Less => self.bit(self.pair_index(u, v)),
            std::cmp::Ordering::Greater => self.bit(self.pair_index(v, u)),
        }
    }

    /// Bit at position `idx` of the row-major upper triangle.
    #[inline]
    pub fn bit(&self, idx: usize) -> bool {
        (self.words[idx >> 6] >> (idx & 63)) & 1 == 1
    }

    #[inline]
    pub(crate) fn set(&mut self, u: usize, v: usize, value: bool) {
        debug_assert!(u != v);
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        let idx = self.pair_index(a, b);
        let mask = 1u64 << (idx & 63);
        if value {
            self.words[idx >> 6] |= mask;
        } else {
            self.words[idx >> 6] &= !mask;
        }
    }

    #[inline]
    pub(crate) fn set_bit(&mut self, idx: usize) {
        self.words[idx >> 6] |= 1u64 << (idx & 63);
    }

    /// Upper-triangle bits in canonical row-major order.
    pub fn ut_bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.pair_count()).map(move |idx| self.bit(idx))
    }

    /// 1-indexed edges `(i, j)`, `i < j`, in canonical order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |u| {
            (u + 1..n).filter_map(move |v| self.adjacent(u, v).then_some((u + 1, v + 1)))
        })
    }

    /// Vertex degrees, 0-based by vertex.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for (i, j) in self.edges() {
            deg[i - 1] += 1;
            deg[j - 1] += 1;
        }
        deg
    }
}

/// How vertex ids in an edge list are interpreted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Indexing {
    /// 0-indexed if any id equals 0, otherwise 1-indexed.
    #[default]
    Auto,
    Zero,
    One,
}

/// Result of parsing an edge list: the graph and what was dropped on the way.
#[derive(Clone, Debug)]
pub struct LoadedGraph {
    pub graph: LabeledGraph,
    pub dropped_duplicates: usize,
    pub dropped_self_loops: usize,
    pub zero_indexed: bool,
}

impl LoadedGraph {
    pub fn dropped(&self) -> usize {
        self.dropped_duplicates + self.dropped_self_loops
    }
}

fn parse_id(tok: &str, line: usize) -> Result<u64> {
    if tok.starts_with('-') {
        return Err(Error::Parse {
            line,
            msg: format!("negative vertex id `{tok}`"),
        });
    }
    tok.parse::<u64>().map_err(|_| Error::Parse {
        line,
        msg: format!("not an integer vertex id `{tok}`"),
    })
}

/// Parses a whitespace-separated edge list.
///
/// Lines starting with `#` or `%` are comments, except that a `# n=<count>`
/// comment fixes the vertex count (it can only grow beyond what the edges
/// imply). Tokens after the first two on a line are ignored. Self-loops and
/// repeated edges are dropped and counted.
pub fn load_edgelist<R: BufRead>(reader: R, indexing: Indexing) -> Result<LoadedGraph> {
    let mut header_n: Option<usize> = None;
    let mut raw: Vec<(u64, u64)> = Vec::new();
    let mut saw_zero = false;
    let mut max_id = 0u64;

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some(value) = comment.trim().strip_prefix("n=") {
                let n = value.trim().parse::<usize>().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("bad vertex-count header `{trimmed}`"),
                })?;
                header_n = Some(n);
            }
            continue;
        }
        if trimmed.starts_with('%') {
            continue;
        }
        let mut toks = trimmed.split_whitespace();
        let (a, b) = match (toks.next(), toks.next()) {
            (Some(a), Some(b)) => (parse_id(a, lineno)?, parse_id(b, lineno)?),
            _ => {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "expected two vertex ids".into(),
                })
            }
        };
        saw_zero |= a == 0 || b == 0;
        max_id = max_id.max(a).max(b);
        raw.push((a, b));
    }

    let zero_indexed = match indexing {
        Indexing::Auto => saw_zero,
        Indexing::Zero => true,
        Indexing::One => {
            if saw_zero {
                return Err(Error::Parse {
                    line: 0,
                    msg: "vertex id 0 in a 1-indexed edge list".into(),
                });
            }
            false
        }
    };
    let shift = u64::from(zero_indexed);
    let derived_n = if raw.is_empty() { 0 } else { max_id + shift };
    let n = header_n.unwrap_or(0).max(derived_n as usize);
    let mut graph = LabeledGraph::empty(n)?;

    let mut dropped_duplicates = 0;
    let mut dropped_self_loops = 0;
    for (a, b) in raw {
        let (u, v) = ((a + shift - 1) as usize, (b + shift - 1) as usize);
        if u == v {
            dropped_self_loops += 1;
        } else if graph.adjacent(u, v) {
            dropped_duplicates += 1;
        } else {
            graph.set(u, v, true);
        }
    }

    Ok(LoadedGraph {
        graph,
        dropped_duplicates,
        dropped_self_loops,
        zero_indexed,
    })
}

/// Convenience wrapper over [`load_edgelist`] for in-memory text.
pub fn parse_edgelist(text: &str, indexing: Indexing) -> Result<LoadedGraph> {
    load_edgelist(text.as_bytes(), indexing)
}

/// Serializes `g` as a 1-indexed edge list with a leading `# n=<n>` header.
pub fn write_edgelist(g: &LabeledGraph) -> String {
    let mut out = String::with_capacity(16 + g.edge_count() * 12);
    let _ = writeln!(out, "# n={}", g.n());
    for (i, j) in g.edges() {
        let _ = writeln!(out, "{i} {j}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_and_diagonal() {
        let g = LabeledGraph::complete(3).unwrap();
        assert!(g.get_edge(1, 2).unwrap());
        for i in 1..=3 {
            assert!(!g.get_edge(i, i).unwrap());
        }
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn symmetric_single_edge() {
        let g = LabeledGraph::from_edges(4, [(2, 3)]).unwrap();
        assert!(g.get_edge(3, 2).unwrap());
        assert!(g.get_edge(2, 3).unwrap());
        assert!(!g.get_edge(1, 4).unwrap());
    }

    #[test]
    fn out_of_range_is_an_error() {
        let g = LabeledGraph::empty(3).unwrap();
        assert!(matches!(g.get_edge(0, 1), Err(Error::VertexOutOfRange { .. })));
        assert!(matches!(g.get_edge(1, 4), Err(Error::VertexOutOfRange { .. })));
    }

    #[test]
    fn canonical_order_is_row_major() {
        let g = LabeledGraph::empty(4).unwrap();
        let order: Vec<_> = (0..4)
            .flat_map(|u| (u + 1..4).map(move |v| (u, v)))
            .map(|(u, v)| g.pair_index(u, v))
            .collect();
        assert_eq!(order, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn complete_graph_popcount() {
        for n in 1..80 {
            let g = LabeledGraph::complete(n).unwrap();
            assert_eq!(g.edge_count(), pair_count(n));
        }
    }

    #[test]
    fn load_simple() {
        let l = parse_edgelist("1 2\n2 3\n", Indexing::Auto).unwrap();
        assert_eq!(l.graph.n(), 3);
        assert_eq!(l.graph.edges().collect::<Vec<_>>(), vec![(1, 2), (2, 3)]);
    }

    #[test]
    fn load_zero_indexed_with_comment() {
        let l = parse_edgelist("# c\n0 1\n", Indexing::Auto).unwrap();
        assert!(l.zero_indexed);
        assert_eq!(l.graph.n(), 2);
        assert_eq!(l.graph.edges().collect::<Vec<_>>(), vec![(1, 2)]);
    }

    #[test]
    fn load_drops_duplicates_and_loops() {
        let l = parse_edgelist("1 2\n2 1\n1 1\n", Indexing::Auto).unwrap();
        assert_eq!(l.graph.n(), 2);
        assert_eq!(l.graph.edge_count(), 1);
        assert_eq!(l.dropped(), 2);
        assert_eq!(l.dropped_duplicates, 1);
        assert_eq!(l.dropped_self_loops, 1);
    }

    #[test]
    fn percent_comments_and_extra_columns() {
        let l = parse_edgelist("% matrix market style\n1 3 0.5\n", Indexing::Auto).unwrap();
        assert_eq!(l.graph.n(), 3);
        assert_eq!(l.graph.edge_count(), 1);
    }

    #[test]
    fn explicit_indexing_overrides_auto() {
        let l = parse_edgelist("1 2\n", Indexing::Zero).unwrap();
        assert_eq!(l.graph.n(), 3);
        assert_eq!(l.graph.edges().collect::<Vec<_>>(), vec![(2, 3)]);
        assert!(parse_edgelist("0 2\n", Indexing::One).is_err());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse_edgelist("1 2\n3 x\n", Indexing::Auto) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match parse_edgelist("# ok\n1 -2\n", Indexing::Auto) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("negative"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_edgelist("7\n", Indexing::Auto),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn write_examples() {
        assert_eq!(write_edgelist(&LabeledGraph::empty(3).unwrap()), "# n=3\n");
        let g = LabeledGraph::from_edges(3, [(1, 3)]).unwrap();
        assert_eq!(write_edgelist(&g), "# n=3\n1 3\n");
    }

    #[test]
    fn header_preserves_isolated_vertices() {
        let g = LabeledGraph::from_edges(10, [(1, 2)]).unwrap();
        let back = parse_edgelist(&write_edgelist(&g), Indexing::Auto).unwrap();
        assert_eq!(back.graph, g);
        assert!(parse_edgelist("", Indexing::Auto).is_err());
    }
}
