//! Simple undirected graphs on the vertex set `0..n`.
//!
//! The text format is a plain edge list:
//!
//! ```text
//! # optional comments
//! n 4
//! 0 1
//! 1 2
//! 2 3
//! ```
//!
//! The header may also be written `n=4`. Duplicate edges (in either
//! orientation) collapse to one edge; loops are rejected.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphParseError {
    #[error("missing `n <count>` header")]
    MissingHeader,
    #[error("line {line}: malformed input `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange {
        line: usize,
        vertex: usize,
        n: usize,
    },
    #[error("line {line}: loop on vertex {vertex}")]
    Loop { line: usize, vertex: usize },
    #[error("header declares {n} vertices; at most {MAX_PARSE_VERTICES} are accepted")]
    TooLarge { n: usize },
}

/// Largest vertex count accepted by [`Graph::parse`].
pub const MAX_PARSE_VERTICES: usize = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("loop on vertex {0}")]
    Loop(usize),
}

/// A finite simple undirected graph. Neighbor lists are sorted and the edge
/// list holds each edge once as `(u, v)` with `u < v`, in sorted order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            adj: vec![Vec::new(); n],
            edges: Vec::new(),
        }
    }

    /// Builds a graph from an edge iterator, collapsing duplicates.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::Loop(u));
            }
            set.insert((u.min(v), u.max(v)));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &set {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph {
            n,
            adj,
            edges: set.into_iter().collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn vertices(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    /// Neighborhoods as bitmasks. Only meaningful for `n <= 32`.
    pub(crate) fn adjacency_masks(&self) -> Vec<u32> {
        debug_assert!(self.n <= 32);
        self.adj
            .iter()
            .map(|list| list.iter().fold(0u32, |m, &w| m | (1 << w)))
            .collect()
    }

    /// Parses the edge-list text format.
    pub fn parse(text: &str) -> Result<Self, GraphParseError> {
        let mut n: Option<usize> = None;
        let mut pairs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let malformed = || GraphParseError::Malformed {
                line: line_no,
                text: raw.to_string(),
            };
            match n {
                None => {
                    let rest = line.strip_prefix('n').ok_or_else(malformed)?;
                    let rest = rest.trim_start();
                    let rest = rest.strip_prefix('=').unwrap_or(rest).trim();
                    let count: usize = rest.parse().map_err(|_| malformed())?;
                    if count > MAX_PARSE_VERTICES {
                        return Err(GraphParseError::TooLarge { n: count });
                    }
                    n = Some(count);
                }
                Some(count) => {
                    let mut tokens = line.split_whitespace();
                    let (Some(a), Some(b), None) = (tokens.next(), tokens.next(), tokens.next())
                    else {
                        return Err(malformed());
                    };
                    let u: usize = a.parse().map_err(|_| malformed())?;
                    let v: usize = b.parse().map_err(|_| malformed())?;
                    for w in [u, v] {
                        if w >= count {
                            return Err(GraphParseError::VertexOutOfRange {
                                line: line_no,
                                vertex: w,
                                n: count,
                            });
                        }
                    }
                    if u == v {
                        return Err(GraphParseError::Loop {
                            line: line_no,
                            vertex: u,
                        });
                    }
                    pairs.push((u, v));
                }
            }
        }
        let n = n.ok_or(GraphParseError::MissingHeader)?;
        Ok(Graph::from_edges(n, pairs).expect("edges checked while parsing"))
    }

    /// Canonical edge-list text: header, then edges in sorted order.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for v in self.vertices() {
            let _ = writeln!(out, "  {v} [label=\"{v}\"];");
        }
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "  {u} -- {v};");
        }
        out.push_str("}\n");
        out
    }

    /// Subgraph induced by `keep`, with the original vertex ids retained.
    /// Vertices outside `keep` become isolated.
    pub fn restrict(&self, keep: &[bool]) -> Graph {
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|&(u, v)| keep[u] && keep[v]);
        Graph::from_edges(self.n, edges).expect("subgraph of a valid graph")
    }

    /// Connected components as sorted vertex lists, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in self.vertices() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_single_vertex() {
        let g = Graph::parse("n=1").unwrap();
        assert_eq!(g.n(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn parse_path_and_dedup() {
        let g = Graph::parse("n 3\n0 1\n1 2\n").unwrap();
        let h = Graph::parse("n 3\n0 1\n1 0\n1 2\n").unwrap();
        assert_eq!(g, h);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(g.neighbors(1), &[0, 2]);
    }

    #[test]
    fn parse_comments() {
        let g = Graph::parse("# a path\nn 2 # header\n\n0 1 # edge\n").unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(Graph::parse(""), Err(GraphParseError::MissingHeader));
        assert!(matches!(
            Graph::parse("n 3\n0 1 2"),
            Err(GraphParseError::Malformed { line: 2, .. })
        ));
        assert!(matches!(
            Graph::parse("x 3"),
            Err(GraphParseError::Malformed { line: 1, .. })
        ));
        assert_eq!(
            Graph::parse("n 3\n0 3"),
            Err(GraphParseError::VertexOutOfRange {
                line: 2,
                vertex: 3,
                n: 3
            })
        );
        assert_eq!(
            Graph::parse("n 3\n1 1"),
            Err(GraphParseError::Loop { line: 2, vertex: 1 })
        );
        assert!(Graph::parse("n 2\n0 -1").is_err());
        assert_eq!(
            Graph::parse("n 99999999999"),
            Err(GraphParseError::TooLarge { n: 99999999999 })
        );
    }

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::from_edges(5, [(3, 1), (0, 4), (1, 2)]).unwrap();
        let text = g.to_edge_list();
        assert_eq!(text, "n 5\n0 4\n1 2\n1 3\n");
        assert_eq!(Graph::parse(&text).unwrap(), g);
    }

    #[test]
    fn dot_lists_every_vertex() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let dot = g.to_dot();
        assert!(dot.contains("2 [label=\"2\"]"));
        assert!(dot.contains("0 -- 1;"));
    }

    #[test]
    fn components_sorted() {
        let g = Graph::from_edges(5, [(3, 4), (0, 2)]).unwrap();
        assert_eq!(g.components(), vec![vec![0, 2], vec![1], vec![3, 4]]);
    }
}
