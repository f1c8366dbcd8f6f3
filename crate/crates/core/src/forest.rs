//! Rooted forests over `V(G)` and the elimination-forest check.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;

/// Parent pointers; `None` marks a root.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct EliminationForest {
    parent: Vec<Option<usize>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ForestError {
    #[error("forest has {forest} vertices but the graph has {graph}")]
    SizeMismatch { forest: usize, graph: usize },
    #[error("parent {parent} of vertex {vertex} is out of range")]
    ParentOutOfRange { vertex: usize, parent: usize },
    #[error("parent map has a cycle through vertex {0}")]
    Cycle(usize),
    #[error("{} edge(s) not covered by an ancestor relation, first ({}, {})", .0.len(), .0[0].0, .0[0].1)]
    Uncovered(Vec<(usize, usize)>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ForestParseError {
    #[error("line {line}: malformed entry `{text}`")]
    Malformed { line: usize, text: String },
    #[error("vertex {0} listed twice")]
    Duplicate(usize),
    #[error("vertex {0} missing")]
    Missing(usize),
    #[error("vertex {vertex} out of range ({count} entries)")]
    OutOfRange { vertex: usize, count: usize },
}

impl EliminationForest {
    pub fn from_parents(parent: Vec<Option<usize>>) -> Self {
        EliminationForest { parent }
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn roots(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.parent.len()).filter(|&v| self.parent[v].is_none())
    }

    /// Number of vertices on the path from a root to `v`, inclusive.
    /// Fails on cycles and dangling parents.
    pub fn depths(&self) -> Result<Vec<usize>, ForestError> {
        let n = self.parent.len();
        let mut depth = vec![0usize; n];
        // 0 = unvisited, 1 = on the current walk, 2 = done
        let mut state = vec![0u8; n];
        for start in 0..n {
            if state[start] == 2 {
                continue;
            }
            let mut walk = Vec::new();
            let mut v = start;
            let base = loop {
                if state[v] == 2 {
                    break depth[v];
                }
                if state[v] == 1 {
                    return Err(ForestError::Cycle(v));
                }
                state[v] = 1;
                walk.push(v);
                match self.parent[v] {
                    None => break 0,
                    Some(p) if p >= n => {
                        return Err(ForestError::ParentOutOfRange {
                            vertex: v,
                            parent: p,
                        })
                    }
                    Some(p) => v = p,
                }
            };
            for (i, &w) in walk.iter().rev().enumerate() {
                depth[w] = base + i + 1;
                state[w] = 2;
            }
        }
        Ok(depth)
    }

    /// Maximum number of vertices on a root-to-leaf path.
    pub fn height(&self) -> Result<usize, ForestError> {
        Ok(self.depths()?.into_iter().max().unwrap_or(0))
    }

    pub fn is_ancestor(&self, anc: usize, mut v: usize) -> bool {
        loop {
            if v == anc {
                return true;
            }
            match self.parent[v] {
                Some(p) => v = p,
                None => return false,
            }
        }
    }

    /// Returns the height if every edge of `g` joins an ancestor–descendant
    /// pair.
    pub fn validate(&self, g: &Graph) -> Result<usize, ForestError> {
        if self.parent.len() != g.n() {
            return Err(ForestError::SizeMismatch {
                forest: self.parent.len(),
                graph: g.n(),
            });
        }
        let depth = self.depths()?;
        let uncovered: Vec<(usize, usize)> = g
            .edges()
            .iter()
            .copied()
            .filter(|&(u, v)| {
                let (hi, lo) = if depth[u] <= depth[v] { (u, v) } else { (v, u) };
                !self.is_ancestor(hi, lo)
            })
            .collect();
        if uncovered.is_empty() {
            Ok(depth.into_iter().max().unwrap_or(0))
        } else {
            Err(ForestError::Uncovered(uncovered))
        }
    }

    /// `<v> <parent|-1>` per vertex followed by a `# height H` line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (v, p) in self.parent.iter().enumerate() {
            match p {
                Some(p) => {
                    let _ = writeln!(out, "{v} {p}");
                }
                None => {
                    let _ = writeln!(out, "{v} -1");
                }
            }
        }
        match self.height() {
            Ok(h) => {
                let _ = writeln!(out, "# height {h}");
            }
            Err(e) => {
                let _ = writeln!(out, "# invalid: {e}");
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, ForestParseError> {
        let mut entries: Vec<(usize, Option<usize>)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let malformed = || ForestParseError::Malformed {
                line: idx + 1,
                text: raw.to_string(),
            };
            let mut tokens = line.split_whitespace();
            let (Some(a), Some(b), None) = (tokens.next(), tokens.next(), tokens.next()) else {
                return Err(malformed());
            };
            let v: usize = a.parse().map_err(|_| malformed())?;
            let p = if b == "-1" {
                None
            } else {
                Some(b.parse::<usize>().map_err(|_| malformed())?)
            };
            entries.push((v, p));
        }
        let n = entries.len();
        let mut parent: Vec<Option<Option<usize>>> = vec![None; n];
        for (v, p) in entries {
            let slot = parent.get_mut(v).ok_or(ForestParseError::OutOfRange {
                vertex: v,
                count: n,
            })?;
            if slot.is_some() {
                return Err(ForestParseError::Duplicate(v));
            }
            *slot = Some(p);
        }
        let parent = parent
            .into_iter()
            .enumerate()
            .map(|(v, p)| p.ok_or(ForestParseError::Missing(v)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(EliminationForest { parent })
    }

    /// DOT output with vertices of equal depth on the same rank.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph F {\n  rankdir=TB;\n");
        if let Ok(depth) = self.depths() {
            let height = depth.iter().copied().max().unwrap_or(0);
            for d in 1..=height {
                let same: Vec<String> = (0..self.parent.len())
                    .filter(|&v| depth[v] == d)
                    .map(|v| v.to_string())
                    .collect();
                let _ = writeln!(out, "  {{ rank=same; {} }}", same.join("; "));
            }
        }
        for (v, p) in self.parent.iter().enumerate() {
            let _ = writeln!(out, "  {v} [label=\"{v}\"];");
            if let Some(p) = p {
                let _ = writeln!(out, "  {p} -> {v};");
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn clique_chain() {
        let k3 = Graph::from_edges(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        // 2 is the root, 1 below it, 0 at the bottom
        let f = EliminationForest::from_parents(vec![Some(1), Some(2), None]);
        assert_eq!(f.validate(&k3), Ok(3));
    }

    #[test]
    fn star_over_middle() {
        let f = EliminationForest::from_parents(vec![Some(1), None, Some(1)]);
        assert_eq!(f.validate(&p3()), Ok(2));
    }

    #[test]
    fn siblings_do_not_cover() {
        let f = EliminationForest::from_parents(vec![None, None, None]);
        assert_eq!(
            f.validate(&p3()),
            Err(ForestError::Uncovered(vec![(0, 1), (1, 2)]))
        );
    }

    #[test]
    fn cycle_detected() {
        let f = EliminationForest::from_parents(vec![Some(1), Some(0), None]);
        assert!(matches!(f.validate(&p3()), Err(ForestError::Cycle(_))));
        let g = EliminationForest::from_parents(vec![Some(9), None, None]);
        assert!(matches!(
            g.height(),
            Err(ForestError::ParentOutOfRange { .. })
        ));
    }

    #[test]
    fn size_mismatch() {
        let f = EliminationForest::from_parents(vec![None]);
        assert!(matches!(
            f.validate(&p3()),
            Err(ForestError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn text_round_trip() {
        let f = EliminationForest::from_parents(vec![Some(1), None, Some(1)]);
        let text = f.to_text();
        assert_eq!(text, "0 1\n1 -1\n2 1\n# height 2\n");
        assert_eq!(EliminationForest::parse(&text).unwrap(), f);
        assert!(EliminationForest::parse("0 -1\n0 -1").is_err());
        assert!(EliminationForest::parse("1 -1").is_err());
        assert!(f.to_dot().contains("{ rank=same; 0; 2 }"));
    }
}
