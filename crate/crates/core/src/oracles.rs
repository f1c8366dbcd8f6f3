//! Exact exponential-time oracles for treedepth, pathwidth and the longest
//! path. Vertex sets are `u32` bitmasks, so graphs are limited to
//! [`ORACLE_LIMIT`] vertices.

use std::collections::HashMap;

use thiserror::Error;

use crate::decomposition::PathDecomposition;
use crate::forest::EliminationForest;
use crate::graph::Graph;

pub const ORACLE_LIMIT: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("graph has {n} vertices; exact oracles accept at most {limit}")]
    TooLarge { n: usize, limit: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult<W> {
    pub value: usize,
    pub witness: W,
}

/// Longest-path result together with the smallest `b` such that the graph
/// has no `2^b`-vertex path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LongestPath {
    pub value: usize,
    pub path: Vec<usize>,
    pub min_b: u32,
}

fn check_size(g: &Graph) -> Result<(), OracleError> {
    if g.n() > ORACLE_LIMIT {
        Err(OracleError::TooLarge {
            n: g.n(),
            limit: ORACLE_LIMIT,
        })
    } else {
        Ok(())
    }
}

fn bits(mut mask: u32) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let v = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(v)
        }
    })
}

/// Smallest `b` with `2^b > order`.
pub fn min_b_for(order: usize) -> u32 {
    usize::BITS - order.leading_zeros()
}

struct TreedepthSolver {
    adj: Vec<u32>,
    /// connected mask -> (treedepth, chosen root)
    memo: HashMap<u32, (u8, u8)>,
}

impl TreedepthSolver {
    fn components(&self, mask: u32) -> Vec<u32> {
        let mut rest = mask;
        let mut out = Vec::new();
        while rest != 0 {
            let mut comp = rest & rest.wrapping_neg();
            let mut frontier = comp;
            while frontier != 0 {
                let next = bits(frontier).fold(0, |acc, v| acc | self.adj[v]) & rest & !comp;
                comp |= next;
                frontier = next;
            }
            rest &= !comp;
            out.push(comp);
        }
        out
    }

    fn is_clique(&self, mask: u32) -> bool {
        bits(mask).all(|v| (self.adj[v] | (1 << v)) & mask == mask)
    }

    fn solve(&mut self, mask: u32) -> u8 {
        if mask == 0 {
            return 0;
        }
        let comps = self.components(mask);
        if comps.len() > 1 {
            return comps.into_iter().map(|c| self.solve(c)).max().unwrap_or(0);
        }
        if let Some(&(value, _)) = self.memo.get(&mask) {
            return value;
        }
        let size = mask.count_ones() as u8;
        let entry = if self.is_clique(mask) {
            (size, mask.trailing_zeros() as u8)
        } else {
            let mut best = (u8::MAX, 0u8);
            for v in bits(mask) {
                let value = 1 + self.solve(mask & !(1 << v));
                if value < best.0 {
                    best = (value, v as u8);
                }
            }
            best
        };
        self.memo.insert(mask, entry);
        entry.0
    }

    fn witness(&mut self, mask: u32, parent: Option<usize>, out: &mut [Option<usize>]) {
        for comp in self.components(mask) {
            self.solve(comp);
            let root = self.memo[&comp].1 as usize;
            out[root] = parent;
            self.witness(comp & !(1 << root), Some(root), out);
        }
    }
}

/// Exact treedepth by the component recursion
/// `td(G) = 1 + min_v td(G - v)` for connected `G`, memoized per connected
/// vertex set. The witness is an optimal elimination forest.
pub fn exact_treedepth(g: &Graph) -> Result<OracleResult<EliminationForest>, OracleError> {
    check_size(g)?;
    let full = (1u32 << g.n()) - 1;
    let mut solver = TreedepthSolver {
        adj: g.adjacency_masks(),
        memo: HashMap::new(),
    };
    let value = solver.solve(full) as usize;
    let mut parent = vec![None; g.n()];
    solver.witness(full, None, &mut parent);
    Ok(OracleResult {
        value,
        witness: EliminationForest::from_parents(parent),
    })
}

/// Exact pathwidth as the vertex separation number: the minimum over vertex
/// orderings of the largest number of placed vertices that still have an
/// unplaced neighbour. The witness decomposition has bags
/// `boundary(prefix) + {next vertex}` along an optimal ordering.
pub fn exact_pathwidth(g: &Graph) -> Result<OracleResult<PathDecomposition>, OracleError> {
    check_size(g)?;
    let n = g.n();
    if n == 0 {
        return Ok(OracleResult {
            value: 0,
            witness: PathDecomposition::default(),
        });
    }
    let adj = g.adjacency_masks();
    let size = 1usize << n;
    let boundary = |mask: u32| -> u32 {
        bits(mask)
            .filter(|&u| adj[u] & !mask != 0)
            .fold(0, |acc, u| acc | (1 << u))
    };
    let mut boundary_size = vec![0u8; size];
    for (mask, slot) in boundary_size.iter_mut().enumerate() {
        *slot = boundary(mask as u32).count_ones() as u8;
    }
    let mut best = vec![u8::MAX; size];
    best[0] = 0;
    for mask in 1..size {
        let mut value = u8::MAX;
        for v in bits(mask as u32) {
            let prev = mask & !(1 << v);
            value = value.min(best[prev].max(boundary_size[prev]));
        }
        best[mask] = value;
    }
    let full = size - 1;
    let mut order = Vec::with_capacity(n);
    let mut mask = full;
    while mask != 0 {
        let v = bits(mask as u32)
            .find(|&v| {
                let prev = mask & !(1 << v);
                best[prev].max(boundary_size[prev]) == best[mask]
            })
            .expect("optimal predecessor exists");
        order.push(v);
        mask &= !(1 << v);
    }
    order.reverse();
    let mut placed = 0u32;
    let mut bags = Vec::with_capacity(n);
    for &v in &order {
        let mut bag: Vec<usize> = bits(boundary(placed)).collect();
        bag.push(v);
        bags.push(bag);
        placed |= 1 << v;
    }
    Ok(OracleResult {
        value: best[full] as usize,
        witness: PathDecomposition::new(bags),
    })
}

/// Maximum number of vertices on a simple path, by reachability over
/// `(vertex set, endpoint)` states.
pub fn longest_path_order(g: &Graph) -> Result<LongestPath, OracleError> {
    check_size(g)?;
    let n = g.n();
    if n == 0 {
        return Ok(LongestPath {
            value: 0,
            path: Vec::new(),
            min_b: 0,
        });
    }
    let adj = g.adjacency_masks();
    let size = 1usize << n;
    // ends[mask]: endpoints of simple paths whose vertex set is exactly mask
    let mut ends = vec![0u32; size];
    for v in 0..n {
        ends[1 << v] = 1 << v;
    }
    let mut best_mask = 1usize;
    for mask in 1..size {
        let e = ends[mask];
        if e == 0 {
            continue;
        }
        if mask.count_ones() > best_mask.count_ones() {
            best_mask = mask;
        }
        for v in bits(e) {
            for w in bits(adj[v] & !(mask as u32)) {
                ends[mask | (1 << w)] |= 1 << w;
            }
        }
    }
    let mut path = Vec::new();
    let mut mask = best_mask;
    let mut v = ends[mask].trailing_zeros() as usize;
    loop {
        path.push(v);
        let prev = mask & !(1 << v);
        if prev == 0 {
            break;
        }
        v = bits(ends[prev] & adj[v])
            .next()
            .expect("path predecessor exists");
        mask = prev;
    }
    let value = path.len();
    Ok(LongestPath {
        value,
        path,
        min_b: min_b_for(value),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{blowup, clique, path};

    #[test]
    fn treedepth_small() {
        assert_eq!(exact_treedepth(&clique(3)).unwrap().value, 3);
        assert_eq!(exact_treedepth(&path(4)).unwrap().value, 3);
        assert_eq!(exact_treedepth(&path(1)).unwrap().value, 1);
        assert_eq!(exact_treedepth(&Graph::empty(0)).unwrap().value, 0);
        assert_eq!(exact_treedepth(&Graph::empty(3)).unwrap().value, 1);
    }

    #[test]
    fn treedepth_of_paths_is_log() {
        // td(P_n) = ceil(log2(n + 1))
        for n in 1..=16usize {
            let expected = (usize::BITS - n.leading_zeros()) as usize;
            let res = exact_treedepth(&path(n)).unwrap();
            assert_eq!(res.value, expected, "P_{n}");
            assert_eq!(res.witness.validate(&path(n)), Ok(expected));
        }
    }

    #[test]
    fn pathwidth_small() {
        assert_eq!(exact_pathwidth(&path(4)).unwrap().value, 1);
        assert_eq!(exact_pathwidth(&clique(4)).unwrap().value, 3);
        let g = blowup(4, 2).unwrap();
        let res = exact_pathwidth(&g).unwrap();
        assert_eq!(res.value, 3);
        assert_eq!(res.witness.validate(&g), Ok(3));
    }

    #[test]
    fn longest_path_small() {
        let k3 = exact_longest(&clique(3));
        assert_eq!((k3.value, k3.min_b), (3, 2));
        let p4 = exact_longest(&path(4));
        assert_eq!((p4.value, p4.min_b), (4, 3));
        assert_eq!(exact_longest(&blowup(3, 1).unwrap()).value, 4);
    }

    fn exact_longest(g: &Graph) -> LongestPath {
        let res = longest_path_order(g).unwrap();
        for w in res.path.windows(2) {
            assert!(g.has_edge(w[0], w[1]));
        }
        let mut sorted = res.path.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), res.path.len());
        res
    }

    #[test]
    fn min_b_values() {
        assert_eq!(min_b_for(0), 0);
        assert_eq!(min_b_for(1), 1);
        assert_eq!(min_b_for(3), 2);
        assert_eq!(min_b_for(4), 3);
        assert_eq!(min_b_for(7), 3);
        assert_eq!(min_b_for(8), 4);
    }

    #[test]
    fn size_limit() {
        let g = path(ORACLE_LIMIT + 1);
        assert!(matches!(
            exact_treedepth(&g),
            Err(OracleError::TooLarge { .. })
        ));
        assert!(exact_pathwidth(&g).is_err());
        assert!(longest_path_order(&g).is_err());
    }
}
