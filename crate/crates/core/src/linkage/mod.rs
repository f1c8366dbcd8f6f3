//! Vertex-disjoint linkages, linkedness of path decompositions, and the
//! nested linkage family used by the builder.

mod family;
mod flow;
mod repair;

pub use family::{trim_path, FamilyError, LinkageFamily};
pub use repair::{make_linked, repair_potential, RepairError, RepairOutcome};

use serde::Serialize;
use thiserror::Error;

use crate::decomposition::{sorted_contains, PathDecomposition};
use crate::graph::Graph;

/// `k` vertex-disjoint paths, each starting in `A` and ending in `B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Linkage {
    pub paths: Vec<Vec<usize>>,
}

impl Linkage {
    pub fn order(&self) -> usize {
        self.paths.len()
    }

    /// All vertices on the paths, sorted.
    pub fn vertex_set(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.paths.iter().flatten().copied().collect();
        out.sort_unstable();
        out
    }

    /// Checks the linkage conditions: disjoint paths along graph edges,
    /// each from `a` to `b`, all inside `allowed` when given.
    pub fn is_valid(&self, g: &Graph, a: &[usize], b: &[usize], allowed: Option<&[usize]>) -> bool {
        let mut seen = vec![false; g.n()];
        for path in &self.paths {
            let (Some(&first), Some(&last)) = (path.first(), path.last()) else {
                return false;
            };
            if !sorted_contains(a, first) || !sorted_contains(b, last) {
                return false;
            }
            for &v in path {
                if v >= g.n() || seen[v] {
                    return false;
                }
                if allowed.is_some_and(|set| !sorted_contains(set, v)) {
                    return false;
                }
                seen[v] = true;
            }
            if path.windows(2).any(|w| !g.has_edge(w[0], w[1])) {
                return false;
            }
        }
        true
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum LinkageOutcome {
    Linked(Linkage),
    /// A vertex set of size below `k` meeting every A-B path.
    Cut(Vec<usize>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinkageError {
    #[error("linkage order must be positive")]
    ZeroOrder,
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(usize),
    #[error("endpoint vertex {0} lies outside the allowed set")]
    NotAllowed(usize),
}

/// Shortens a path to run from its last vertex in `a` to the first vertex in
/// `b` after that. Returns `None` when the path misses either set.
pub(crate) fn shortcut(path: &[usize], a: &[usize], b: &[usize]) -> Option<Vec<usize>> {
    let start = path.iter().rposition(|&v| sorted_contains(a, v))?;
    let len = path[start..].iter().position(|&v| sorted_contains(b, v))?;
    Some(path[start..=start + len].to_vec())
}

fn membership(g: &Graph, set: &[usize]) -> Result<Vec<bool>, LinkageError> {
    let mut mask = vec![false; g.n()];
    for &v in set {
        if v >= g.n() {
            return Err(LinkageError::VertexOutOfRange(v));
        }
        mask[v] = true;
    }
    Ok(mask)
}

fn sorted_set(set: &[usize]) -> Vec<usize> {
    let mut out = set.to_vec();
    out.sort_unstable();
    out.dedup();
    out
}

/// Finds `k` vertex-disjoint `A`-`B` paths inside `allowed`, or a vertex cut
/// of size below `k` separating `A` from `B` there. Returned paths are
/// shortcut so that only their first vertex lies in `A` and only their last
/// vertex lies in `B`.
pub fn vertex_disjoint_linkage(
    g: &Graph,
    a: &[usize],
    b: &[usize],
    k: usize,
    allowed: &[usize],
) -> Result<LinkageOutcome, LinkageError> {
    if k == 0 {
        return Err(LinkageError::ZeroOrder);
    }
    let allowed_mask = membership(g, allowed)?;
    let (a, b) = (sorted_set(a), sorted_set(b));
    for &v in a.iter().chain(&b) {
        if v >= g.n() {
            return Err(LinkageError::VertexOutOfRange(v));
        }
        if !allowed_mask[v] {
            return Err(LinkageError::NotAllowed(v));
        }
    }
    let res = flow::max_flow(g, &a, &b, k, &allowed_mask);
    if res.value < k {
        return Ok(LinkageOutcome::Cut(res.cut.expect("short flow has a cut")));
    }
    let mut paths: Vec<Vec<usize>> = res
        .paths
        .iter()
        .map(|p| shortcut(p, &a, &b).expect("flow paths run from A to B"))
        .collect();
    paths.sort();
    Ok(LinkageOutcome::Linked(Linkage { paths }))
}

/// Achieved flow between two bags of a decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairFlow {
    pub left: usize,
    pub right: usize,
    /// Smallest bag size on `left..=right`.
    pub required: usize,
    /// Flow found, capped at `required`.
    pub achieved: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinkViolation {
    pub left: usize,
    pub right: usize,
    pub required: usize,
    pub achieved: usize,
    pub cut: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LinkedReport {
    pub pairs: Vec<PairFlow>,
    pub violations: Vec<LinkViolation>,
}

impl LinkedReport {
    pub fn is_linked(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Max flow between bags `left` and `right`, computed inside the union of
/// the bags between them. This equals the flow in the whole graph because
/// `B_left` and `B_right` separate that union from the rest.
fn pair_flow(
    g: &Graph,
    pd: &PathDecomposition,
    left: usize,
    right: usize,
    limit: usize,
) -> flow::FlowResult {
    let mut allowed = vec![false; g.n()];
    for t in left..=right {
        for &v in pd.bag(t) {
            allowed[v] = true;
        }
    }
    flow::max_flow(g, pd.bag(left), pd.bag(right), limit, &allowed)
}

/// First violated pair in scan order `(left, right)` ascending, if any.
pub(crate) fn first_violation(g: &Graph, pd: &PathDecomposition) -> Option<LinkViolation> {
    let p = pd.len();
    for left in 0..p {
        let mut required = usize::MAX;
        for right in left..p {
            required = required.min(pd.bag(right).len());
            if right == left || required == 0 {
                continue;
            }
            let res = pair_flow(g, pd, left, right, required);
            if res.value < required {
                return Some(LinkViolation {
                    left,
                    right,
                    required,
                    achieved: res.value,
                    cut: res.cut.expect("short flow has a cut"),
                });
            }
        }
    }
    None
}

/// Checks every pair of nodes `left < right` for a linkage of order equal to
/// the smallest bag between them. A single node is always linked to itself
/// by single-vertex paths, so those pairs are not listed.
pub fn check_linked(g: &Graph, pd: &PathDecomposition) -> LinkedReport {
    let p = pd.len();
    let mut report = LinkedReport::default();
    for left in 0..p {
        let mut required = usize::MAX;
        for right in left..p {
            required = required.min(pd.bag(right).len());
            if right == left {
                continue;
            }
            let res = if required == 0 {
                None
            } else {
                Some(pair_flow(g, pd, left, right, required))
            };
            let achieved = res.as_ref().map_or(0, |r| r.value);
            report.pairs.push(PairFlow {
                left,
                right,
                required,
                achieved,
            });
            if let Some(res) = res.filter(|r| r.value < required) {
                report.violations.push(LinkViolation {
                    left,
                    right,
                    required,
                    achieved,
                    cut: res.cut.expect("short flow has a cut"),
                });
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::path;

    fn all(n: usize) -> Vec<usize> {
        (0..n).collect()
    }

    #[test]
    fn single_vertex_path_in_intersection() {
        let g = path(3);
        let out = vertex_disjoint_linkage(&g, &[0, 1], &[1, 2], 1, &all(3)).unwrap();
        assert_eq!(
            out,
            LinkageOutcome::Linked(Linkage {
                paths: vec![vec![1]]
            })
        );
    }

    #[test]
    fn p3_two_paths_cut() {
        let g = path(3);
        let out = vertex_disjoint_linkage(&g, &[0, 1], &[1, 2], 2, &all(3)).unwrap();
        assert_eq!(out, LinkageOutcome::Cut(vec![1]));
    }

    #[test]
    fn c4_two_paths() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        // disjoint paths cannot share the single vertex of A
        let out = vertex_disjoint_linkage(&g, &[0], &[2], 2, &all(4)).unwrap();
        assert!(matches!(out, LinkageOutcome::Cut(ref c) if c.len() == 1));
        let out = vertex_disjoint_linkage(&g, &[0, 2], &[1, 3], 2, &all(4)).unwrap();
        let LinkageOutcome::Linked(l) = out else {
            panic!("expected linkage")
        };
        assert!(l.is_valid(&g, &[0, 2], &[1, 3], None));
        assert_eq!(l.order(), 2);
    }

    #[test]
    fn errors() {
        let g = path(3);
        assert_eq!(
            vertex_disjoint_linkage(&g, &[0], &[2], 0, &all(3)),
            Err(LinkageError::ZeroOrder)
        );
        assert_eq!(
            vertex_disjoint_linkage(&g, &[0], &[2], 1, &[0, 1]),
            Err(LinkageError::NotAllowed(2))
        );
        assert_eq!(
            vertex_disjoint_linkage(&g, &[5], &[2], 1, &all(3)),
            Err(LinkageError::VertexOutOfRange(5))
        );
    }

    #[test]
    fn allowed_restricts_paths() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (0, 3), (3, 2)]).unwrap();
        let out = vertex_disjoint_linkage(&g, &[0], &[2], 1, &[0, 2, 3]).unwrap();
        assert_eq!(
            out,
            LinkageOutcome::Linked(Linkage {
                paths: vec![vec![0, 3, 2]]
            })
        );
    }

    #[test]
    fn check_linked_examples() {
        let g = path(3);
        let linked = PathDecomposition::new(vec![vec![0, 1], vec![1], vec![1, 2]]);
        let report = check_linked(&g, &linked);
        assert!(report.is_linked());
        assert_eq!(report.pairs.len(), 3);
        assert!(report
            .pairs
            .iter()
            .all(|p| p.required == 1 && p.achieved == 1));

        let unlinked = PathDecomposition::new(vec![vec![0, 1], vec![1, 2]]);
        let report = check_linked(&g, &unlinked);
        assert_eq!(
            report.violations,
            vec![LinkViolation {
                left: 0,
                right: 1,
                required: 2,
                achieved: 1,
                cut: vec![1]
            }]
        );

        let single = PathDecomposition::new(vec![vec![0, 1, 2]]);
        assert!(check_linked(&crate::generate::clique(3), &single).is_linked());
    }

    #[test]
    fn shortcut_trims_to_last_a_and_first_b() {
        assert_eq!(
            shortcut(&[0, 1, 2, 3, 4], &[0, 1], &[3, 4]),
            Some(vec![1, 2, 3])
        );
        assert_eq!(shortcut(&[5], &[5], &[5]), Some(vec![5]));
        assert_eq!(shortcut(&[0, 1], &[7], &[1]), None);
    }
}
