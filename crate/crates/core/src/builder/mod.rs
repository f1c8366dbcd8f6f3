//! Round-based construction of an elimination forest of height at most
//! `10ab` from a linked path decomposition of width `a - 1` of a graph with
//! no path on `2^b` vertices.
//!
//! All weight comparisons are exact: a weight is the product
//! `W_l(J, T) = (x_1 + 1) ... (x_l + 1)` where `x_i` counts the vertices of
//! the `i`-th linkage of `J` that lie in the interior of `J` and are not yet
//! in the tree.

mod round;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decomposition::{Interval, PathDecomposition, PdViolation};
use crate::forest::EliminationForest;
use crate::graph::Graph;
use crate::linkage::{FamilyError, LinkViolation};
use crate::oracles::{longest_path_order, ORACLE_LIMIT};

use round::{BuilderState, Failure};

pub const TRACE_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuditLevel {
    /// No checks beyond what the construction needs.
    Off,
    /// Certify the returned forest: validity and both height bounds.
    #[default]
    Final,
    /// Also check every invariant and inequality of every round.
    PerRound,
}

impl FromStr for AuditLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "off" => Ok(AuditLevel::Off),
            "final" => Ok(AuditLevel::Final),
            "per-round" => Ok(AuditLevel::PerRound),
            _ => Err(format!(
                "unknown audit level `{s}` (expected off, final or per-round)"
            )),
        }
    }
}

impl fmt::Display for AuditLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AuditLevel::Off => "off",
            AuditLevel::Final => "final",
            AuditLevel::PerRound => "per-round",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SplitCase {
    #[serde(rename = "L+M")]
    LeftMiddle,
    #[serde(rename = "M+R")]
    MiddleRight,
    #[serde(rename = "L+M+R")]
    Both,
}

/// Outcome of one audited inequality or invariant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subject: Option<Interval>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// `W_l(L_t, T')` and `W_l(R_t, T')` for a small node `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CandidateWeight {
    pub node: usize,
    pub left: String,
    pub right: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChildInterval {
    /// `L`, `M` or `R`.
    pub role: &'static str,
    pub interval: Interval,
    pub level: usize,
    /// `W_level(J, T'')` for the child `J`.
    pub weight: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundTrace {
    pub round: usize,
    pub interval: Interval,
    /// `None` stands for the artificial root.
    pub anchor: Option<usize>,
    pub anchor_depth: usize,
    pub level: usize,
    pub m: usize,
    pub k: usize,
    /// `x_1..x_l` at the start of the round.
    pub x: Vec<usize>,
    pub weight: String,
    /// One vertex per order `m+1..=l`; a vertex shared by two linkages is
    /// listed twice but attached once.
    pub representatives: Vec<usize>,
    pub v_prime: Option<usize>,
    pub small_nodes: Vec<usize>,
    pub weights: Vec<CandidateWeight>,
    pub case: SplitCase,
    pub t1: Option<usize>,
    pub t2: Option<usize>,
    pub added_bag_vertices: Vec<usize>,
    pub v_double_prime: Option<usize>,
    pub depth_after: usize,
    pub children: Vec<ChildInterval>,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InitialTrace {
    pub interval: Interval,
    pub level: usize,
    pub x: Vec<usize>,
    pub weight: String,
    /// `2^(b l) * l!`
    pub bound: String,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BuildTrace {
    pub version: u32,
    pub n: usize,
    pub a: usize,
    pub b: u32,
    pub audit: AuditLevel,
    /// `2^b < 2a`: the forest is a depth-first search forest.
    pub easy_case: bool,
    pub initial: Option<InitialTrace>,
    pub rounds: Vec<RoundTrace>,
    pub final_checks: Vec<Check>,
    pub height: Option<usize>,
}

impl BuildTrace {
    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        self.initial
            .iter()
            .flat_map(|i| i.checks.iter())
            .chain(self.rounds.iter().flat_map(|r| r.checks.iter()))
            .chain(self.final_checks.iter())
    }

    pub fn all_passed(&self) -> bool {
        self.checks().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Precondition {
    #[error("not a path decomposition of the graph: {}", join(.0))]
    InvalidDecomposition(Vec<PdViolation>),
    #[error("decomposition not linked: nodes {}..{} need {} disjoint paths, found {} (cut {:?})", .0.left, .0.right, .0.required, .0.achieved, .0.cut)]
    NotLinked(LinkViolation),
    #[error("{0}")]
    UnlinkedInterval(FamilyError),
    #[error("graph has a path on {order} vertices, which is not below 2^{b}")]
    LongPath { order: usize, b: u32 },
    #[error(
        "initial weight {weight} exceeds 2^(b l) * l! = {bound}; b is too small for this graph"
    )]
    InitialWeight { weight: String, bound: String },
}

fn join(v: &[PdViolation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildError {
    #[error("precondition breach: {0}")]
    Precondition(#[from] Precondition),
    #[error("invariant failure ({check}): {detail}")]
    Invariant {
        check: &'static str,
        detail: String,
        /// Everything recorded up to and including the failing round.
        trace: Box<BuildTrace>,
    },
}

impl BuildError {
    /// 2 for a breached precondition, 3 for a failed internal check.
    pub fn exit_code(&self) -> i32 {
        match self {
            BuildError::Precondition(_) => 2,
            BuildError::Invariant { .. } => 3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BuildOutput {
    pub forest: EliminationForest,
    pub trace: BuildTrace,
}

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    pub audit: AuditLevel,
    /// Run the longest-path oracle to confirm there is no `2^b`-vertex path
    /// when the graph is small enough.
    pub check_paths: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            audit: AuditLevel::Final,
            check_paths: true,
        }
    }
}

impl From<AuditLevel> for BuildOptions {
    fn from(audit: AuditLevel) -> Self {
        BuildOptions {
            audit,
            ..Self::default()
        }
    }
}

pub(crate) fn pow2(e: usize) -> BigUint {
    BigUint::one() << e
}

pub(crate) fn factorial(l: usize) -> BigUint {
    (1..=l).fold(BigUint::one(), |acc, i| acc * i)
}

/// `2^b < 2a`
pub fn is_easy_case(a: usize, b: u32) -> bool {
    pow2(b as usize) < BigUint::from(2 * a)
}

/// `2^(5ab) * a^(5a) * 2^(5a)`
pub fn sharp_height_bound(a: usize, b: u32) -> BigUint {
    pow2(5 * a * b as usize) * BigUint::from(a).pow(5 * a as u32) * pow2(5 * a)
}

/// Depth-first search forest: vertices are explored in increasing id order,
/// from every not yet visited vertex in increasing order.
pub fn dfs_forest(g: &Graph) -> EliminationForest {
    let n = g.n();
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    for root in g.vertices() {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        // (vertex, index of the next neighbour to try)
        let mut stack = vec![(root, 0usize)];
        while let Some((v, i)) = stack.last_mut() {
            let v = *v;
            match g.neighbors(v).get(*i) {
                Some(&w) => {
                    *i += 1;
                    if !seen[w] {
                        seen[w] = true;
                        parent[w] = Some(v);
                        stack.push((w, 0));
                    }
                }
                None => {
                    stack.pop();
                }
            }
        }
    }
    EliminationForest::from_parents(parent)
}

fn check(name: &'static str, passed: bool, detail: impl FnOnce() -> String) -> Check {
    Check {
        name,
        subject: None,
        passed,
        detail: (!passed).then(detail),
    }
}

fn final_checks(
    g: &Graph,
    forest: &EliminationForest,
    a: usize,
    b: u32,
    easy: bool,
) -> (Vec<Check>, Option<usize>) {
    let mut out = Vec::new();
    let height = match forest.validate(g) {
        Ok(h) => {
            out.push(check("forest_valid", true, String::new));
            h
        }
        Err(e) => {
            out.push(check("forest_valid", false, || e.to_string()));
            return (out, None);
        }
    };
    let cap = 10 * a * b as usize;
    out.push(check("height_at_most_10ab", height <= cap, || {
        format!("height {height} > {cap}")
    }));
    out.push(check(
        "sharp_height_bound",
        pow2(height) <= sharp_height_bound(a, b),
        || format!("2^{height} exceeds 2^(5ab) a^(5a) 2^(5a)"),
    ));
    if easy {
        out.push(check(
            "dfs_height_below_2^b",
            BigUint::from(height) < pow2(b as usize),
            || format!("height {height} is not below 2^{b}"),
        ));
    }
    (out, Some(height))
}

fn failure(f: Failure, mut trace: BuildTrace) -> BuildError {
    match f {
        Failure::Precondition(p) => p.into(),
        Failure::Invariant {
            check,
            detail,
            partial,
        } => {
            trace.rounds.extend(partial.map(|r| *r));
            BuildError::Invariant {
                check,
                detail,
                trace: Box::new(trace),
            }
        }
    }
}

/// Builds an elimination forest of `g` from the linked decomposition `pd`.
///
/// With `2^b < 2a` the result is [`dfs_forest`]; otherwise the rounds run
/// until every node of `pd` is processed.
pub fn build(
    g: &Graph,
    pd: &PathDecomposition,
    b: u32,
    options: impl Into<BuildOptions>,
) -> Result<BuildOutput, BuildError> {
    let options = options.into();
    pd.validate(g).map_err(Precondition::InvalidDecomposition)?;
    if options.check_paths && g.n() <= ORACLE_LIMIT && g.n() > 0 {
        let longest = longest_path_order(g).expect("graph within oracle limit");
        if BigUint::from(longest.value) >= pow2(b as usize) {
            return Err(Precondition::LongPath {
                order: longest.value,
                b,
            }
            .into());
        }
    }
    if let Some(v) = crate::linkage::first_violation(g, pd) {
        return Err(Precondition::NotLinked(v).into());
    }
    let a = pd.max_bag_size();
    let easy = is_easy_case(a, b);
    let mut trace = BuildTrace {
        version: TRACE_VERSION,
        n: g.n(),
        a,
        b,
        audit: options.audit,
        easy_case: easy,
        initial: None,
        rounds: Vec::new(),
        final_checks: Vec::new(),
        height: None,
    };

    let forest = if easy {
        dfs_forest(g)
    } else {
        let mut state = BuilderState::new(g, pd, b, options.audit);
        if let Err(f) = state.initial_audit(&mut trace) {
            return Err(failure(f, trace));
        }
        while let Some(active) = state.next_interval() {
            let index = trace.rounds.len();
            match state.round(index, active) {
                Ok(r) => {
                    let failed = r.checks.iter().find(|c| !c.passed).cloned();
                    trace.rounds.push(r);
                    if let Some(c) = failed {
                        return Err(BuildError::Invariant {
                            check: c.name,
                            detail: c.detail.unwrap_or_default(),
                            trace: Box::new(trace),
                        });
                    }
                }
                Err(f) => return Err(failure(f, trace)),
            }
        }
        state.into_forest()
    };

    if options.audit != AuditLevel::Off {
        let (checks, height) = final_checks(g, &forest, a, b, easy);
        trace.final_checks = checks;
        trace.height = height;
        if let Some(c) = trace.final_checks.iter().find(|c| !c.passed).cloned() {
            return Err(BuildError::Invariant {
                check: c.name,
                detail: c.detail.unwrap_or_default(),
                trace: Box::new(trace),
            });
        }
    } else {
        trace.height = forest.height().ok();
    }
    Ok(BuildOutput { forest, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{blowup, clique, path};
    use crate::linkage::make_linked;
    use crate::oracles::{exact_pathwidth, exact_treedepth};

    #[test]
    fn dfs_examples() {
        let f = dfs_forest(&path(4));
        assert_eq!(f.parents(), &[None, Some(0), Some(1), Some(2)]);
        assert_eq!(f.height().unwrap(), 4);
        assert_eq!(dfs_forest(&clique(3)).height().unwrap(), 3);
        let f = dfs_forest(&Graph::empty(3));
        assert_eq!(f.height().unwrap(), 1);
        assert_eq!(f.roots().count(), 3);
    }

    #[test]
    fn single_vertex() {
        let g = Graph::empty(1);
        let pd = PathDecomposition::new(vec![vec![0]]);
        let out = build(&g, &pd, 1, AuditLevel::PerRound).unwrap();
        assert_eq!(out.forest.height().unwrap(), 1);
        assert!(out.trace.all_passed());
    }

    #[test]
    fn p3_first_round() {
        let g = path(3);
        let pd = PathDecomposition::new(vec![vec![0, 1], vec![1], vec![1, 2]]);
        let out = build(&g, &pd, 2, AuditLevel::PerRound).unwrap();
        let h = out.forest.validate(&g).unwrap();
        assert!((2..=40).contains(&h));
        assert!(!out.trace.easy_case);
        let init = out.trace.initial.as_ref().unwrap();
        assert_eq!(init.x, vec![1]);
        assert_eq!(init.bound, "4");
        let r = &out.trace.rounds[0];
        assert_eq!((r.level, r.m, r.k), (1, 0, 1));
        assert_eq!(r.representatives, vec![1]);
        assert_eq!(r.case, SplitCase::LeftMiddle);
        assert_eq!(r.t1, Some(2));
        assert!(out.trace.all_passed());
    }

    #[test]
    fn blowup_within_bound() {
        let g = blowup(4, 2).unwrap();
        let pd = make_linked(&g, &exact_pathwidth(&g).unwrap().witness)
            .unwrap()
            .decomposition;
        let out = build(&g, &pd, 4, AuditLevel::PerRound).unwrap();
        let h = out.forest.validate(&g).unwrap();
        let td = exact_treedepth(&g).unwrap().value;
        assert!(td <= h && h <= 160, "td {td} height {h}");
    }

    #[test]
    fn b_below_min_b_is_rejected() {
        let g = path(4);
        let pd = make_linked(&g, &exact_pathwidth(&g).unwrap().witness)
            .unwrap()
            .decomposition;
        let err = build(&g, &pd, 2, AuditLevel::PerRound).unwrap_err();
        assert_eq!(
            err,
            BuildError::Precondition(Precondition::LongPath { order: 4, b: 2 })
        );
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unlinked_input_is_rejected() {
        let g = path(3);
        let pd = PathDecomposition::new(vec![vec![0, 1], vec![1, 2]]);
        let err = build(&g, &pd, 2, AuditLevel::Final).unwrap_err();
        assert!(matches!(
            err,
            BuildError::Precondition(Precondition::NotLinked(_))
        ));
    }

    #[test]
    fn easy_case_uses_dfs() {
        let g = clique(4);
        let pd = PathDecomposition::new(vec![vec![0, 1, 2, 3]]);
        // 2^3 = 8 = 2a: not easy
        assert!(!is_easy_case(4, 3));
        assert!(is_easy_case(5, 3));
        let out = build(&g, &pd, 3, AuditLevel::PerRound).unwrap();
        assert!(!out.trace.easy_case);
        let g = clique(3);
        let pd = PathDecomposition::new(vec![vec![0, 1, 2]]);
        let out = build(&g, &pd, 2, AuditLevel::Final).unwrap();
        assert!(out.trace.easy_case);
        assert_eq!(out.forest, dfs_forest(&g));
    }

    #[test]
    fn disconnected_graph_with_separating_empty_bag() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let pd = PathDecomposition::new(vec![vec![0, 1], vec![], vec![2, 3]]);
        let out = build(&g, &pd, 2, AuditLevel::PerRound).unwrap();
        assert!(out.trace.all_passed());
        assert_eq!(out.forest.roots().count(), 2);
    }

    #[test]
    fn empty_graph() {
        let g = Graph::empty(0);
        let out = build(&g, &PathDecomposition::new(vec![]), 0, AuditLevel::PerRound).unwrap();
        assert!(out.forest.is_empty());
        assert!(out.trace.rounds.is_empty());
    }

    #[test]
    fn audit_level_parse() {
        for level in [AuditLevel::Off, AuditLevel::Final, AuditLevel::PerRound] {
            assert_eq!(level.to_string().parse::<AuditLevel>(), Ok(level));
        }
        assert!("loud".parse::<AuditLevel>().is_err());
    }
}
