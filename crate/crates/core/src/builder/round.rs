use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::One;

use super::{
    factorial, pow2, AuditLevel, BuildTrace, CandidateWeight, Check, ChildInterval, InitialTrace,
    Precondition, RoundTrace, SplitCase,
};
use crate::decomposition::{Interval, PathDecomposition};
use crate::forest::EliminationForest;
use crate::graph::Graph;
use crate::linkage::{FamilyError, LinkageFamily};

pub(crate) enum Failure {
    Precondition(Precondition),
    Invariant {
        check: &'static str,
        detail: String,
        partial: Option<Box<RoundTrace>>,
    },
}

impl From<FamilyError> for Failure {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::NotLinked { .. } => {
                Failure::Precondition(Precondition::UnlinkedInterval(e))
            }
            _ => Failure::Invariant {
                check: "linkage_family",
                detail: e.to_string(),
                partial: None,
            },
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Active {
    pub interval: Interval,
    /// `None` is the artificial root.
    pub anchor: Option<usize>,
}

fn product(x: &[usize]) -> BigUint {
    x.iter().fold(BigUint::one(), |acc, &v| acc * (v + 1))
}

/// Right-hand side of the weight budget: `2^(5(b+1)l) * (l!)^5`.
fn budget(b: u32, l: usize) -> BigUint {
    pow2(5 * (b as usize + 1) * l) * factorial(l).pow(5)
}

fn interval(lo: usize, hi: usize) -> Option<Interval> {
    (lo <= hi).then(|| Interval::new(lo, hi))
}

struct Checks {
    on: bool,
    list: Vec<Check>,
}

impl Checks {
    fn record(
        &mut self,
        name: &'static str,
        subject: Option<Interval>,
        passed: bool,
        detail: impl FnOnce() -> String,
    ) {
        if self.on {
            self.list.push(Check {
                name,
                subject,
                passed,
                detail: (!passed).then(detail),
            });
        }
    }
}

/// The tree `T` (parent pointers over vertices of `G`, the artificial root
/// left implicit), the processed nodes `X`, the active intervals with their
/// anchors, and the linkage family.
pub(crate) struct BuilderState<'a> {
    g: &'a Graph,
    pd: &'a PathDecomposition,
    b: u32,
    audit: AuditLevel,
    ranges: Vec<Option<(usize, usize)>>,
    fam: LinkageFamily,
    parent: Vec<Option<usize>>,
    in_tree: Vec<bool>,
    depth: Vec<usize>,
    processed: Vec<bool>,
    /// keyed by the leftmost node
    active: BTreeMap<usize, Active>,
}

impl<'a> BuilderState<'a> {
    pub fn new(g: &'a Graph, pd: &'a PathDecomposition, b: u32, audit: AuditLevel) -> Self {
        let n = g.n();
        let mut active = BTreeMap::new();
        if let Some(whole) = pd.whole() {
            active.insert(
                whole.lo,
                Active {
                    interval: whole,
                    anchor: None,
                },
            );
        }
        BuilderState {
            g,
            pd,
            b,
            audit,
            ranges: pd.occurrence_ranges(n),
            fam: LinkageFamily::new(),
            parent: vec![None; n],
            in_tree: vec![false; n],
            depth: vec![0; n],
            processed: vec![false; pd.len()],
            active,
        }
    }

    fn depth_of(&self, v: Option<usize>) -> usize {
        v.map_or(0, |v| self.depth[v])
    }

    fn in_interior(&self, v: usize, j: Interval) -> bool {
        self.ranges[v].is_some_and(|(first, last)| j.lo <= first && last <= j.hi)
    }

    /// Vertex set of `L_order(j)`, stored or trimmed from `outer`.
    fn linkage_set(
        &self,
        j: Interval,
        outer: Interval,
        order: usize,
    ) -> Result<Vec<usize>, Failure> {
        if let Some(l) = self.fam.get_stored(j, order) {
            return Ok(l.vertex_set());
        }
        Ok(self
            .fam
            .compute(self.g, self.pd, j, Some(outer), order)?
            .vertex_set())
    }

    /// `x_1(j, tree) .. x_upto(j, tree)`; empty `j` gives zeros.
    fn xs(
        &self,
        j: Option<Interval>,
        outer: Interval,
        upto: usize,
        tree: &[bool],
    ) -> Result<Vec<usize>, Failure> {
        let Some(j) = j else {
            return Ok(vec![0; upto]);
        };
        (1..=upto)
            .map(|i| {
                let set = self.linkage_set(j, outer, i)?;
                Ok(set
                    .into_iter()
                    .filter(|&v| !tree[v] && self.in_interior(v, j))
                    .count())
            })
            .collect()
    }

    fn weight(
        &self,
        j: Option<Interval>,
        outer: Interval,
        upto: usize,
        tree: &[bool],
    ) -> Result<BigUint, Failure> {
        Ok(product(&self.xs(j, outer, upto, tree)?))
    }

    fn attach_chain(&mut self, anchor: Option<usize>, vertices: &[usize]) -> Option<usize> {
        let mut cur = anchor;
        for &v in vertices {
            debug_assert!(!self.in_tree[v]);
            self.parent[v] = cur;
            self.depth[v] = self.depth_of(cur) + 1;
            self.in_tree[v] = true;
            cur = Some(v);
        }
        cur
    }

    fn root_path(&self, v: Option<usize>) -> Vec<bool> {
        let mut on = vec![false; self.g.n()];
        let mut cur = v;
        while let Some(u) = cur {
            on[u] = true;
            cur = self.parent[u];
        }
        on
    }

    fn is_ancestor(&self, anc: usize, v: usize) -> bool {
        let mut cur = Some(v);
        while let Some(u) = cur {
            if u == anc {
                return true;
            }
            cur = self.parent[u];
        }
        false
    }

    /// Checks the path condition and the weight budget for an active
    /// interval against the current tree.
    fn audit_active(
        &self,
        checks: &mut Checks,
        act: Active,
        outer: Interval,
    ) -> Result<BigUint, Failure> {
        let j = act.interval;
        let l = self.pd.level(j);
        let on_path = self.root_path(act.anchor);
        let missing: Vec<usize> = self
            .pd
            .union_of(j)
            .into_iter()
            .filter(|&v| self.in_tree[v] && !on_path[v])
            .collect();
        checks.record(
            "anchor_path_covers_bag_vertices",
            Some(j),
            missing.is_empty(),
            || format!("tree vertices {missing:?} of B({j}) are off the root path of the anchor"),
        );
        let w = self.weight(Some(j), outer, l, &self.in_tree)?;
        let d = self.depth_of(act.anchor);
        checks.record(
            "weight_budget",
            Some(j),
            pow2(d) * w.pow(5) <= budget(self.b, l),
            || format!("2^{d} * {w}^5 exceeds 2^(5(b+1){l}) * ({l}!)^5"),
        );
        Ok(w)
    }

    /// Materializes the family of the whole decomposition and checks the
    /// starting weight `W_l <= 2^(b l) * l!`.
    pub fn initial_audit(&mut self, trace: &mut BuildTrace) -> Result<(), Failure> {
        let Some(whole) = self.pd.whole() else {
            return Ok(());
        };
        self.fam.materialize(self.g, self.pd, whole, None)?;
        let l = self.pd.level(whole);
        let x = self.xs(Some(whole), whole, l, &self.in_tree)?;
        let weight = product(&x);
        let bound = pow2(self.b as usize * l) * factorial(l);
        if weight > bound {
            return Err(Failure::Precondition(Precondition::InitialWeight {
                weight: weight.to_string(),
                bound: bound.to_string(),
            }));
        }
        let mut checks = Checks {
            on: self.audit == AuditLevel::PerRound,
            list: Vec::new(),
        };
        checks.record("initial_weight", Some(whole), true, String::new);
        self.audit_active(
            &mut checks,
            Active {
                interval: whole,
                anchor: None,
            },
            whole,
        )?;
        trace.initial = Some(InitialTrace {
            interval: whole,
            level: l,
            x,
            weight: weight.to_string(),
            bound: bound.to_string(),
            checks: checks.list,
        });
        Ok(())
    }

    /// The leftmost active interval.
    pub fn next_interval(&mut self) -> Option<Active> {
        self.active.pop_first().map(|(_, a)| a)
    }

    pub fn into_forest(self) -> EliminationForest {
        EliminationForest::from_parents(self.parent)
    }

    /// Runs one round on `act`, which has already been removed from the
    /// active set.
    pub fn round(&mut self, index: usize, act: Active) -> Result<RoundTrace, Failure> {
        let g = self.g;
        let pd = self.pd;
        let whole = act.interval;
        let (lo, hi) = (whole.lo, whole.hi);
        let l = pd.level(whole);
        let anchor_depth = self.depth_of(act.anchor);
        let mut checks = Checks {
            on: self.audit == AuditLevel::PerRound,
            list: Vec::new(),
        };

        // T
        let tree0 = self.in_tree.clone();
        let links: Vec<Vec<usize>> = (1..=l)
            .map(|i| self.linkage_set(whole, whole, i))
            .collect::<Result<_, _>>()?;
        let open: Vec<Vec<usize>> = links
            .iter()
            .map(|s| s.iter().copied().filter(|&v| !tree0[v]).collect())
            .collect();
        let m = (1..=l).rev().find(|&i| open[i - 1].is_empty()).unwrap_or(0);
        let k = l - m;
        let x0 = self.xs(Some(whole), whole, l, &tree0)?;
        let w0 = product(&x0);

        if checks.on {
            self.audit_active(&mut checks, act, whole)?;
            let short = whole
                .nodes()
                .find(|&t| pd.bag(t).iter().filter(|&&v| tree0[v]).count() < m);
            checks.record(
                "bags_hold_m_tree_vertices",
                Some(whole),
                short.is_none(),
                || {
                    format!(
                        "bag {} has fewer than {m} tree vertices",
                        short.unwrap_or_default()
                    )
                },
            );
            let outside = open
                .iter()
                .flatten()
                .copied()
                .find(|&v| !self.in_interior(v, whole));
            checks.record(
                "open_linkage_in_interior",
                Some(whole),
                outside.is_none(),
                || format!("vertex {outside:?} of an open linkage lies outside the interior"),
            );
            let plain: Vec<usize> = open.iter().map(Vec::len).collect();
            checks.record("x_double_entry", Some(whole), plain == x0, || {
                format!("interior counts {x0:?} differ from plain counts {plain:?}")
            });
            checks.record("weight_at_least_2^k", Some(whole), w0 >= pow2(k), || {
                format!("W = {w0} < 2^{k}")
            });
        }

        // T'
        let representatives: Vec<usize> = (m + 1..=l).map(|i| open[i - 1][0]).collect();
        let mut chain: Vec<usize> = Vec::with_capacity(k);
        for &r in &representatives {
            if !chain.contains(&r) {
                chain.push(r);
            }
        }
        let v_prime = self.attach_chain(act.anchor, &chain);
        let tree1 = self.in_tree.clone();

        let small_nodes: Vec<usize> = whole
            .nodes()
            .filter(|&t| pd.bag(t).len() <= l + k)
            .collect();
        let fail = |check: &'static str, detail: String, partial: Option<Box<RoundTrace>>| {
            Failure::Invariant {
                check,
                detail,
                partial,
            }
        };
        if small_nodes.is_empty() {
            return Err(fail(
                "small_node_exists",
                format!("no bag of {whole} has at most {} vertices", l + k),
                None,
            ));
        }
        if checks.on {
            let crowded = small_nodes
                .iter()
                .copied()
                .find(|&t| pd.bag(t).iter().filter(|&&v| !tree1[v]).count() > 2 * k);
            checks.record(
                "small_bags_open_at_most_2k",
                Some(whole),
                crowded.is_none(),
                || {
                    format!(
                        "small bag {crowded:?} has more than {} vertices outside the tree",
                        2 * k
                    )
                },
            );
        }

        let mut left_w = Vec::with_capacity(small_nodes.len());
        let mut right_w = Vec::with_capacity(small_nodes.len());
        for &t in &small_nodes {
            let left = t.checked_sub(1).and_then(|e| interval(lo, e));
            left_w.push(self.weight(left, whole, l, &tree1)?);
            right_w.push(self.weight(interval(t + 1, hi), whole, l, &tree1)?);
        }
        if checks.on {
            let monotone =
                left_w.windows(2).all(|p| p[0] <= p[1]) && right_w.windows(2).all(|p| p[0] >= p[1]);
            checks.record("comparator_monotone", Some(whole), monotone, || {
                format!("left weights {left_w:?}, right weights {right_w:?}")
            });
        }
        let le: Vec<bool> = left_w.iter().zip(&right_w).map(|(a, b)| a <= b).collect();
        let last_le = le.iter().rposition(|&x| x);
        let first_gt = le.iter().position(|&x| !x);
        let (case, t1, t2) = match (last_le, first_gt) {
            (Some(i), None) => (SplitCase::LeftMiddle, Some(small_nodes[i]), None),
            (None, Some(j)) => (SplitCase::MiddleRight, None, Some(small_nodes[j])),
            (Some(i), Some(j)) => {
                checks.record("no_small_between_t1_t2", Some(whole), i + 1 == j, || {
                    format!(
                        "small nodes {} and {} are not consecutive",
                        small_nodes[i], small_nodes[j]
                    )
                });
                if i > j {
                    return Err(fail(
                        "no_small_between_t1_t2",
                        format!(
                            "t1 = {} lies right of t2 = {}",
                            small_nodes[i], small_nodes[j]
                        ),
                        None,
                    ));
                }
                (SplitCase::Both, Some(small_nodes[i]), Some(small_nodes[j]))
            }
            (None, None) => unreachable!("small nodes are non-empty"),
        };
        let weights: Vec<CandidateWeight> = small_nodes
            .iter()
            .zip(left_w.iter().zip(&right_w))
            .map(|(&node, (a, b))| CandidateWeight {
                node,
                left: a.to_string(),
                right: b.to_string(),
            })
            .collect();

        let left = t1
            .and_then(|t| t.checked_sub(1))
            .and_then(|e| interval(lo, e));
        let right = t2.and_then(|t| interval(t + 1, hi));
        let middle = match (t1, t2) {
            (Some(t1), None) => interval(t1 + 1, hi),
            (None, Some(t2)) => t2.checked_sub(1).and_then(|e| interval(lo, e)),
            (Some(t1), Some(t2)) => t2.checked_sub(1).and_then(|e| interval(t1 + 1, e)),
            (None, None) => None,
        };
        let left_bar = t1.and_then(|t| interval(t + 1, hi));
        let right_bar = t2
            .and_then(|t| t.checked_sub(1))
            .and_then(|e| interval(lo, e));

        // T''
        let mut added: Vec<usize> = Vec::new();
        for t in t1.into_iter().chain(t2) {
            for &v in pd.bag(t) {
                if !tree1[v] && !added.contains(&v) {
                    added.push(v);
                }
            }
        }
        let v_double_prime = self.attach_chain(v_prime, &added);
        let depth_after = self.depth_of(v_double_prime);
        for t in t1.into_iter().chain(t2) {
            self.processed[t] = true;
        }
        let mut children = Vec::new();
        for (role, j) in [("L", left), ("M", middle), ("R", right)] {
            let Some(j) = j else { continue };
            self.fam.materialize(g, pd, j, Some(whole))?;
            let level = pd.level(j);
            let weight = self.weight(Some(j), whole, level, &self.in_tree)?;
            self.active.insert(
                j.lo,
                Active {
                    interval: j,
                    anchor: v_double_prime,
                },
            );
            children.push(ChildInterval {
                role,
                interval: j,
                level,
                weight: weight.to_string(),
            });
        }

        if checks.on {
            checks.record(
                "depth_step_at_most_5k",
                Some(whole),
                depth_after <= anchor_depth + 5 * k,
                || format!("depth {depth_after} > {anchor_depth} + 5*{k}"),
            );
            checks.record(
                "added_at_most_4k",
                Some(whole),
                added.len() <= 4 * k,
                || format!("{} bag vertices added, k = {k}", added.len()),
            );
            for child in &children {
                self.audit_active(
                    &mut checks,
                    Active {
                        interval: child.interval,
                        anchor: v_double_prime,
                    },
                    whole,
                )?;
            }
            for (name, side, bar) in [
                ("left_weight_dominated", left, left_bar),
                ("right_weight_dominated", right, right_bar),
            ] {
                let Some(side) = side else { continue };
                let ws = self.weight(Some(side), whole, l, &tree1)?;
                let wb = self.weight(bar, whole, l, &tree1)?;
                checks.record(name, Some(side), ws <= wb, || format!("{ws} > {wb}"));

                let xs = self.xs(Some(side), whole, l, &tree1)?;
                let xb = self.xs(bar, whole, l, &tree1)?;
                let bad = (0..l).find(|&i| x0[i] < xs[i] + xb[i] + usize::from(i + 1 > m));
                checks.record("x_split_lower_bound", Some(side), bad.is_none(), || {
                    format!(
                        "order {}: {x0:?} vs {xs:?} + {xb:?}",
                        bad.unwrap_or_default() + 1
                    )
                });

                let after = self.weight(Some(side), whole, l, &self.in_tree)?;
                checks.record(
                    "side_weight_drop",
                    Some(side),
                    &after * pow2(k) <= w0,
                    || format!("{after} * 2^{k} > {w0}"),
                );
            }
            if let Some(mid) = middle {
                let now = self.weight(Some(mid), whole, l, &self.in_tree)?;
                let before = self.weight(Some(mid), whole, l, &tree0)?;
                checks.record(
                    "middle_weight_shrinks",
                    Some(mid),
                    now <= before && before <= w0,
                    || format!("{now} <= {before} <= {w0} fails"),
                );
                let level = pd.level(mid);
                checks.record("middle_level_above", Some(mid), level > l + k, || {
                    format!("level {level} <= {l} + {k}")
                });
            }
            let cap = pow2(anchor_depth) * w0.pow(5);
            let deep = chain
                .iter()
                .chain(&added)
                .copied()
                .find(|&v| pow2(self.depth[v]) > cap);
            checks.record("added_depth_budget", Some(whole), deep.is_none(), || {
                format!("vertex {deep:?} is deeper than {anchor_depth} + 5 log W")
            });
            let clash = chain.iter().chain(&added).copied().find_map(|v| {
                g.neighbors(v)
                    .iter()
                    .copied()
                    .find(|&w| {
                        self.in_tree[w] && !self.is_ancestor(w, v) && !self.is_ancestor(v, w)
                    })
                    .map(|w| (v, w))
            });
            checks.record("partial_elimination", None, clash.is_none(), || {
                format!("adjacent tree vertices {clash:?} are not ancestor-related")
            });
            let uncovered = (0..pd.len())
                .filter(|&t| self.processed[t])
                .flat_map(|t| pd.bag(t).iter().copied())
                .find(|&v| !self.in_tree[v]);
            checks.record("processed_bags_in_tree", None, uncovered.is_none(), || {
                format!("vertex {uncovered:?} of a processed bag is not in the tree")
            });
            let expected = self.maximal_runs();
            let actual: Vec<Interval> = self.active.values().map(|a| a.interval).collect();
            checks.record("active_maximal", None, expected == actual, || {
                format!("active {actual:?}, expected {expected:?}")
            });
        }

        Ok(RoundTrace {
            round: index,
            interval: whole,
            anchor: act.anchor,
            anchor_depth,
            level: l,
            m,
            k,
            x: x0,
            weight: w0.to_string(),
            representatives,
            v_prime,
            small_nodes,
            weights,
            case,
            t1,
            t2,
            added_bag_vertices: added,
            v_double_prime,
            depth_after,
            children,
            checks: checks.list,
        })
    }

    /// Maximal runs of unprocessed nodes.
    fn maximal_runs(&self) -> Vec<Interval> {
        let mut out = Vec::new();
        let mut start = None;
        for t in 0..=self.processed.len() {
            let free = t < self.processed.len() && !self.processed[t];
            match (free, start) {
                (true, None) => start = Some(t),
                (false, Some(s)) => {
                    out.push(Interval::new(s, t - 1));
                    start = None;
                }
                _ => {}
            }
        }
        out
    }
}
