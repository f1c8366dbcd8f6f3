use std::collections::BTreeMap;

use thiserror::Error;

use super::{shortcut, vertex_disjoint_linkage, Linkage, LinkageOutcome};
use crate::decomposition::{Interval, PathDecomposition};
use crate::graph::Graph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("decomposition not linked: no {order}-linkage across {interval}, cut {cut:?}")]
    NotLinked {
        interval: Interval,
        order: usize,
        cut: Vec<usize>,
    },
    #[error("order {order} exceeds level {level} of {interval}")]
    OrderAboveLevel {
        interval: Interval,
        order: usize,
        level: usize,
    },
    #[error("no stored {order}-linkage for parent {parent}")]
    MissingParent { parent: Interval, order: usize },
    #[error("{child} is not inside {parent}")]
    NotNested { child: Interval, parent: Interval },
    #[error("a path of the {order}-linkage of {parent} misses an end bag of {child}")]
    TrimFailed {
        parent: Interval,
        child: Interval,
        order: usize,
    },
}

/// Restricts one path of an enclosing interval's linkage to `interval`: from
/// its last vertex in the leftmost bag to the next vertex in the rightmost
/// bag.
pub fn trim_path(pd: &PathDecomposition, interval: Interval, path: &[usize]) -> Option<Vec<usize>> {
    shortcut(path, pd.bag(interval.lo), pd.bag(interval.hi))
}

/// Linkages `L_k(I)` between the end bags of intervals, materialized on
/// demand. Entries derived from a stored parent entry are trims of its
/// paths, so vertex sets are nested under interval inclusion.
#[derive(Clone, Debug, Default)]
pub struct LinkageFamily {
    entries: BTreeMap<(Interval, usize), Linkage>,
}

impl LinkageFamily {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_stored(&self, interval: Interval, order: usize) -> Option<&Linkage> {
        self.entries.get(&(interval, order))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(Interval, usize), &Linkage)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Computes `L_order(interval)` without storing it. With a parent whose
    /// level is at least `order`, the stored parent linkage is trimmed;
    /// otherwise a fresh linkage is computed inside `B(interval)`.
    pub fn compute(
        &self,
        g: &Graph,
        pd: &PathDecomposition,
        interval: Interval,
        parent: Option<Interval>,
        order: usize,
    ) -> Result<Linkage, FamilyError> {
        let level = pd.level(interval);
        if order == 0 || order > level {
            return Err(FamilyError::OrderAboveLevel {
                interval,
                order,
                level,
            });
        }
        if let Some(parent) = parent.filter(|p| order <= pd.level(*p)) {
            if !parent.contains_interval(&interval) {
                return Err(FamilyError::NotNested {
                    child: interval,
                    parent,
                });
            }
            let source = self
                .entries
                .get(&(parent, order))
                .ok_or(FamilyError::MissingParent { parent, order })?;
            let paths = source
                .paths
                .iter()
                .map(|p| trim_path(pd, interval, p))
                .collect::<Option<Vec<_>>>()
                .ok_or(FamilyError::TrimFailed {
                    parent,
                    child: interval,
                    order,
                })?;
            return Ok(Linkage { paths });
        }
        let allowed = pd.union_of(interval);
        match vertex_disjoint_linkage(g, pd.bag(interval.lo), pd.bag(interval.hi), order, &allowed)
            .expect("end bags lie inside B(I) and order is positive")
        {
            LinkageOutcome::Linked(l) => Ok(l),
            LinkageOutcome::Cut(cut) => Err(FamilyError::NotLinked {
                interval,
                order,
                cut,
            }),
        }
    }

    /// Like [`compute`](Self::compute) but caches the result.
    pub fn get(
        &mut self,
        g: &Graph,
        pd: &PathDecomposition,
        interval: Interval,
        parent: Option<Interval>,
        order: usize,
    ) -> Result<&Linkage, FamilyError> {
        if !self.entries.contains_key(&(interval, order)) {
            let linkage = self.compute(g, pd, interval, parent, order)?;
            self.entries.insert((interval, order), linkage);
        }
        Ok(&self.entries[&(interval, order)])
    }

    /// Stores `L_1..L_level` for `interval`.
    pub fn materialize(
        &mut self,
        g: &Graph,
        pd: &PathDecomposition,
        interval: Interval,
        parent: Option<Interval>,
    ) -> Result<(), FamilyError> {
        for order in 1..=pd.level(interval) {
            self.get(g, pd, interval, parent, order)?;
        }
        Ok(())
    }

    /// Pairs of stored entries of the same order with nested intervals whose
    /// vertex sets are not nested.
    pub fn nesting_violations(&self) -> Vec<(Interval, Interval, usize)> {
        let mut out = Vec::new();
        for (&(inner, k), small) in &self.entries {
            for (&(outer, k2), big) in &self.entries {
                if k != k2 || inner == outer || !outer.contains_interval(&inner) {
                    continue;
                }
                let big_set = big.vertex_set();
                if small
                    .vertex_set()
                    .iter()
                    .any(|v| big_set.binary_search(v).is_err())
                {
                    out.push((inner, outer, k));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::path;

    fn p3_setup() -> (Graph, PathDecomposition) {
        (
            path(3),
            PathDecomposition::new(vec![vec![0, 1], vec![1], vec![1, 2]]),
        )
    }

    #[test]
    fn whole_interval_linkage() {
        let (g, pd) = p3_setup();
        let mut fam = LinkageFamily::new();
        let whole = Interval::new(0, 2);
        let l = fam.get(&g, &pd, whole, None, 1).unwrap().clone();
        assert!(l.is_valid(&g, pd.bag(0), pd.bag(2), Some(&pd.union_of(whole))));
        assert_eq!(l.paths, vec![vec![1]]);
    }

    #[test]
    fn fresh_when_child_level_exceeds_parent() {
        let (g, pd) = p3_setup();
        let mut fam = LinkageFamily::new();
        let whole = Interval::new(0, 2);
        fam.materialize(&g, &pd, whole, None).unwrap();
        let child = Interval::new(0, 0);
        let l = fam.get(&g, &pd, child, Some(whole), 2).unwrap();
        assert_eq!(l.paths, vec![vec![0], vec![1]]);
        // order 1 is trimmed from the parent: the point path stays a point
        let l1 = fam.get(&g, &pd, child, Some(whole), 1).unwrap();
        assert_eq!(l1.paths, vec![vec![1]]);
        assert!(fam.nesting_violations().is_empty());
    }

    #[test]
    fn order_above_level_rejected() {
        let (g, pd) = p3_setup();
        let fam = LinkageFamily::new();
        assert!(matches!(
            fam.compute(&g, &pd, Interval::new(0, 2), None, 2),
            Err(FamilyError::OrderAboveLevel { .. })
        ));
    }

    #[test]
    fn unlinked_decomposition_reports_cut() {
        let g = path(3);
        let pd = PathDecomposition::new(vec![vec![0, 1], vec![1, 2]]);
        let fam = LinkageFamily::new();
        assert_eq!(
            fam.compute(&g, &pd, Interval::new(0, 1), None, 2),
            Err(FamilyError::NotLinked {
                interval: Interval::new(0, 1),
                order: 2,
                cut: vec![1]
            })
        );
    }

    #[test]
    fn missing_parent_entry() {
        let (g, pd) = p3_setup();
        let fam = LinkageFamily::new();
        assert!(matches!(
            fam.compute(&g, &pd, Interval::new(1, 2), Some(Interval::new(0, 2)), 1),
            Err(FamilyError::MissingParent { .. })
        ));
    }
}
