//! Separator surgery turning a path decomposition into a linked one.

use std::collections::VecDeque;

use num_bigint::BigUint;
use thiserror::Error;

use super::{first_violation, LinkViolation};
use crate::decomposition::{PathDecomposition, PdViolation};
use crate::graph::Graph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepairError {
    #[error("input is not a path decomposition of the graph ({} violation(s))", .0.len())]
    Invalid(Vec<PdViolation>),
    #[error("repair step {step} on nodes {left}..={right} did not decrease the potential")]
    NoProgress {
        step: usize,
        left: usize,
        right: usize,
    },
}

#[derive(Clone, Debug)]
pub struct RepairOutcome {
    pub decomposition: PathDecomposition,
    /// Surgery steps performed.
    pub iterations: usize,
    /// Potential of the first decomposition the loop worked on; the number of
    /// steps can never exceed it.
    pub initial_potential: BigUint,
    pub steps: Vec<LinkViolation>,
}

fn subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|v| b.binary_search(v).is_ok())
}

/// Ranks decompositions of a graph on `n` vertices: first by the sizes of
/// bags not contained in a neighbouring bag, largest first, then by the
/// number of adjacent bag pairs where neither contains the other.
///
/// Each such bag and each such pair owns a vertex whose first occurrence is
/// at that node, so every count is at most `n` and the ranking is a number
/// written in base `n + 1`: digit `s + 1` counts the bags of size `s`, digit
/// 0 counts the pairs.
pub fn repair_potential(pd: &PathDecomposition, n: usize) -> BigUint {
    let bags = pd.bags();
    let mut counts = vec![0u32; n + 1];
    for (i, bag) in bags.iter().enumerate() {
        let below_left = i > 0 && subset(bag, &bags[i - 1]);
        let below_right = i + 1 < bags.len() && subset(bag, &bags[i + 1]);
        if !below_left && !below_right {
            counts[bag.len().min(n)] += 1;
        }
    }
    let crossing = (1..bags.len())
        .filter(|&i| !subset(&bags[i - 1], &bags[i]) && !subset(&bags[i], &bags[i - 1]))
        .count();
    let radix = BigUint::from(n as u64 + 1);
    let mut value = BigUint::from(0u32);
    for &c in counts.iter().rev() {
        value = value * &radix + c;
    }
    value * radix + crossing
}

/// Splits nodes `left..=right` along the cut: first the part of each bag on
/// the `B_left` side, then the part on the far side, each with the cut
/// vertices that belong there.
pub(crate) fn surgery(
    g: &Graph,
    pd: &PathDecomposition,
    left: usize,
    right: usize,
    cut: &[usize],
) -> PathDecomposition {
    let n = g.n();
    let mut in_cut = vec![false; n];
    for &v in cut {
        in_cut[v] = true;
    }
    let mut near = vec![false; n];
    let mut queue: VecDeque<usize> = pd
        .bag(left)
        .iter()
        .copied()
        .filter(|&v| !in_cut[v])
        .collect();
    for &v in &queue {
        near[v] = true;
    }
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            if !in_cut[w] && !near[w] {
                near[w] = true;
                queue.push_back(w);
            }
        }
    }
    let ranges = pd.occurrence_ranges(n);
    let cut_range = |v: usize| ranges[v].filter(|&(first, last)| first <= right && last >= left);

    let mut bags: Vec<Vec<usize>> = pd.bags()[..left].to_vec();
    for s in left..=right {
        let mut bag: Vec<usize> = pd.bag(s).iter().copied().filter(|&v| near[v]).collect();
        bag.extend(
            cut.iter()
                .copied()
                .filter(|&v| cut_range(v).is_some_and(|(first, _)| first <= s)),
        );
        bags.push(bag);
    }
    bags.push(cut.to_vec());
    for s in left..=right {
        let mut bag: Vec<usize> = pd
            .bag(s)
            .iter()
            .copied()
            .filter(|&v| !near[v] && !in_cut[v])
            .collect();
        bag.extend(
            cut.iter()
                .copied()
                .filter(|&v| cut_range(v).is_some_and(|(_, last)| last >= s)),
        );
        bags.push(bag);
    }
    bags.extend_from_slice(&pd.bags()[right + 1..]);
    PathDecomposition::new(bags).compacted()
}

pub fn make_linked(g: &Graph, pd: &PathDecomposition) -> Result<RepairOutcome, RepairError> {
    pd.validate(g).map_err(RepairError::Invalid)?;
    if first_violation(g, pd).is_none() {
        return Ok(RepairOutcome {
            decomposition: pd.clone(),
            iterations: 0,
            initial_potential: repair_potential(pd, g.n()),
            steps: Vec::new(),
        });
    }
    let mut current = pd.compacted();
    let initial_potential = repair_potential(&current, g.n());
    let mut potential = initial_potential.clone();
    let mut steps = Vec::new();
    while let Some(violation) = first_violation(g, &current) {
        let next = surgery(g, &current, violation.left, violation.right, &violation.cut);
        debug_assert!(next.validate(g).is_ok());
        debug_assert!(next.width() <= current.width());
        let next_potential = repair_potential(&next, g.n());
        if next_potential >= potential {
            return Err(RepairError::NoProgress {
                step: steps.len(),
                left: violation.left,
                right: violation.right,
            });
        }
        steps.push(violation);
        potential = next_potential;
        current = next;
    }
    Ok(RepairOutcome {
        decomposition: current,
        iterations: steps.len(),
        initial_potential,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{path, random_bounded_pw};
    use crate::linkage::check_linked;

    #[test]
    fn p3_gets_a_separator_bag() {
        let g = path(3);
        let pd = PathDecomposition::new(vec![vec![0, 1], vec![1, 2]]);
        let out = make_linked(&g, &pd).unwrap();
        assert_eq!(out.decomposition.bags(), &[vec![0, 1], vec![1], vec![1, 2]]);
        assert_eq!(out.iterations, 1);
        assert!(check_linked(&g, &out.decomposition).is_linked());
    }

    #[test]
    fn linked_input_is_returned_unchanged() {
        let g = path(3);
        let pd = PathDecomposition::new(vec![vec![0, 1], vec![1], vec![1, 2]]);
        let out = make_linked(&g, &pd).unwrap();
        assert_eq!(out.decomposition, pd);
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn invalid_input_rejected() {
        let g = path(3);
        let pd = PathDecomposition::new(vec![vec![0, 1], vec![2]]);
        assert!(matches!(make_linked(&g, &pd), Err(RepairError::Invalid(_))));
    }

    #[test]
    fn disconnected_bags_are_separated() {
        let g = Graph::empty(3);
        let pd = PathDecomposition::new(vec![vec![0, 1, 2]]);
        assert!(check_linked(&g, &pd).is_linked());
        let pd = PathDecomposition::new(vec![vec![0, 1], vec![1, 2]]);
        let out = make_linked(&g, &pd).unwrap();
        assert!(check_linked(&g, &out.decomposition).is_linked());
        assert!(out.decomposition.width() <= 1);
    }

    #[test]
    fn random_inputs_become_linked() {
        for seed in 0..300u64 {
            let n = 3 + (seed % 8) as usize;
            let a = 1 + (seed / 8 % 4) as usize;
            let gen = random_bounded_pw(n, a.min(n), 0.5, seed).unwrap();
            let pd = gen.witness.unwrap();
            let out = make_linked(&gen.graph, &pd).unwrap();
            assert!(out.decomposition.validate(&gen.graph).is_ok());
            assert!(out.decomposition.width() <= pd.width());
            assert!(check_linked(&gen.graph, &out.decomposition).is_linked());
            assert!(BigUint::from(out.iterations) <= out.initial_potential);
        }
    }
}
