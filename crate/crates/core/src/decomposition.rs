//! Path decompositions and interval bookkeeping.
//!
//! Bags are kept as sorted, duplicate-free vertex lists. Node `t` of the
//! decomposition path is bag `t`; nodes are laid out left to right.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PathDecomposition {
    bags: Vec<Vec<usize>>,
}

/// A contiguous range `lo..=hi` of decomposition nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    pub lo: usize,
    pub hi: usize,
}

impl Interval {
    pub fn new(lo: usize, hi: usize) -> Self {
        assert!(lo <= hi, "empty interval {lo}..={hi}");
        Interval { lo, hi }
    }

    /// `lo..=hi`, or `None` when `lo > hi`.
    pub fn checked(lo: usize, hi: usize) -> Option<Self> {
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn node_count(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn contains(&self, t: usize) -> bool {
        self.lo <= t && t <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn nodes(&self) -> std::ops::RangeInclusive<usize> {
        self.lo..=self.hi
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

/// level, interior and union of bags for one interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalStats {
    pub level: usize,
    pub interior: Vec<usize>,
    pub union: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum PdViolation {
    VertexOutOfRange { bag: usize, vertex: usize },
    MissingVertex(usize),
    UncoveredEdge(usize, usize),
    NonContiguous(usize),
}

impl std::fmt::Display for PdViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PdViolation::VertexOutOfRange { bag, vertex } => {
                write!(f, "bag {bag} holds out-of-range vertex {vertex}")
            }
            PdViolation::MissingVertex(v) => write!(f, "vertex {v} is in no bag"),
            PdViolation::UncoveredEdge(u, v) => write!(f, "edge ({u},{v}) is in no bag"),
            PdViolation::NonContiguous(v) => {
                write!(f, "occurrences of vertex {v} are not contiguous")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PdParseError {
    #[error("line {line}: malformed bag `{text}`")]
    Malformed { line: usize, text: String },
}

impl PathDecomposition {
    /// Sorts and deduplicates every bag.
    pub fn new(bags: Vec<Vec<usize>>) -> Self {
        let bags = bags
            .into_iter()
            .map(|mut bag| {
                bag.sort_unstable();
                bag.dedup();
                bag
            })
            .collect();
        PathDecomposition { bags }
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn bag(&self, t: usize) -> &[usize] {
        &self.bags[t]
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    /// Largest bag size minus one (0 for a decomposition without bags).
    pub fn width(&self) -> usize {
        self.max_bag_size().saturating_sub(1)
    }

    pub fn max_bag_size(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn whole(&self) -> Option<Interval> {
        Interval::checked(0, self.bags.len().wrapping_sub(1)).filter(|_| !self.bags.is_empty())
    }

    /// First and last node containing each vertex, for vertices `0..n`.
    pub fn occurrence_ranges(&self, n: usize) -> Vec<Option<(usize, usize)>> {
        let mut ranges: Vec<Option<(usize, usize)>> = vec![None; n];
        for (t, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                if v < n {
                    let r = ranges[v].get_or_insert((t, t));
                    r.1 = t;
                }
            }
        }
        ranges
    }

    /// Checks both decomposition conditions against `g`. Returns the width on
    /// success and every violation otherwise.
    pub fn validate(&self, g: &Graph) -> Result<usize, Vec<PdViolation>> {
        let n = g.n();
        let mut violations = Vec::new();
        let mut count = vec![0usize; n];
        for (t, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                if v >= n {
                    violations.push(PdViolation::VertexOutOfRange { bag: t, vertex: v });
                } else {
                    count[v] += 1;
                }
            }
        }
        let ranges = self.occurrence_ranges(n);
        for v in g.vertices() {
            match ranges[v] {
                None => violations.push(PdViolation::MissingVertex(v)),
                Some((first, last)) => {
                    if last - first + 1 != count[v] {
                        violations.push(PdViolation::NonContiguous(v));
                    }
                }
            }
        }
        for &(u, v) in g.edges() {
            let covered = self
                .bags
                .iter()
                .any(|bag| bag.binary_search(&u).is_ok() && bag.binary_search(&v).is_ok());
            if !covered {
                violations.push(PdViolation::UncoveredEdge(u, v));
            }
        }
        if violations.is_empty() {
            Ok(self.width())
        } else {
            Err(violations)
        }
    }

    /// Drops empty bags and merges runs of identical neighbouring bags.
    /// Neither step affects the decomposition conditions.
    pub fn normalized(&self) -> Self {
        let mut bags: Vec<Vec<usize>> = Vec::with_capacity(self.bags.len());
        for bag in &self.bags {
            if bag.is_empty() || bags.last() == Some(bag) {
                continue;
            }
            bags.push(bag.clone());
        }
        PathDecomposition { bags }
    }

    /// Merges runs of identical neighbouring bags and drops empty bags at
    /// either end. Empty bags between non-empty ones are kept: they separate
    /// vertex-disjoint parts and matter for linkedness.
    pub fn compacted(&self) -> Self {
        let mut bags: Vec<Vec<usize>> = Vec::with_capacity(self.bags.len());
        for bag in &self.bags {
            if bags.last() == Some(bag) || (bag.is_empty() && bags.is_empty()) {
                continue;
            }
            bags.push(bag.clone());
        }
        while bags.last().is_some_and(Vec::is_empty) {
            bags.pop();
        }
        PathDecomposition { bags }
    }

    /// `B(I)`: union of the bags of `interval`, sorted.
    pub fn union_of(&self, interval: Interval) -> Vec<usize> {
        let mut out: Vec<usize> = interval
            .nodes()
            .flat_map(|t| self.bags[t].iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn level(&self, interval: Interval) -> usize {
        interval
            .nodes()
            .map(|t| self.bags[t].len())
            .min()
            .expect("intervals are non-empty")
    }

    /// Vertices that occur only in bags of `interval`.
    pub fn interior(&self, interval: Interval) -> Vec<usize> {
        let outside = |v: usize| {
            self.bags
                .iter()
                .enumerate()
                .any(|(t, bag)| !interval.contains(t) && bag.binary_search(&v).is_ok())
        };
        self.union_of(interval)
            .into_iter()
            .filter(|&v| !outside(v))
            .collect()
    }

    pub fn interval_stats(&self, interval: Interval) -> IntervalStats {
        assert!(
            interval.hi < self.bags.len(),
            "interval {interval} outside decomposition"
        );
        IntervalStats {
            level: self.level(interval),
            interior: self.interior(interval),
            union: self.union_of(interval),
        }
    }

    /// One line per bag, space separated; an empty bag is written as `-`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for bag in &self.bags {
            if bag.is_empty() {
                out.push('-');
            } else {
                for (i, v) in bag.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    let _ = write!(out, "{v}");
                }
            }
            out.push('\n');
        }
        out
    }

    /// Parses the bag-per-line text format. Blank lines and `#` comments are
    /// skipped; a line holding only `-` is an empty bag.
    pub fn parse(text: &str) -> Result<Self, PdParseError> {
        let mut bags = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line == "-" {
                bags.push(Vec::new());
                continue;
            }
            let bag = line
                .split_whitespace()
                .map(str::parse::<usize>)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| PdParseError::Malformed {
                    line: idx + 1,
                    text: raw.to_string(),
                })?;
            bags.push(bag);
        }
        Ok(PathDecomposition::new(bags))
    }
}

/// Membership in a sorted vertex list.
pub(crate) fn sorted_contains(set: &[usize], v: usize) -> bool {
    set.binary_search(&v).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn validate_canonical_path() {
        let pd = PathDecomposition::new(vec![vec![0, 1], vec![1, 2]]);
        assert_eq!(pd.validate(&p3()), Ok(1));
    }

    #[test]
    fn validate_uncovered_edge() {
        let pd = PathDecomposition::new(vec![vec![0, 1], vec![2]]);
        assert_eq!(
            pd.validate(&p3()),
            Err(vec![PdViolation::UncoveredEdge(1, 2)])
        );
    }

    #[test]
    fn validate_non_contiguous() {
        let pd = PathDecomposition::new(vec![vec![0, 1], vec![2], vec![1, 2]]);
        assert_eq!(pd.validate(&p3()), Err(vec![PdViolation::NonContiguous(1)]));
    }

    #[test]
    fn validate_missing_and_out_of_range() {
        let pd = PathDecomposition::new(vec![vec![0, 1], vec![1, 7]]);
        let errs = pd.validate(&p3()).unwrap_err();
        assert!(errs.contains(&PdViolation::VertexOutOfRange { bag: 1, vertex: 7 }));
        assert!(errs.contains(&PdViolation::MissingVertex(2)));
        assert!(errs.contains(&PdViolation::UncoveredEdge(1, 2)));
    }

    #[test]
    fn stats_examples() {
        let pd = PathDecomposition::new(vec![vec![0, 1], vec![1], vec![1, 2]]);
        let whole = pd.interval_stats(Interval::new(0, 2));
        assert_eq!(whole.level, 1);
        assert_eq!(whole.interior, vec![0, 1, 2]);
        let first = pd.interval_stats(Interval::new(0, 0));
        assert_eq!(first.level, 2);
        assert_eq!(first.interior, vec![0]);
        assert_eq!(first.union, vec![0, 1]);
        let mid = pd.interval_stats(Interval::new(1, 1));
        assert_eq!(mid.level, 1);
        assert!(mid.interior.is_empty());
    }

    #[test]
    fn normalize_strips_empty_and_duplicates() {
        let pd = PathDecomposition::new(vec![vec![], vec![0, 1], vec![1, 0], vec![], vec![1, 2]]);
        assert_eq!(pd.normalized().bags(), &[vec![0, 1], vec![1, 2]]);
        assert_eq!(pd.normalized().validate(&p3()), Ok(1));
    }

    #[test]
    fn compact_keeps_inner_empty_bags() {
        let pd = PathDecomposition::new(vec![
            vec![],
            vec![0],
            vec![],
            vec![],
            vec![1],
            vec![1],
            vec![],
        ]);
        assert_eq!(pd.compacted().bags(), &[vec![0], vec![], vec![1]]);
    }

    #[test]
    fn text_round_trip() {
        let pd = PathDecomposition::new(vec![vec![1, 0], vec![], vec![2]]);
        let text = pd.to_text();
        assert_eq!(text, "0 1\n-\n2\n");
        assert_eq!(PathDecomposition::parse(&text).unwrap(), pd);
        assert!(PathDecomposition::parse("0 x").is_err());
    }
}
