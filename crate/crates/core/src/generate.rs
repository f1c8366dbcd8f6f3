//! Deterministic graph families.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64(seed)` (crate
//! `rand_chacha` 0.3), consumed in the order documented on each family, so a
//! `(family, seed)` pair names the same graph on every platform.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::decomposition::PathDecomposition;
use crate::graph::Graph;

/// Largest `b` accepted for the clique-chain family.
pub const MAX_BLOWUP_B: u32 = 20;

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    Path {
        n: usize,
    },
    Cycle {
        n: usize,
    },
    Clique {
        n: usize,
    },
    /// `n` isolated vertices.
    Empty {
        n: usize,
    },
    /// A path on `2^(b-c)` cliques of size `2^(c-1)`, consecutive cliques
    /// joined completely.
    Blowup {
        b: u32,
        c: u32,
    },
    /// Sliding-window interval chain of width below `a`.
    RandomBoundedPw {
        n: usize,
        a: usize,
        p: f64,
    },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenerateError {
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

/// A generated graph, with a path decomposition when the family provides one.
#[derive(Clone, Debug)]
pub struct Generated {
    pub graph: Graph,
    pub witness: Option<PathDecomposition>,
}

impl Family {
    /// Builds a family from its CLI name and the usual parameter flags.
    pub fn from_name(
        name: &str,
        n: Option<usize>,
        a: Option<usize>,
        b: Option<u32>,
        c: Option<u32>,
        p: Option<f64>,
    ) -> Result<Family, GenerateError> {
        let need = |what: &str, v: Option<usize>| {
            v.ok_or_else(|| GenerateError::InvalidParameters(format!("{name} needs --{what}")))
        };
        let need_u32 = |what: &str, v: Option<u32>| {
            v.ok_or_else(|| GenerateError::InvalidParameters(format!("{name} needs --{what}")))
        };
        Ok(match name {
            "path" => Family::Path { n: need("n", n)? },
            "cycle" => Family::Cycle { n: need("n", n)? },
            "clique" => Family::Clique { n: need("n", n)? },
            "empty" => Family::Empty { n: need("n", n)? },
            "blowup" => Family::Blowup {
                b: need_u32("b", b)?,
                c: need_u32("c", c)?,
            },
            "random-pw" | "random_bounded_pw" => Family::RandomBoundedPw {
                n: need("n", n)?,
                a: need("a", a)?,
                p: p.unwrap_or(0.5),
            },
            other => return Err(GenerateError::UnknownFamily(other.to_string())),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Path { .. } => "path",
            Family::Cycle { .. } => "cycle",
            Family::Clique { .. } => "clique",
            Family::Empty { .. } => "empty",
            Family::Blowup { .. } => "blowup",
            Family::RandomBoundedPw { .. } => "random-pw",
        }
    }
}

pub fn generate(family: &Family, seed: u64) -> Result<Generated, GenerateError> {
    let plain = |graph: Graph| Generated {
        graph,
        witness: None,
    };
    match *family {
        Family::Path { n } => Ok(plain(path(n))),
        Family::Cycle { n } => {
            if n < 3 {
                return Err(GenerateError::InvalidParameters(format!(
                    "cycle needs n >= 3, got {n}"
                )));
            }
            let edges = (0..n).map(|i| (i, (i + 1) % n));
            Ok(plain(Graph::from_edges(n, edges).expect("cycle edges")))
        }
        Family::Clique { n } => Ok(plain(clique(n))),
        Family::Empty { n } => Ok(plain(Graph::empty(n))),
        Family::Blowup { b, c } => blowup(b, c).map(plain),
        Family::RandomBoundedPw { n, a, p } => random_bounded_pw(n, a, p, seed),
    }
}

pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("path edges")
}

pub fn clique(n: usize) -> Graph {
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    Graph::from_edges(n, edges).expect("clique edges")
}

/// Clique `i` occupies ids `i*s .. (i+1)*s` with `s = 2^(c-1)`.
pub fn blowup(b: u32, c: u32) -> Result<Graph, GenerateError> {
    if !(1 <= c && c < b) {
        return Err(GenerateError::InvalidParameters(format!(
            "blowup needs b > c >= 1, got b={b}, c={c}"
        )));
    }
    if b > MAX_BLOWUP_B {
        return Err(GenerateError::InvalidParameters(format!(
            "blowup needs b <= {MAX_BLOWUP_B}, got {b}"
        )));
    }
    let size = 1usize << (c - 1);
    let cliques = 1usize << (b - c);
    let n = size * cliques;
    let mut edges = Vec::new();
    for i in 0..cliques {
        let base = i * size;
        for u in 0..size {
            for v in u + 1..size {
                edges.push((base + u, base + v));
            }
            if i + 1 < cliques {
                for v in 0..size {
                    edges.push((base + u, base + size + v));
                }
            }
        }
    }
    Ok(Graph::from_edges(n, edges).expect("blowup edges"))
}

/// Random graph of pathwidth below `a` with its witness decomposition.
///
/// Vertices `0..n` are admitted in order into a window of at most `a`
/// vertices. When the window is full, one member (uniform index into the
/// window, kept in admission order) is evicted first. The newly admitted
/// vertex is joined to each other window member with probability `p`, and
/// the window after each admission is recorded as a bag. RNG draws per
/// vertex: one `gen_range` for the eviction (if any), then one `gen_bool(p)`
/// per other window member in window order.
pub fn random_bounded_pw(
    n: usize,
    a: usize,
    p: f64,
    seed: u64,
) -> Result<Generated, GenerateError> {
    if a == 0 || a > n {
        return Err(GenerateError::InvalidParameters(format!(
            "random_bounded_pw needs 1 <= a <= n, got a={a}, n={n}"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(GenerateError::InvalidParameters(format!(
            "edge probability must lie in [0, 1], got {p}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut window: Vec<usize> = Vec::with_capacity(a);
    let mut bags = Vec::with_capacity(n);
    let mut edges = Vec::new();
    for v in 0..n {
        if window.len() == a {
            let idx = rng.gen_range(0..window.len());
            window.remove(idx);
        }
        for &u in &window {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
        window.push(v);
        bags.push(window.clone());
    }
    Ok(Generated {
        graph: Graph::from_edges(n, edges).expect("window edges"),
        witness: Some(PathDecomposition::new(bags)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blowup_3_1_is_p4() {
        let g = blowup(3, 1).unwrap();
        assert_eq!(g, path(4));
    }

    #[test]
    fn blowup_4_2_counts() {
        // four 2-cliques in a chain: 4 inner edges and 3 * 2 * 2 between
        let g = blowup(4, 2).unwrap();
        assert_eq!(g.n(), 8);
        assert_eq!(g.edge_count(), 16);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 2) && g.has_edge(0, 3));
        assert!(!g.has_edge(0, 4));
    }

    #[test]
    fn blowup_vertex_counts() {
        for b in 2..=6 {
            for c in 1..b {
                assert_eq!(blowup(b, c).unwrap().n(), 1 << (b - 1), "b={b} c={c}");
            }
        }
    }

    #[test]
    fn blowup_rejects_bad_params() {
        assert!(blowup(2, 2).is_err());
        assert!(blowup(3, 0).is_err());
    }

    #[test]
    fn clique_3() {
        assert_eq!(clique(3).edge_count(), 3);
    }

    #[test]
    fn random_is_deterministic_and_witnessed() {
        let a = random_bounded_pw(12, 3, 0.6, 7).unwrap();
        let b = random_bounded_pw(12, 3, 0.6, 7).unwrap();
        assert_eq!(a.graph.to_edge_list(), b.graph.to_edge_list());
        let pd = a.witness.unwrap();
        assert!(pd.validate(&a.graph).unwrap() <= 2);
    }

    #[test]
    fn random_rejects_bad_params() {
        assert!(random_bounded_pw(3, 0, 0.5, 0).is_err());
        assert!(random_bounded_pw(3, 4, 0.5, 0).is_err());
        assert!(random_bounded_pw(3, 2, 1.5, 0).is_err());
    }

    #[test]
    fn family_names() {
        let f = Family::from_name("blowup", None, None, Some(4), Some(2), None).unwrap();
        assert_eq!(f, Family::Blowup { b: 4, c: 2 });
        assert!(matches!(
            Family::from_name("grid", Some(3), None, None, None, None),
            Err(GenerateError::UnknownFamily(_))
        ));
        assert!(Family::from_name("path", None, None, None, None, None).is_err());
    }
}
