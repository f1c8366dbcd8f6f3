//! Unit vertex-capacity max flow on the split digraph.
//!
//! Each allowed vertex `v` becomes `v_in -> v_out` with capacity 1, each
//! graph edge `uv` becomes `u_out -> v_in` and `v_out -> u_in`. Augmenting
//! paths are found by BFS; every node scans its arcs in order of target id,
//! so results depend only on the input.

use std::collections::VecDeque;

use crate::graph::Graph;

pub(crate) struct FlowResult {
    pub value: usize,
    /// Vertex-disjoint A-B paths, one per unit of flow.
    pub paths: Vec<Vec<usize>>,
    /// Minimum vertex cut when `value` fell short of the requested limit.
    pub cut: Option<Vec<usize>>,
}

struct Network {
    /// arc `e` and its reverse `e ^ 1`
    to: Vec<usize>,
    cap: Vec<u32>,
    base: Vec<u32>,
    out: Vec<Vec<usize>>,
}

/// Only the `v_in -> v_out` arcs are finite, so every minimum cut is a
/// vertex cut.
const INF: u32 = u32::MAX / 2;

impl Network {
    fn new(nodes: usize) -> Self {
        Network {
            to: Vec::new(),
            cap: Vec::new(),
            base: Vec::new(),
            out: vec![Vec::new(); nodes],
        }
    }

    fn arc(&mut self, from: usize, to: usize, cap: u32) {
        let e = self.to.len();
        self.to.push(to);
        self.cap.push(cap);
        self.base.push(cap);
        self.out[from].push(e);
        self.to.push(from);
        self.cap.push(0);
        self.base.push(0);
        self.out[to].push(e + 1);
    }

    fn sort_arcs(&mut self) {
        let to = &self.to;
        for list in &mut self.out {
            list.sort_by_key(|&e| (to[e], e));
        }
    }

    /// BFS from `s`; returns the arc used to reach each node.
    fn bfs(&self, s: usize) -> Vec<Option<usize>> {
        let mut via = vec![None; self.out.len()];
        let mut seen = vec![false; self.out.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &e in &self.out[x] {
                let y = self.to[e];
                if self.cap[e] > 0 && !seen[y] {
                    seen[y] = true;
                    via[y] = Some(e);
                    queue.push_back(y);
                }
            }
        }
        via
    }
}

fn node_in(v: usize) -> usize {
    2 * v
}

fn node_out(v: usize) -> usize {
    2 * v + 1
}

/// Pushes up to `limit` units of flow from `sources` to `sinks` inside the
/// vertices marked in `allowed`.
pub(crate) fn max_flow(
    g: &Graph,
    sources: &[usize],
    sinks: &[usize],
    limit: usize,
    allowed: &[bool],
) -> FlowResult {
    let n = g.n();
    let s = 2 * n;
    let t = 2 * n + 1;
    let mut net = Network::new(2 * n + 2);
    for v in g.vertices().filter(|&v| allowed[v]) {
        net.arc(node_in(v), node_out(v), 1);
        for &w in g.neighbors(v) {
            if allowed[w] {
                net.arc(node_out(v), node_in(w), INF);
            }
        }
    }
    for &a in sources {
        net.arc(s, node_in(a), INF);
    }
    for &b in sinks {
        net.arc(node_out(b), t, INF);
    }
    net.sort_arcs();

    let mut value = 0;
    let mut last_bfs = None;
    while value < limit {
        let via = net.bfs(s);
        if via[t].is_none() {
            last_bfs = Some(via);
            break;
        }
        let mut y = t;
        while y != s {
            let e = via[y].expect("augmenting path");
            net.cap[e] -= 1;
            net.cap[e ^ 1] += 1;
            y = net.to[e ^ 1];
        }
        value += 1;
    }

    let cut = last_bfs.map(|via| {
        let reached = |x: usize| x == s || via[x].is_some();
        g.vertices()
            .filter(|&v| allowed[v] && reached(node_in(v)) && !reached(node_out(v)))
            .collect()
    });

    let carries = |e: usize| e.is_multiple_of(2) && net.cap[e] < net.base[e];
    let mut paths = Vec::with_capacity(value);
    for &e in &net.out[s] {
        if !carries(e) {
            continue;
        }
        let mut v = net.to[e] / 2;
        let mut path = vec![v];
        loop {
            let next = net.out[node_out(v)]
                .iter()
                .copied()
                .find(|&f| carries(f))
                .expect("flow is conserved");
            let y = net.to[next];
            if y == t {
                break;
            }
            v = y / 2;
            path.push(v);
        }
        paths.push(path);
    }
    paths.sort();
    FlowResult { value, paths, cut }
}
