#![no_main]

//! Input: an edge list, a line `---`, then a path decomposition.

use libfuzzer_sys::fuzz_target;
use pathdepth::builder::{build, AuditLevel, BuildError};
use pathdepth::decomposition::PathDecomposition;
use pathdepth::graph::Graph;
use pathdepth::linkage::make_linked;
use pathdepth::oracles::longest_path_order;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Some((graph, pd)) = text.split_once("\n---\n") else { return };
    let (Ok(g), Ok(pd)) = (Graph::parse(graph), PathDecomposition::parse(pd)) else { return };
    if g.n() > 12 || pd.len() > 40 || pd.validate(&g).is_err() {
        return;
    }
    let linked = make_linked(&g, &pd).expect("repair succeeds on valid input").decomposition;
    assert!(linked.width() <= pd.width());
    let b = longest_path_order(&g).expect("small graph").min_b;
    match build(&g, &linked, b, AuditLevel::PerRound) {
        Ok(out) => {
            let h = out.forest.validate(&g).expect("forest is valid");
            assert!(h <= 10 * linked.max_bag_size() * b as usize);
        }
        Err(e @ BuildError::Invariant { .. }) => panic!("{e}"),
        Err(BuildError::Precondition(_)) => {}
    }
});
