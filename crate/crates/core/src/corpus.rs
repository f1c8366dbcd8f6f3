//! Seeded experiment runs: generate graphs, link an optimal decomposition,
//! build, and compare against the exact oracles.
//!
//! Row seeds are drawn from `ChaCha8Rng::seed_from_u64(config.seed)`: for
//! each random row one `next_u64` (the row seed) followed by one
//! `gen_range` for the vertex count. Rows run in parallel; the report keeps
//! row order.

use std::fmt::Write as _;

use num_bigint::BigUint;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::builder::{build, sharp_height_bound, AuditLevel, BuildError, BuildTrace};
use crate::generate::{generate, Family, GenerateError};
use crate::graph::Graph;
use crate::linkage::make_linked;
use crate::oracles::{exact_pathwidth, exact_treedepth, longest_path_order, ORACLE_LIMIT};

/// Largest graph on which rows compute the exact treedepth.
pub const TREEDEPTH_ROW_LIMIT: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusConfig {
    pub seed: u64,
    /// `random-pw`, `blowup`, `path`, `cycle`, `clique` or `empty`.
    pub family: String,
    /// Rows for `random-pw`; the other families sweep their parameters.
    pub count: usize,
    pub n_max: usize,
    /// Window size for `random-pw`.
    pub a: usize,
    /// Fixed `b` for every build; the smallest admissible `b` otherwise.
    pub b: Option<u32>,
    pub p: f64,
    pub audit: AuditLevel,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            seed: 0,
            family: "random-pw".into(),
            count: 10,
            n_max: 12,
            a: 3,
            b: None,
            p: 0.5,
            audit: AuditLevel::Final,
        }
    }
}

/// What a failing row needs to be rerun on its own.
#[derive(Clone, Debug, Serialize)]
pub struct Replay {
    pub graph: String,
    pub decomposition: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Box<BuildTrace>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorpusRow {
    pub index: usize,
    pub family: String,
    pub seed: u64,
    pub params: String,
    pub n: usize,
    pub edges: usize,
    pub a: Option<usize>,
    pub b: Option<u32>,
    pub pw: Option<usize>,
    pub td_exact: Option<usize>,
    pub longest_path: Option<usize>,
    pub height: Option<usize>,
    pub bound: Option<usize>,
    pub sharp_bound_ok: Option<bool>,
    pub easy_case: Option<bool>,
    pub rounds: Option<usize>,
    pub repair_steps: Option<usize>,
    pub audits_passed: bool,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replay: Option<Replay>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CorpusReport {
    pub rows: Vec<CorpusRow>,
}

impl CorpusReport {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.ok)
    }

    /// One JSON object per row.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            out.push_str(&serde_json::to_string(row).expect("row serializes"));
            out.push('\n');
        }
        out
    }

    pub fn to_table(&self) -> String {
        let show = |v: Option<usize>| v.map_or("-".to_string(), |v| v.to_string());
        let mut out = String::new();
        writeln!(
            out,
            "{:>4} {:<10} {:<12} {:>3} {:>3} {:>3} {:>3} {:>4} {:>6} {:>5} {:>4}",
            "row", "family", "params", "n", "a", "b", "pw", "td", "height", "10ab", "ok"
        )
        .unwrap();
        for r in &self.rows {
            writeln!(
                out,
                "{:>4} {:<10} {:<12} {:>3} {:>3} {:>3} {:>3} {:>4} {:>6} {:>5} {:>4}",
                r.index,
                r.family,
                r.params,
                r.n,
                show(r.a),
                show(r.b.map(|b| b as usize)),
                show(r.pw),
                show(r.td_exact),
                show(r.height),
                show(r.bound),
                if r.ok { "yes" } else { "NO" }
            )
            .unwrap();
        }
        let failed = self.rows.iter().filter(|r| !r.ok).count();
        writeln!(out, "{} rows, {} failed", self.rows.len(), failed).unwrap();
        out
    }
}

struct RowSpec {
    family: Family,
    seed: u64,
    params: String,
}

fn row_specs(cfg: &CorpusConfig) -> Result<Vec<RowSpec>, GenerateError> {
    let mut specs = Vec::new();
    match cfg.family.as_str() {
        "random-pw" | "random_bounded_pw" => {
            if cfg.a == 0 || cfg.a > cfg.n_max {
                return Err(GenerateError::InvalidParameters(format!(
                    "random-pw needs 1 <= a <= n-max, got a={}, n-max={}",
                    cfg.a, cfg.n_max
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            for _ in 0..cfg.count {
                let seed = rng.next_u64();
                let n = rng.gen_range(cfg.a..=cfg.n_max);
                specs.push(RowSpec {
                    family: Family::RandomBoundedPw {
                        n,
                        a: cfg.a,
                        p: cfg.p,
                    },
                    seed,
                    params: format!("n={n},a={}", cfg.a),
                });
            }
        }
        "blowup" => {
            for b in 2u32.. {
                if 1usize << (b - 1) > cfg.n_max {
                    break;
                }
                for c in 1..b {
                    specs.push(RowSpec {
                        family: Family::Blowup { b, c },
                        seed: cfg.seed,
                        params: format!("b={b},c={c}"),
                    });
                }
            }
        }
        name => {
            let first = if name == "cycle" { 3 } else { 1 };
            for n in first..=cfg.n_max {
                specs.push(RowSpec {
                    family: Family::from_name(name, Some(n), None, None, None, None)?,
                    seed: cfg.seed,
                    params: format!("n={n}"),
                });
            }
        }
    }
    Ok(specs)
}

fn run_row(index: usize, spec: &RowSpec, cfg: &CorpusConfig) -> CorpusRow {
    let mut row = CorpusRow {
        index,
        family: spec.family.name().to_string(),
        seed: spec.seed,
        params: spec.params.clone(),
        n: 0,
        edges: 0,
        a: None,
        b: None,
        pw: None,
        td_exact: None,
        longest_path: None,
        height: None,
        bound: None,
        sharp_bound_ok: None,
        easy_case: None,
        rounds: None,
        repair_steps: None,
        audits_passed: false,
        ok: false,
        error: None,
        replay: None,
    };
    let generated = match generate(&spec.family, spec.seed) {
        Ok(g) => g,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    let g = generated.graph;
    row.n = g.n();
    row.edges = g.edge_count();
    let fail = |mut row: CorpusRow,
                g: &Graph,
                pd: Option<String>,
                msg: String,
                trace: Option<Box<BuildTrace>>| {
        row.error = Some(msg);
        row.replay = Some(Replay {
            graph: g.to_edge_list(),
            decomposition: pd,
            trace,
        });
        row
    };

    let small = g.n() <= ORACLE_LIMIT;
    let start = if small {
        let opt = exact_pathwidth(&g).expect("within oracle limit");
        row.pw = Some(opt.value);
        opt.witness
    } else if let Some(w) = generated.witness {
        w
    } else {
        return fail(
            row,
            &g,
            None,
            "graph too large for the oracles and has no witness".into(),
            None,
        );
    };
    if small && g.n() <= TREEDEPTH_ROW_LIMIT {
        row.td_exact = Some(exact_treedepth(&g).expect("within oracle limit").value);
    }
    if small {
        row.longest_path = Some(longest_path_order(&g).expect("within oracle limit").value);
    }
    let linked = match make_linked(&g, &start) {
        Ok(out) => out,
        Err(e) => return fail(row, &g, Some(start.to_text()), e.to_string(), None),
    };
    row.repair_steps = Some(linked.iterations);
    let pd = linked.decomposition;
    let a = pd.max_bag_size();
    row.a = Some(a);
    let b = match cfg.b {
        Some(b) => b,
        None => match longest_path_order(&g) {
            Ok(lp) => lp.min_b,
            Err(_) => {
                return fail(
                    row,
                    &g,
                    Some(pd.to_text()),
                    "b is required above the oracle limit".into(),
                    None,
                )
            }
        },
    };
    row.b = Some(b);
    row.bound = Some(10 * a * b as usize);

    let out = match build(&g, &pd, b, cfg.audit) {
        Ok(out) => out,
        Err(e) => {
            let trace = match &e {
                BuildError::Invariant { trace, .. } => Some(trace.clone()),
                BuildError::Precondition(_) => None,
            };
            return fail(row, &g, Some(pd.to_text()), e.to_string(), trace);
        }
    };
    let height = out.forest.validate(&g);
    row.easy_case = Some(out.trace.easy_case);
    row.rounds = Some(out.trace.rounds.len());
    row.audits_passed = out.trace.all_passed();
    let height = match height {
        Ok(h) => h,
        Err(e) => {
            return fail(
                row,
                &g,
                Some(pd.to_text()),
                format!("invalid forest: {e}"),
                None,
            )
        }
    };
    row.height = Some(height);
    let sharp = BigUint::from(1u32) << height <= sharp_height_bound(a, b);
    row.sharp_bound_ok = Some(sharp);
    let within = height <= 10 * a * b as usize;
    let above_td = row.td_exact.is_none_or(|td| td <= height);
    if !(within && sharp && above_td && row.audits_passed) {
        let msg = format!(
            "height {height}: within 10ab {within}, sharp bound {sharp}, at least td {above_td}"
        );
        let trace = Some(Box::new(out.trace));
        return fail(row, &g, Some(pd.to_text()), msg, trace);
    }
    row.ok = true;
    row
}

/// Runs every row of the configured corpus. Fails only on bad parameters;
/// failing rows are reported with `ok = false`.
pub fn run_corpus(cfg: &CorpusConfig) -> Result<CorpusReport, GenerateError> {
    let specs = row_specs(cfg)?;
    let rows = specs
        .par_iter()
        .enumerate()
        .map(|(i, spec)| run_row(i, spec, cfg))
        .collect();
    Ok(CorpusReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_corpus() {
        let cfg = CorpusConfig {
            count: 0,
            ..CorpusConfig::default()
        };
        let report = run_corpus(&cfg).unwrap();
        assert!(report.rows.is_empty());
        assert!(report.all_ok());
        assert_eq!(report.to_json_lines(), "");
    }

    #[test]
    fn small_random_corpus() {
        let cfg = CorpusConfig {
            seed: 7,
            count: 12,
            n_max: 9,
            a: 3,
            audit: AuditLevel::PerRound,
            ..CorpusConfig::default()
        };
        let report = run_corpus(&cfg).unwrap();
        assert_eq!(report.rows.len(), 12);
        for row in &report.rows {
            assert!(row.ok, "{row:?}");
            assert!(row.td_exact.unwrap() <= row.height.unwrap());
        }
        assert_eq!(
            report.to_json_lines(),
            run_corpus(&cfg).unwrap().to_json_lines()
        );
    }

    #[test]
    fn blowup_sweep_respects_n_max() {
        let cfg = CorpusConfig {
            family: "blowup".into(),
            n_max: 8,
            ..CorpusConfig::default()
        };
        let report = run_corpus(&cfg).unwrap();
        // b = 2, 3, 4 with c < b
        assert_eq!(report.rows.len(), 1 + 2 + 3);
        assert!(report.all_ok(), "{}", report.to_table());
    }

    #[test]
    fn too_small_b_fails_rows() {
        let cfg = CorpusConfig {
            family: "path".into(),
            n_max: 5,
            b: Some(2),
            ..CorpusConfig::default()
        };
        let report = run_corpus(&cfg).unwrap();
        assert!(report.rows[..3].iter().all(|r| r.ok));
        assert!(report.rows[3..].iter().all(|r| !r.ok && r.replay.is_some()));
    }

    #[test]
    fn bad_parameters() {
        let cfg = CorpusConfig {
            a: 20,
            n_max: 5,
            ..CorpusConfig::default()
        };
        assert!(run_corpus(&cfg).is_err());
        let cfg = CorpusConfig {
            family: "hypercube".into(),
            ..CorpusConfig::default()
        };
        assert!(run_corpus(&cfg).is_err());
    }
}
