use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use pathdepth::builder::{build, AuditLevel, BuildError, BuildOptions};
use pathdepth::corpus::{run_corpus, CorpusConfig};
use pathdepth::decomposition::PathDecomposition;
use pathdepth::forest::EliminationForest;
use pathdepth::generate::{generate, Family};
use pathdepth::graph::Graph;
use pathdepth::linkage::{check_linked, make_linked};
use pathdepth::oracles::{exact_pathwidth, exact_treedepth, longest_path_order, ORACLE_LIMIT};

/// Exit status for a breached precondition (bad `b`, unlinked input).
const EXIT_PRECONDITION: u8 = 2;

#[derive(Parser)]
#[command(
    name = "pathdepth",
    version,
    about = "Elimination forests of bounded height from linked path decompositions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a graph from a named family as an edge list.
    Generate(GenerateArgs),
    /// Exact treedepth, pathwidth and longest path of a small graph.
    Oracle(OracleArgs),
    /// Check a path decomposition for linkedness and repair it.
    Link(LinkArgs),
    /// Build an elimination forest and its audit trace.
    Build(BuildArgs),
    /// Validate a path decomposition or an elimination forest.
    Verify(VerifyArgs),
    /// Run a seeded corpus and report one row per graph.
    Corpus(CorpusArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// path, cycle, clique, empty, blowup or random-pw
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    a: Option<usize>,
    #[arg(long)]
    b: Option<u32>,
    #[arg(long)]
    c: Option<u32>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the family's path decomposition, if it has one.
    #[arg(long)]
    witness: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = GraphFormat::Edges)]
    format: GraphFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Edges,
    Dot,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Write the optimal path decomposition here.
    #[arg(long)]
    pd_out: Option<PathBuf>,
    /// Write the optimal elimination forest here.
    #[arg(long)]
    forest_out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct LinkArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    pd: PathBuf,
    /// Where to write the linked decomposition; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Only report violations; exit with status 2 if there are any.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    graph: PathBuf,
    /// A path decomposition file, or `auto` for a linked optimal one.
    #[arg(long, default_value = "auto")]
    pd: String,
    /// An integer, or `auto` for the smallest b with no 2^b-vertex path.
    #[arg(long, default_value = "auto")]
    b: String,
    /// Repair a supplied decomposition before building.
    #[arg(long)]
    link: bool,
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Where to write the forest; stdout when absent.
    #[arg(long)]
    forest: Option<PathBuf>,
    #[arg(long)]
    dot: Option<PathBuf>,
    #[arg(long, default_value = "final")]
    audit: AuditLevel,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, required_unless_present = "forest")]
    pd: Option<PathBuf>,
    #[arg(long)]
    forest: Option<PathBuf>,
    /// Also require the decomposition to be linked.
    #[arg(long)]
    linked: bool,
}

#[derive(Args)]
struct CorpusArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "random-pw")]
    family: String,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 12)]
    n_max: usize,
    #[arg(long, default_value_t = 3)]
    a: usize,
    #[arg(long)]
    b: Option<u32>,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Write the rows as JSON lines here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "final")]
    audit: AuditLevel,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_graph(path: &Path) -> Result<Graph> {
    Graph::parse(&read(path)?).with_context(|| format!("parsing graph {}", path.display()))
}

fn load_pd(path: &Path) -> Result<PathDecomposition> {
    PathDecomposition::parse(&read(path)?)
        .with_context(|| format!("parsing decomposition {}", path.display()))
}

/// Failures the caller should see as a precondition breach.
#[derive(Debug)]
struct Precondition(String);

impl std::fmt::Display for Precondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Precondition {}

fn precondition(msg: impl Into<String>) -> anyhow::Error {
    Precondition(msg.into()).into()
}

fn cmd_generate(args: GenerateArgs) -> Result<u8> {
    let family = Family::from_name(&args.family, args.n, args.a, args.b, args.c, args.p)?;
    let generated = generate(&family, args.seed)?;
    let text = match args.format {
        GraphFormat::Edges => generated.graph.to_edge_list(),
        GraphFormat::Dot => generated.graph.to_dot(),
    };
    write_or_print(args.out.as_deref(), &text)?;
    if let Some(path) = &args.witness {
        let Some(pd) = &generated.witness else {
            bail!("family {} has no witness decomposition", family.name());
        };
        write_or_print(Some(path), &pd.to_text())?;
    }
    Ok(0)
}

fn cmd_oracle(args: OracleArgs) -> Result<u8> {
    let g = load_graph(&args.graph)?;
    if g.n() > ORACLE_LIMIT {
        return Err(precondition(format!(
            "graph has {} vertices; oracles accept at most {ORACLE_LIMIT}",
            g.n()
        )));
    }
    let td = exact_treedepth(&g)?;
    let pw = exact_pathwidth(&g)?;
    let lp = longest_path_order(&g)?;
    if args.json {
        let doc = json!({
            "n": g.n(),
            "edges": g.edge_count(),
            "treedepth": td.value,
            "pathwidth": pw.value,
            "longest_path": lp.value,
            "longest_path_vertices": lp.path,
            "min_b": lp.min_b,
        });
        println!("{doc}");
    } else {
        println!("n {}", g.n());
        println!("treedepth {}", td.value);
        println!("pathwidth {}", pw.value);
        println!("longest_path {}", lp.value);
        println!("min_b {}", lp.min_b);
    }
    if let Some(p) = &args.pd_out {
        write_or_print(Some(p), &pw.witness.to_text())?;
    }
    if let Some(p) = &args.forest_out {
        write_or_print(Some(p), &td.witness.to_text())?;
    }
    Ok(0)
}

fn cmd_link(args: LinkArgs) -> Result<u8> {
    let g = load_graph(&args.graph)?;
    let pd = load_pd(&args.pd)?;
    if let Err(v) = pd.validate(&g) {
        let list: Vec<String> = v.iter().map(ToString::to_string).collect();
        return Err(precondition(format!(
            "not a path decomposition: {}",
            list.join("; ")
        )));
    }
    if args.check {
        let report = check_linked(&g, &pd);
        for v in &report.violations {
            println!(
                "violation nodes {}..{}: need {}, flow {}, cut {:?}",
                v.left, v.right, v.required, v.achieved, v.cut
            );
        }
        println!(
            "{} pairs checked, {} violations",
            report.pairs.len(),
            report.violations.len()
        );
        return Ok(if report.is_linked() {
            0
        } else {
            EXIT_PRECONDITION
        });
    }
    let out = make_linked(&g, &pd)?;
    eprintln!(
        "width {} -> {}, {} repair steps",
        pd.width(),
        out.decomposition.width(),
        out.iterations
    );
    write_or_print(args.out.as_deref(), &out.decomposition.to_text())?;
    Ok(0)
}

fn cmd_build(args: BuildArgs) -> Result<u8> {
    let g = load_graph(&args.graph)?;
    let small = g.n() <= ORACLE_LIMIT;
    let pd = if args.pd == "auto" {
        if !small {
            return Err(precondition(format!(
                "--pd auto needs at most {ORACLE_LIMIT} vertices, graph has {}",
                g.n()
            )));
        }
        make_linked(&g, &exact_pathwidth(&g)?.witness)?.decomposition
    } else {
        let pd = load_pd(Path::new(&args.pd))?;
        if args.link {
            if let Err(v) = pd.validate(&g) {
                return Err(precondition(format!(
                    "not a path decomposition ({} violations)",
                    v.len()
                )));
            }
            make_linked(&g, &pd)?.decomposition
        } else {
            pd
        }
    };
    let b = if args.b == "auto" {
        if !small {
            return Err(precondition(format!(
                "--b auto needs at most {ORACLE_LIMIT} vertices"
            )));
        }
        longest_path_order(&g)?.min_b
    } else {
        args.b
            .parse()
            .with_context(|| format!("--b expects an integer or auto, got {}", args.b))?
    };

    let options = BuildOptions {
        audit: args.audit,
        check_paths: true,
    };
    let out = match build(&g, &pd, b, options) {
        Ok(out) => out,
        Err(e) => {
            if let (BuildError::Invariant { trace, .. }, Some(path)) = (&e, &args.trace) {
                write_or_print(Some(path), &trace.to_json())?;
            }
            eprintln!("error: {e}");
            return Ok(e.exit_code() as u8);
        }
    };
    if let Some(path) = &args.trace {
        write_or_print(Some(path), &out.trace.to_json())?;
    }
    if let Some(path) = &args.dot {
        write_or_print(Some(path), &out.forest.to_dot())?;
    }
    write_or_print(args.forest.as_deref(), &out.forest.to_text())?;
    let a = out.trace.a;
    eprintln!(
        "n {} a {a} b {b} height {} bound {} rounds {}{}",
        g.n(),
        out.forest.height().expect("built forest is acyclic"),
        10 * a * b as usize,
        out.trace.rounds.len(),
        if out.trace.easy_case {
            " (depth-first forest)"
        } else {
            ""
        }
    );
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8> {
    let g = load_graph(&args.graph)?;
    let mut ok = true;
    if let Some(path) = &args.pd {
        let pd = load_pd(path)?;
        match pd.validate(&g) {
            Ok(w) => println!("path decomposition valid, width {w}"),
            Err(v) => {
                ok = false;
                for x in v {
                    println!("violation: {x}");
                }
            }
        }
        if ok && args.linked {
            let report = check_linked(&g, &pd);
            ok = report.is_linked();
            println!("linked: {}", if ok { "yes" } else { "no" });
        }
    }
    if let Some(path) = &args.forest {
        let f = EliminationForest::parse(&read(path)?)
            .with_context(|| format!("parsing forest {}", path.display()))?;
        match f.validate(&g) {
            Ok(h) => println!("elimination forest valid, height {h}"),
            Err(e) => {
                ok = false;
                println!("violation: {e}");
            }
        }
    }
    Ok(if ok { 0 } else { 1 })
}

fn cmd_corpus(args: CorpusArgs) -> Result<u8> {
    let cfg = CorpusConfig {
        seed: args.seed,
        family: args.family,
        count: args.count,
        n_max: args.n_max,
        a: args.a,
        b: args.b,
        p: args.p,
        audit: args.audit,
    };
    let report = run_corpus(&cfg)?;
    if let Some(path) = &args.out {
        write_or_print(Some(path), &report.to_json_lines())?;
    }
    print!("{}", report.to_table());
    Ok(if report.all_ok() { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Link(a) => cmd_link(a),
        Command::Build(a) => cmd_build(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Corpus(a) => cmd_corpus(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Precondition>().is_some() {
                ExitCode::from(EXIT_PRECONDITION)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
