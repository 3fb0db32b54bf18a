use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bibound::exact::{self, verify_gadget_equivalence};
use bibound::groups::{self, FiniteGroup};
use bibound::report::{bipartite_report, general_report, BoundReport, ReportConfig, ALL_IDS};
use bibound::verify::{run_suite, VerifyConfig, SUITES};
use bibound::{half_size_reduction, hardness_gadget, AnyGraph, Error, Graph};
use bibound::{bipartite_double, extended_bipartite_double};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

mod family;
mod output;
mod tables;

use output::{fraction, sig7, Cell, Table};

/// Bounds on biindependent pairs in bipartite graphs.
#[derive(Parser)]
#[command(name = "bibound", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute bounds for one graph and check the inequalities among them.
    Bounds(BoundsArgs),
    /// Run a property suite on built-in and seeded random instances.
    Verify(VerifyArgs),
    /// Print closed-form and computed values for an example family.
    Table(TableArgs),
    /// Emit a reduction graph as JSON.
    Gadget(GadgetArgs),
    /// Product-free sets and Cayley graphs of a finite group.
    Group(GroupArgs),
}

#[derive(Args)]
struct Input {
    /// Graph file (JSON, `{"type": "bipartite", "n1", "n2", "edges"}` or
    /// `{"type": "general", "n", "edges"}`).
    #[arg(long, conflicts_with = "family")]
    graph: Option<PathBuf>,
    /// Family spec such as `crown:5`, `hypercube:4`, `cayley:z5:2,3`.
    #[arg(long)]
    family: Option<String>,
}

impl Input {
    fn load(&self) -> Result<AnyGraph, Error> {
        match (&self.graph, &self.family) {
            (Some(p), None) => AnyGraph::from_json(&read(p)?),
            (None, Some(spec)) => family::parse(spec),
            _ => Err(Error::Parse("pass exactly one of --graph or --family".into())),
        }
    }
}

#[derive(Args)]
struct Common {
    /// Tolerance for comparisons between computed values.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Largest number of maximal independent sets enumerated per graph.
    #[arg(long, default_value_t = exact::DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct Format {
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    input: Input,
    /// Bound identifier; repeat for several.
    #[arg(long = "bound", value_parser = clap::builder::PossibleValuesParser::new(ALL_IDS))]
    bounds: Vec<String>,
    /// Every bound (the default when no --bound is given).
    #[arg(long, conflicts_with = "bounds")]
    all: bool,
    #[command(flatten)]
    format: Format,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name, or `all`.
    #[arg(value_parser = suite_names())]
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random instances per randomized check.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    common: Common,
}

fn suite_names() -> clap::builder::PossibleValuesParser {
    let mut names: Vec<&'static str> = SUITES.to_vec();
    names.push("all");
    clap::builder::PossibleValuesParser::new(names)
}

#[derive(Args)]
struct TableArgs {
    family: tables::Family,
    /// First size (default depends on the family).
    #[arg(long)]
    from: Option<usize>,
    /// Last size, inclusive.
    #[arg(long)]
    to: Option<usize>,
    #[command(flatten)]
    format: Format,
    #[arg(long, default_value_t = exact::DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum GadgetKind {
    /// Bipartite graph whose balanced and unbalanced independence numbers
    /// agree iff the input has a half-size clique.
    Hardness,
    /// General graph meeting the edge-count condition, with a half-size
    /// clique iff the input has a clique of half its size.
    HalfSize,
    /// Bipartite double.
    Double,
    /// Extended bipartite double.
    Xdouble,
}

#[derive(Args)]
struct GadgetArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, default_value = "hardness")]
    kind: GadgetKind,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// For `hardness`: also decide both sides of the equivalence.
    #[arg(long)]
    check: bool,
    #[arg(long, default_value_t = exact::DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct GroupArgs {
    /// Built-in group: zN, zAxzB, sK (K <= 4), dN.
    #[arg(long, conflicts_with = "table")]
    group: Option<String>,
    /// Group file (`{"order": n, "table": [[...]]}`).
    #[arg(long)]
    table: Option<PathBuf>,
    /// Subset to test, as comma-separated element indices.
    #[arg(long, value_delimiter = ',')]
    set: Option<Vec<usize>>,
    /// Minimum dimension of a nontrivial representation (1 for abelian
    /// groups and for symmetric groups).
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Largest order searched exhaustively for a product-free set.
    #[arg(long, default_value_t = groups::DEFAULT_ORDER_CAP)]
    cap: usize,
    /// Write the multiplication table as JSON.
    #[arg(long)]
    emit: Option<PathBuf>,
    /// Write the bipartite Cayley graph of --set as JSON.
    #[arg(long, requires = "set")]
    cayley: Option<PathBuf>,
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

/// Failure carrying its exit code.
enum Fail {
    Validation(String),
    Error(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Error(e)
    }
}

fn read(p: &Path) -> Result<String, Error> {
    std::fs::read_to_string(p).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))
}

fn write(p: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(p, text).map_err(|e| Error::InvalidParameter(format!("{}: {e}", p.display())))
}

fn kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidGraph(_) => "invalid_graph",
        Error::InvalidParameter(_) => "invalid_parameter",
        Error::Parse(_) => "parse",
        Error::NotApplicable(_) => "not_applicable",
        Error::Budget(_) => "budget",
        Error::Solver(_) => "solver",
        Error::Infeasible(_) => "infeasible",
        Error::Precondition(_) => "precondition",
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Budget(_) => 3,
        Error::Solver(_) | Error::Infeasible(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let r = match cli.command {
        Command::Bounds(a) => bounds(a),
        Command::Verify(a) => verify(a),
        Command::Table(a) => table(a),
        Command::Gadget(a) => gadget(a),
        Command::Group(a) => group(a),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Validation(msg)) => {
            eprintln!("{}", json!({ "error": "validation", "message": msg }));
            ExitCode::from(1)
        }
        Err(Fail::Error(e)) => {
            eprintln!("{}", json!({ "error": kind(&e), "message": e.to_string() }));
            ExitCode::from(exit_code(&e))
        }
    }
}

fn bounds(a: BoundsArgs) -> Result<(), Fail> {
    let g = a.input.load()?;
    let explicit = !a.all && !a.bounds.is_empty();
    let ids: Vec<&str> = if explicit { a.bounds.iter().map(String::as_str).collect() } else { ALL_IDS.to_vec() };
    let cfg = ReportConfig { budget: a.common.budget, slack: a.common.tol, ..ReportConfig::default() };
    let rep = match &g {
        AnyGraph::Bipartite(b) => bipartite_report(b, &ids, &cfg)?,
        AnyGraph::General(h) => general_report(h, &ids, &cfg)?,
    };
    if a.format.json {
        println!("{}", serde_json::to_string_pretty(&rep).expect("report serializes"));
    } else {
        let t = report_table(&rep);
        print!("{}", if a.format.csv { t.csv() } else { t.pretty() });
    }
    // An explicitly requested bound that could not be computed is an input
    // error; under --all it is just shown as missing.
    if explicit {
        if let Some((id, e)) = rep.entries.iter().find(|(_, e)| e.value.is_none()) {
            let msg = format!("{id}: {}", e.status.trim_start_matches("not applicable: "));
            return Err(Fail::Error(if e.status.starts_with("enumeration budget") {
                Error::Budget(a.common.budget)
            } else {
                Error::NotApplicable(msg)
            }));
        }
    }
    let bad = rep.violations();
    if !bad.is_empty() {
        let list: Vec<String> =
            bad.iter().map(|c| format!("{} ({} vs {})", c.relation, sig7(c.lhs), sig7(c.rhs))).collect();
        return Err(Fail::Validation(format!("violated: {}", list.join("; "))));
    }
    Ok(())
}

fn report_table(rep: &BoundReport) -> Table {
    let mut t = Table::new(rep.graph.clone(), &["bound", "value", "exact", "method", "status", "ms"]);
    for id in ALL_IDS {
        let Some(e) = rep.entries.get(id) else { continue };
        let method = serde_json::to_value(e.method).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        t.rows.push(vec![
            Cell::Text(id.into()),
            Cell::opt(e.value),
            e.exact.map_or(Cell::Missing, |f| Cell::Text(fraction(&bibound::Rational::new(f.num, f.den)))),
            Cell::Text(method),
            Cell::Text(e.status.clone()),
            Cell::Text(format!("{:.1}", e.runtime_ms)),
        ]);
    }
    t
}

fn verify(a: VerifyArgs) -> Result<(), Fail> {
    let cfg = VerifyConfig {
        seed: a.seed,
        budget: a.common.budget,
        tol: a.common.tol,
        samples: a.samples,
        ..VerifyConfig::default()
    };
    let names: Vec<&str> = if a.suite == "all" { SUITES.to_vec() } else { vec![a.suite.as_str()] };
    let mut reports = Vec::new();
    for name in names {
        let start = std::time::Instant::now();
        let r = run_suite(name, &cfg)?;
        if !a.json {
            let verdict = if r.passed() { "PASS" } else { "FAIL" };
            println!(
                "{verdict} {name}: {} checks, {} failures ({:.1} s)",
                r.checks,
                r.failures.len(),
                start.elapsed().as_secs_f64()
            );
            for f in r.failures.iter().take(20) {
                println!("  {} | {} | {}", f.case, f.check, f.detail);
            }
            if r.failures.len() > 20 {
                println!("  ... {} more", r.failures.len() - 20);
            }
        }
        reports.push(r);
    }
    if a.json {
        println!("{}", serde_json::to_string_pretty(&reports).expect("suite reports serialize"));
    }
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed()).map(|r| r.suite.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Fail::Validation(format!("failing suites: {}", failed.join(", "))))
    }
}

fn table(a: TableArgs) -> Result<(), Fail> {
    let (lo, hi) = a.family.default_range();
    let (from, to) = (a.from.unwrap_or(lo), a.to.unwrap_or(hi.max(a.from.unwrap_or(lo))));
    let t = tables::build(a.family, from, to, &bibound_sdp::SolverConfig::default(), a.budget)?;
    if a.format.json {
        println!("{}", serde_json::to_string_pretty(&t).expect("table serializes"));
    } else {
        print!("{}", if a.format.csv { t.csv() } else { t.pretty() });
    }
    Ok(())
}

fn general(g: AnyGraph) -> Graph {
    match g {
        AnyGraph::General(g) => g,
        AnyGraph::Bipartite(b) => b.flatten(),
    }
}

fn gadget(a: GadgetArgs) -> Result<(), Fail> {
    let g = general(a.input.load()?);
    let out = match a.kind {
        GadgetKind::Hardness => AnyGraph::Bipartite(hardness_gadget(&g)),
        GadgetKind::HalfSize => AnyGraph::General(half_size_reduction(&g)?),
        GadgetKind::Double => AnyGraph::Bipartite(bipartite_double(&g)),
        GadgetKind::Xdouble => AnyGraph::Bipartite(extended_bipartite_double(&g)),
    };
    let text = out.to_json();
    match &a.out {
        Some(p) => write(p, &text)?,
        None => println!("{text}"),
    }
    if a.check {
        if !matches!(a.kind, GadgetKind::Hardness) {
            return Err(Fail::Error(Error::InvalidParameter("--check applies to --kind hardness".into())));
        }
        let (clique, balanced) = verify_gadget_equivalence(&g, a.budget)?;
        eprintln!("{}", json!({ "half_size_clique": clique, "alpha_equals_alpha_bal": balanced }));
        if clique != balanced {
            return Err(Fail::Validation("clique and balance flags disagree".into()));
        }
    }
    Ok(())
}

fn group(a: GroupArgs) -> Result<(), Fail> {
    let g = match (&a.group, &a.table) {
        (Some(s), None) => family::group_spec(s)?,
        (None, Some(p)) => FiniteGroup::from_json(&read(p)?)?,
        _ => return Err(Fail::Error(Error::Parse("pass exactly one of --group or --table".into()))),
    };
    if let Some(p) = &a.emit {
        write(p, &g.to_json())?;
    }
    let mut out = serde_json::Map::new();
    out.insert("order".into(), json!(g.order()));
    out.insert("abelian".into(), json!(g.is_abelian()));
    if g.order() <= a.cap {
        let (size, witness) = groups::max_product_free(&g, a.cap)?;
        out.insert("max_product_free".into(), json!({ "size": size, "witness": witness }));
    } else {
        out.insert("max_product_free".into(), json!(format!("skipped: order above --cap {}", a.cap)));
    }
    let mut failure = None;
    if let Some(set) = &a.set {
        let free = groups::is_product_free(&g, set)?;
        out.insert("product_free".into(), json!(free));
        if let Some(p) = &a.cayley {
            write(p, &AnyGraph::Bipartite(groups::cayley_bipartite(&g, set)?).to_json())?;
        }
        if free {
            let r = groups::gowers_report(&g, set, a.k, a.tol)?;
            if !(r.lambda2_ok && r.half_size_ok && r.cap_ok) {
                failure = Some("spectral bound violated; is k valid for this group?".to_string());
            }
            out.insert("spectral".into(), serde_json::to_value(&r).expect("report serializes"));
        }
    }
    if a.json {
        println!("{}", serde_json::to_string_pretty(&out).expect("serializes"));
    } else {
        print_group(&out);
    }
    failure.map_or(Ok(()), |m| Err(Fail::Validation(m)))
}

fn print_group(out: &serde_json::Map<String, serde_json::Value>) {
    let show = |v: &serde_json::Value| match v.as_f64() {
        Some(x) if !v.is_u64() && !v.is_i64() => sig7(x),
        _ => v.to_string(),
    };
    for (k, v) in out {
        match v.as_object() {
            Some(inner) => {
                println!("{k}:");
                for (k2, v2) in inner {
                    println!("  {k2}: {}", show(v2));
                }
            }
            None => println!("{k}: {}", show(v)),
        }
    }
}
