use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hp0_core::beg::{beg_apply, beg_prime, default_max_degree, hp0_report, SolutionReport};
use hp0_core::graph::{catalog, simple_graph_search, Catalog, GraphCombination, GraphSpec};
use hp0_core::sl2::{
    expand_combination, hw0_basis, hw0_dim_formula, invariant_hw0_basis, parse_combination, Sl2Triple,
};
use hp0_core::{Error, Polynomial, WeylGroup};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "hp0", version, about = "Degree-0 Poisson homology of B_n / D_n symplectic invariants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for the parallel sections (default: all cores).
    #[arg(long, global = true, env = "HP0_THREADS")]
    threads: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct GroupArgs {
    /// Group designator such as B3 or D4.
    #[arg(long)]
    group: WeylGroup,
    /// Largest even degree searched; defaults to 4(n-1)+4.
    #[arg(long)]
    max_degree: Option<usize>,
}

impl GroupArgs {
    fn max_degree(&self) -> Result<usize, Failure> {
        let d = self.max_degree.unwrap_or_else(|| default_max_degree(self.group.rank()));
        if d % 2 == 1 {
            return Err(Failure::Input(Error::OddDegree(d).to_string()));
        }
        Ok(d)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Dimension of HP0 and a basis of solutions in each degree.
    Hp0(GroupArgs),
    /// Highest-weight-0 dimensions per degree.
    Series(GroupArgs),
    /// Reports whether an input solves the equation.
    Check {
        #[command(flatten)]
        group: GroupArgs,
        /// Polynomial in x1..xn, y1..yn, e.g. "x1^2*y2^2 - 2*x1*y1*x2*y2 + y1^2*x2^2".
        #[arg(long, group = "input")]
        poly: Option<String>,
        /// Pfaffian word combination, e.g. "X[1,2]^2 * X[2,3]^2".
        #[arg(long, group = "input")]
        word: Option<String>,
        /// Graph or graph combination as JSON.
        #[arg(long, group = "input")]
        graph: Option<String>,
    },
    /// Simple graph search and the partition catalog.
    Graphs(GroupArgs),
}

enum Failure {
    Input(String),
    Inconsistent(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Inconsistent(_) | Error::Overflow => Failure::Inconsistent(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

#[derive(Serialize)]
struct SeriesRow {
    degree: usize,
    formula: u128,
    hw0_basis: usize,
    invariant_basis: usize,
}

#[derive(Serialize)]
struct CheckReport {
    group: WeylGroup,
    input: String,
    degree: Option<u32>,
    input_invariant: bool,
    reynolds_zero: bool,
    is_hw0: bool,
    beg_prime_zero: bool,
    beg_apply_zero: bool,
}

#[derive(Serialize)]
struct SimpleGraphJson {
    degree: usize,
    candidates: usize,
    dimension: usize,
    solutions: Vec<GraphCombination>,
}

#[derive(Serialize)]
struct GraphsReport {
    group: WeylGroup,
    simple_graph: SimpleGraphJson,
    catalog: Catalog,
}

fn to_json<T: Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Failure::Input(e.to_string()))
}

fn to_csv<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Input(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn cmd_hp0(args: &GroupArgs, format: Format) -> Result<String, Failure> {
    let report: SolutionReport = hp0_report(&args.group, args.max_degree()?)?;
    match format {
        Format::Json => to_json(&report),
        Format::Csv => to_csv(report.degrees.iter().map(|d| (d.degree, d.candidates, d.solutions))).map(|body| {
            // csv::Writer does not emit headers for tuples
            format!("degree,candidates,solutions\n{body}")
        }),
        Format::Text => {
            let mut s = format!(
                "group {}  max degree {}  hp0 {}  hh0 {}\n",
                report.group, report.max_degree, report.hp0, report.hh0
            );
            for d in &report.degrees {
                s += &format!("degree {:>2}: {} candidates, {} solutions\n", d.degree, d.candidates, d.solutions);
                for b in &d.basis {
                    s += &format!("    {b}\n");
                }
            }
            Ok(s)
        }
    }
}

fn cmd_series(args: &GroupArgs, format: Format) -> Result<String, Failure> {
    let n = args.group.rank();
    let mut rows = Vec::new();
    for d in 0..=args.max_degree()? {
        let formula = hw0_dim_formula(n, d);
        let realized = hw0_basis(n, d)?.len();
        if realized as u128 != formula {
            return Err(Failure::Inconsistent(format!(
                "degree {d}: hw-0 basis has {realized} vectors, formula gives {formula}"
            )));
        }
        let invariant = if d % 2 == 0 { invariant_hw0_basis(&args.group, d)?.len() } else { 0 };
        rows.push(SeriesRow { degree: d, formula, hw0_basis: realized, invariant_basis: invariant });
    }
    match format {
        Format::Json => to_json(&rows),
        Format::Csv => to_csv(rows),
        Format::Text => Ok(rows
            .iter()
            .map(|r| format!("degree {:>2}: hw0 {} (formula {}), invariant {}\n", r.degree, r.hw0_basis, r.formula, r.invariant_basis))
            .collect()),
    }
}

fn parse_graph(text: &str, w: &WeylGroup) -> Result<Polynomial, Failure> {
    let bad = |e: serde_json::Error| Failure::Input(format!("graph JSON: {e}"));
    let comb = if text.trim_start().starts_with('[') {
        serde_json::from_str::<GraphCombination>(text).map_err(bad)?
    } else {
        GraphCombination::single(serde_json::from_str::<GraphSpec>(text).map_err(bad)?)
    };
    if comb.max_vertices() > w.rank() {
        return Err(Error::GraphTooLarge { vertices: comb.max_vertices(), rank: w.rank() }.into());
    }
    Ok(comb.raw_polynomial(w.rank())?)
}

fn cmd_check(
    args: &GroupArgs,
    poly: Option<&str>,
    word: Option<&str>,
    graph: Option<&str>,
    format: Format,
) -> Result<String, Failure> {
    let w = args.group;
    let n = w.rank();
    let (input, raw) = match (poly, word, graph) {
        (Some(p), _, _) => (p, Polynomial::parse(p, n)?),
        (_, Some(s), _) => (s, expand_combination(n, &parse_combination(s, n)?)),
        (_, _, Some(g)) => (g, parse_graph(g, &w)?),
        _ => return Err(Failure::Input("one of --poly, --word, --graph is required".into())),
    };
    if !raw.is_xy_only() {
        return Err(Error::NotXyPolynomial.into());
    }
    let p = w.reynolds(&raw)?;
    let report = CheckReport {
        group: w,
        input: input.to_string(),
        degree: raw.homogeneous_degree(),
        input_invariant: p == raw,
        reynolds_zero: p.is_zero(),
        is_hw0: Sl2Triple::new(n)?.is_hw0(&p)?,
        beg_prime_zero: beg_prime(&w, &p)?.is_zero(),
        beg_apply_zero: beg_apply(&w, &p)?.is_zero(),
    };
    if report.beg_apply_zero && !report.beg_prime_zero {
        return Err(Failure::Inconsistent("full equation holds but the restricted one fails".into()));
    }
    match format {
        Format::Json => to_json(&report),
        Format::Csv => to_csv([&report]),
        Format::Text => Ok(format!(
            "group {}\ninput invariant: {}\nReynolds image zero: {}\nhw-0: {}\nrestricted equation zero: {}\nfull equation zero: {}\n",
            report.group, report.input_invariant, report.reynolds_zero, report.is_hw0, report.beg_prime_zero, report.beg_apply_zero
        )),
    }
}

fn cmd_graphs(args: &GroupArgs, format: Format) -> Result<String, Failure> {
    let w = args.group;
    let simple = simple_graph_search(&w)?;
    let cat = catalog(&w)?;
    if !cat.all_verified() {
        return Err(Failure::Inconsistent("a composed catalog entry does not solve the equation".into()));
    }
    let report = GraphsReport {
        group: w,
        simple_graph: SimpleGraphJson {
            degree: simple.degree,
            candidates: simple.candidates,
            dimension: simple.solutions.len(),
            solutions: simple.solutions,
        },
        catalog: cat,
    };
    match format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let rows = report.catalog.entries.iter().map(|e| {
                let parts: Vec<String> = e.partition.iter().map(|p| p.to_string()).collect();
                (parts.join("+"), e.degree, e.verified)
            });
            Ok(format!("partition,degree,verified\n{}", to_csv(rows)?))
        }
        Format::Text => {
            let mut s = format!(
                "{}: degree {} search over {} candidates, dimension {}\n",
                w, report.simple_graph.degree, report.simple_graph.candidates, report.simple_graph.dimension
            );
            for g in &report.simple_graph.solutions {
                s += &format!("    {g}\n");
            }
            for e in &report.catalog.entries {
                let parts: Vec<String> = e.partition.iter().map(|p| p.to_string()).collect();
                s += &format!("{:<10} degree {:>2} verified {}  {}\n", parts.join("+"), e.degree, e.verified, e.combination);
            }
            for c in &report.catalog.counts {
                s += &format!("degree {:>2}: catalog {} solver {}\n", c.degree, c.catalog, c.solver);
            }
            Ok(s)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Input(format!("--threads: {e}")))?;
    }
    let out = match &cli.command {
        Command::Hp0(a) => cmd_hp0(a, cli.format)?,
        Command::Series(a) => cmd_series(a, cli.format)?,
        Command::Check { group, poly, word, graph } => {
            cmd_check(group, poly.as_deref(), word.as_deref(), graph.as_deref(), cli.format)?
        }
        Command::Graphs(a) => cmd_graphs(a, cli.format)?,
    };
    match &cli.out {
        Some(path) => fs::write(path, out)?,
        None => io::stdout().write_all(out.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Inconsistent(m)) => {
            eprintln!("inconsistency: {m}");
            ExitCode::from(3)
        }
    }
}
