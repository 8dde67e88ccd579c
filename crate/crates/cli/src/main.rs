//! `akc`: command-line front end for the anchored k-core toolkit.
//!
//! Exit status: 0 completed (or answer "yes"), 1 answer "no", 2 usage or
//! validation error, 3 timeout.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use akc::bench::bench;
use akc::corpus::{connected_graphs, curated_formulas, restricted_formulas_up_to};
use akc::engagement::{anchored_closure_random, StrategyProfile};
use akc::generators::{generate, Family, GeneratorSpec};
use akc::io::{
    parse_dimacs_cnf, parse_graph_text, parse_instance, parse_solution, write_graph, write_instance, write_labels,
    write_report, write_solution, write_trace_csv,
};
use akc::oracles::{
    akc_enum_oracle, as_reduction_witness, clique_oracle, equivalence_driver, sat_oracle, CorpusEntry,
    EquivalenceConfig, OracleWitness,
};
use akc::reductions::{gadget_t, gadget_w, CliqueInstance, Source};
use akc::solver::{Objective, Strategy};
use akc::{
    anchored_closure, embed_witness, k_core, nash_check, reduce, solve, verify_solution, AkcInstance, Decision,
    Graph, ReductionKind, SolveOptions, VertexSet,
};

#[derive(Parser, Debug)]
#[command(name = "akc", version, about = "Anchored k-core solver, reductions and oracles")]
struct Cli {
    /// Write the main output here instead of stdout.
    #[arg(short = 'o', long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the k-core of a graph.
    Core {
        /// Graph file, or `-` for stdin.
        input: String,
        #[arg(long)]
        k: usize,
    },
    /// Anchored closure of a given anchor set.
    Closure {
        input: String,
        #[arg(long)]
        k: usize,
        /// Comma-separated 1-indexed anchor ids.
        #[arg(long, default_value = "")]
        anchors: String,
        /// Write the removal order as CSV to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Peel in a random order drawn from this seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Solve an Anchored k-Core instance exactly.
    Solve(SolveArgs),
    /// Check a solution file against an instance.
    Verify { instance: String, solution: String },
    /// Check whether an engagement profile is a pure Nash equilibrium.
    Nash {
        input: String,
        #[arg(long)]
        k: usize,
        /// Comma-separated 1-indexed engaged ids; defaults to the k-core.
        #[arg(long)]
        engaged: Option<String>,
    },
    /// Build a reduced instance from a graph (clique kinds) or DIMACS CNF.
    Reduce {
        kind: String,
        source: String,
        /// Clique size for the clique reductions.
        #[arg(long, default_value_t = 4)]
        ell: usize,
        /// Threshold for sat-k4plus.
        #[arg(long)]
        k: Option<usize>,
        /// Solve the source with its oracle and write the embedded solution here.
        #[arg(long)]
        embed_witness: Option<PathBuf>,
    },
    /// Print a reduction gadget.
    Gadget {
        #[arg(value_enum)]
        which: GadgetKind,
        /// Size parameter of gadget T.
        #[arg(default_value_t = 1)]
        n: usize,
    },
    /// Answer a source or AKC instance by brute force.
    Oracle {
        #[arg(value_enum)]
        problem: OracleProblem,
        input: String,
        #[arg(long, default_value_t = 4)]
        ell: usize,
    },
    /// Compare source oracles with the exact solver on reduced instances.
    CheckEquiv {
        kind: String,
        /// Source files; without any, a built-in corpus is used.
        sources: Vec<String>,
        #[arg(long, default_value_t = 4)]
        ell: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value_t = StrategyArg::Bb)]
        strategy: StrategyArg,
        /// Restrict anchors to green vertices (clique-copies).
        #[arg(long)]
        green_pool: bool,
    },
    /// Generate a graph: path N | cycle N | complete N | star N | grid W H |
    /// gnp N P | apollonian N | trigrid W H.
    Gen {
        family: String,
        params: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a benchmark suite and print CSV.
    Bench {
        suite: PathBuf,
        #[arg(long)]
        timeout_s: Option<f64>,
    },
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Instance or graph file, or `-` for stdin.
    #[arg(default_value = "-")]
    input: String,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    b: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    planar: bool,
    #[arg(long, value_enum, default_value_t = StrategyArg::Bb)]
    strategy: StrategyArg,
    /// Stop at the first solution reaching p instead of proving the optimum.
    #[arg(long)]
    decide: bool,
    #[arg(long)]
    timeout_s: Option<f64>,
    /// Write the removal trace of the returned solution as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    Exhaustive,
    Bb,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Exhaustive => Strategy::Exhaustive,
            StrategyArg::Bb => Strategy::BranchBound,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GadgetKind {
    T,
    W,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OracleProblem {
    Clique,
    Sat,
    Akc,
}

/// Main output plus exit status.
struct Outcome {
    text: String,
    code: u8,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }

    fn answer(text: String, yes: bool) -> Self {
        Self { text, code: if yes { 0 } else { 1 } }
    }
}

/// Validation failure; always exit status 2.
#[derive(Debug)]
struct Invalid(String);

impl<E: std::fmt::Display> From<E> for Invalid {
    fn from(e: E) -> Self {
        Invalid(e.to_string())
    }
}

type CliResult = Result<Outcome, Invalid>;

fn read_input(path: &str) -> Result<String, Invalid> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).map_err(|e| Invalid(format!("stdin: {e}")))?;
        Ok(text)
    } else {
        std::fs::read_to_string(path).map_err(|e| Invalid(format!("{path}: {e}")))
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Invalid> {
    std::fs::write(path, text).map_err(|e| Invalid(format!("{}: {e}", path.display())))
}

fn read_graph(path: &str) -> Result<Graph, Invalid> {
    Ok(parse_graph_text(&read_input(path)?).map_err(|e| Invalid(format!("{path}: {e}")))?.graph)
}

/// Parses `1,2,3` into 0-indexed ids.
fn parse_ids(list: &str, graph: &Graph) -> Result<VertexSet, Invalid> {
    let mut out = BTreeSet::new();
    for token in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let id: usize = token.parse().map_err(|_| Invalid(format!("invalid vertex id `{token}`")))?;
        if id == 0 || id > graph.vertex_count() {
            return Err(Invalid(format!("vertex {id} is outside 1..={}", graph.vertex_count())));
        }
        out.insert(id - 1);
    }
    Ok(out)
}

fn id_line(tag: &str, set: &VertexSet) -> String {
    let mut line = format!("v {tag}");
    for v in set {
        let _ = write!(line, " {}", v + 1);
    }
    line.push('\n');
    line
}

fn timeout(seconds: Option<f64>) -> Result<Option<Duration>, Invalid> {
    seconds
        .map(|s| Duration::try_from_secs_f64(s).map_err(|_| Invalid(format!("invalid --timeout-s {s}"))))
        .transpose()
}

fn cmd_core(input: &str, k: usize) -> CliResult {
    let graph = read_graph(input)?;
    let core = k_core(&graph, k);
    Ok(Outcome::ok(format!("c {k}-core size={}\n{}", core.len(), id_line("H", &core))))
}

fn cmd_closure(input: &str, k: usize, anchors: &str, trace: Option<&Path>, seed: Option<u64>) -> CliResult {
    let graph = read_graph(input)?;
    let anchors = parse_ids(anchors, &graph)?;
    let mut text = String::new();
    let (core, removal) = match seed {
        Some(seed) => {
            let _ = writeln!(text, "c seed={seed}");
            anchored_closure_random(&graph, k, &anchors, &mut ChaCha8Rng::seed_from_u64(seed))?
        }
        None => anchored_closure(&graph, k, &anchors)?,
    };
    let _ = writeln!(text, "c size={} removed={}", core.len(), removal.len());
    text.push_str(&id_line("B", &anchors));
    text.push_str(&id_line("H", &core));
    if let Some(path) = trace {
        write_file(path, &write_trace_csv(&removal))?;
    }
    Ok(Outcome::ok(text))
}

fn cmd_solve(args: &SolveArgs) -> CliResult {
    let parsed = parse_graph_text(&read_input(&args.input)?).map_err(|e| Invalid(format!("{}: {e}", args.input)))?;
    let from_file = parsed.params;
    let k = args.k.or(from_file.map(|p| p.k)).ok_or_else(|| Invalid("missing --k".into()))?;
    let b = args.b.or(from_file.map(|p| p.b)).ok_or_else(|| Invalid("missing --b".into()))?;
    let p = args.p.or(from_file.map(|p| p.p)).unwrap_or(0);
    let planar = args.planar || from_file.is_some_and(|p| p.planar);
    let inst = AkcInstance::new(parsed.graph, k, b, p).planar(planar);
    let opts = SolveOptions {
        strategy: args.strategy.into(),
        objective: if args.decide { Objective::Decide } else { Objective::Maximize },
        time_limit: timeout(args.timeout_s)?,
        ..SolveOptions::default()
    };
    let report = solve(&inst, &opts)?;
    if let Some(path) = &args.trace {
        let (_, removal) = anchored_closure(&inst.graph, k, &report.best.anchors)?;
        write_file(path, &write_trace_csv(&removal))?;
    }
    let mut text = write_report(&report);
    let _ = writeln!(text, "c optimum={} proven={}", report.optimum_size, u8::from(report.proven_optimal));
    let code = match report.decision {
        Decision::Yes => 0,
        Decision::No => 1,
        Decision::Unknown => 3,
    };
    Ok(Outcome { text, code })
}

fn cmd_verify(instance: &str, solution: &str) -> CliResult {
    let inst = parse_instance(&read_input(instance)?).map_err(|e| Invalid(format!("{instance}: {e}")))?;
    let (_, sol) = parse_solution(&read_input(solution)?).map_err(|e| Invalid(format!("{solution}: {e}")))?;
    let verdict = verify_solution(&inst, &sol);
    let mut text = write_solution(verdict.is_valid(), None);
    let valid = verdict.is_valid();
    if let Some(v) = verdict.violation {
        let _ = writeln!(text, "c {v}");
    }
    Ok(Outcome::answer(text, valid))
}

fn cmd_nash(input: &str, k: usize, engaged: Option<&str>) -> CliResult {
    let graph = read_graph(input)?;
    let engaged = match engaged {
        Some(list) => parse_ids(list, &graph)?,
        None => k_core(&graph, k),
    };
    let verdict = nash_check(&graph, k, &StrategyProfile::new(engaged.iter().copied()));
    let mut text = write_solution(verdict.is_equilibrium(), None);
    text.push_str(&id_line("S", &engaged));
    if let Some(v) = verdict.violation {
        let _ = writeln!(text, "c {v} (0-indexed)");
    }
    Ok(Outcome::answer(text, verdict.is_equilibrium()))
}

fn parse_kind(name: &str) -> Result<ReductionKind, Invalid> {
    ReductionKind::from_name(name).ok_or_else(|| {
        Invalid(format!("unknown reduction `{name}` (clique-subdivision, clique-copies, sat-k3, sat-k4plus)"))
    })
}

fn read_source(kind: ReductionKind, path: &str, ell: usize) -> Result<Source, Invalid> {
    let text = read_input(path)?;
    Ok(match kind {
        ReductionKind::CliqueSubdivision | ReductionKind::CliqueCopies => {
            let graph = parse_graph_text(&text).map_err(|e| Invalid(format!("{path}: {e}")))?.graph;
            Source::Clique(CliqueInstance::new(graph, ell))
        }
        ReductionKind::SatK3 | ReductionKind::SatK4Plus => {
            Source::Formula(parse_dimacs_cnf(&text).map_err(|e| Invalid(format!("{path}: {e}")))?)
        }
    })
}

fn source_oracle(source: &Source) -> Result<akc::oracles::OracleVerdict, Invalid> {
    Ok(match source {
        Source::Clique(c) => clique_oracle(&c.graph, c.ell)?,
        Source::Formula(f) => sat_oracle(f)?,
    })
}

fn labels_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".labels");
    PathBuf::from(name)
}

fn cmd_reduce(
    kind: &str,
    source: &str,
    ell: usize,
    k: Option<usize>,
    embed: Option<&Path>,
    output: Option<&Path>,
) -> CliResult {
    let kind = parse_kind(kind)?;
    let src = read_source(kind, source, ell)?;
    let red = reduce(kind, &src, k)?;
    let mut text = format!("c reduction {kind}\n");
    text.push_str(&write_instance(&red.instance));
    match output {
        Some(path) => write_file(&labels_path(path), &write_labels(&red.instance.graph))?,
        None => text.push_str(&write_labels(&red.instance.graph)),
    }
    if let Some(path) = embed {
        let verdict = source_oracle(&src)?;
        let Some(witness) = verdict.witness.as_ref().and_then(as_reduction_witness) else {
            write_file(path, &write_solution(false, None))?;
            return Ok(Outcome { text, code: 1 });
        };
        let sol = embed_witness(&red, &witness)?;
        write_file(path, &write_solution(true, Some(&sol)))?;
    }
    Ok(Outcome::ok(text))
}

fn cmd_gadget(which: GadgetKind, n: usize, output: Option<&Path>) -> CliResult {
    let (graph, root) = match which {
        GadgetKind::T => gadget_t(n)?,
        GadgetKind::W => gadget_w(),
    };
    let mut text = format!("c attachment vertex {}\n", root + 1);
    text.push_str(&write_graph(&graph));
    match output {
        Some(path) => write_file(&labels_path(path), &write_labels(&graph))?,
        None => text.push_str(&write_labels(&graph)),
    }
    Ok(Outcome::ok(text))
}

fn cmd_oracle(problem: OracleProblem, input: &str, ell: usize) -> CliResult {
    let text = read_input(input)?;
    let verdict = match problem {
        OracleProblem::Clique => {
            clique_oracle(&parse_graph_text(&text).map_err(|e| Invalid(format!("{input}: {e}")))?.graph, ell)?
        }
        OracleProblem::Sat => sat_oracle(&parse_dimacs_cnf(&text).map_err(|e| Invalid(format!("{input}: {e}")))?)?,
        OracleProblem::Akc => akc_enum_oracle(&parse_instance(&text).map_err(|e| Invalid(format!("{input}: {e}")))?)?,
    };
    let mut out = match &verdict.witness {
        Some(OracleWitness::Solution(sol)) => write_solution(true, Some(sol)),
        _ => write_solution(verdict.answer, None),
    };
    match &verdict.witness {
        Some(OracleWitness::Vertices(vs)) => out.push_str(&id_line("C", &vs.iter().copied().collect())),
        Some(OracleWitness::Assignment(a)) => {
            out.push_str("v A");
            for (i, &value) in a.iter().enumerate() {
                let lit = i as i64 + 1;
                let _ = write!(out, " {}", if value { lit } else { -lit });
            }
            out.push('\n');
        }
        _ => {}
    }
    let _ = writeln!(out, "# work={}", verdict.work);
    Ok(Outcome::answer(out, verdict.answer))
}

fn builtin_corpus(kind: ReductionKind, ell: usize) -> Vec<CorpusEntry> {
    match kind {
        ReductionKind::CliqueSubdivision | ReductionKind::CliqueCopies => (ell..=6)
            .flat_map(connected_graphs)
            .enumerate()
            .map(|(i, graph)| CorpusEntry {
                id: format!("connected-{i}"),
                source: Source::Clique(CliqueInstance::new(graph, ell)),
            })
            .collect(),
        ReductionKind::SatK3 | ReductionKind::SatK4Plus => restricted_formulas_up_to(2)
            .into_iter()
            .enumerate()
            .map(|(i, f)| (format!("restricted-{i}"), f))
            .chain(curated_formulas().into_iter().filter(|(_, f)| f.num_vars() <= 2))
            .map(|(id, f)| CorpusEntry { id, source: Source::Formula(f) })
            .collect(),
    }
}

fn cmd_check_equiv(
    kind: &str,
    sources: &[String],
    ell: usize,
    k: Option<usize>,
    strategy: StrategyArg,
    green_pool: bool,
) -> CliResult {
    let kind = parse_kind(kind)?;
    let corpus = if sources.is_empty() {
        builtin_corpus(kind, ell)
    } else {
        sources
            .iter()
            .map(|path| Ok(CorpusEntry { id: path.clone(), source: read_source(kind, path, ell)? }))
            .collect::<Result<_, Invalid>>()?
    };
    let options = SolveOptions { strategy: strategy.into(), ..SolveOptions::default() }.decide();
    let config = EquivalenceConfig { k, green_pool, ..EquivalenceConfig::new(kind, options) };
    match equivalence_driver(&config, &corpus) {
        Ok(report) => Ok(Outcome::ok(report.to_csv())),
        Err(akc::oracles::OracleError::Disagreement { instance_id, source_answer, reduced_answer, .. }) => Ok(Outcome {
            text: format!("c disagreement on {instance_id}: source {source_answer}, reduced {reduced_answer}\n"),
            code: 1,
        }),
        Err(e) => Err(e.into()),
    }
}

fn cmd_gen(family: &str, params: &[String], seed: u64) -> CliResult {
    let args: Vec<&str> = params.iter().map(String::as_str).collect();
    let family = Family::parse(family, &args)?;
    let generated = generate(&GeneratorSpec::new(family, seed))?;
    let mut text = format!("c gen {family} seed={seed} planar={}\n", u8::from(generated.planar));
    text.push_str(&write_graph(&generated.graph));
    Ok(Outcome::ok(text))
}

fn run(cli: &Cli) -> CliResult {
    let output = cli.output.as_deref();
    match &cli.command {
        Command::Core { input, k } => cmd_core(input, *k),
        Command::Closure { input, k, anchors, trace, seed } => cmd_closure(input, *k, anchors, trace.as_deref(), *seed),
        Command::Solve(args) => cmd_solve(args),
        Command::Verify { instance, solution } => cmd_verify(instance, solution),
        Command::Nash { input, k, engaged } => cmd_nash(input, *k, engaged.as_deref()),
        Command::Reduce { kind, source, ell, k, embed_witness } => {
            cmd_reduce(kind, source, *ell, *k, embed_witness.as_deref(), output)
        }
        Command::Gadget { which, n } => cmd_gadget(*which, *n, output),
        Command::Oracle { problem, input, ell } => cmd_oracle(*problem, input, *ell),
        Command::CheckEquiv { kind, sources, ell, k, strategy, green_pool } => {
            cmd_check_equiv(kind, sources, *ell, *k, *strategy, *green_pool)
        }
        Command::Gen { family, params, seed } => cmd_gen(family, params, *seed),
        Command::Bench { suite, timeout_s } => Ok(Outcome::ok(bench(suite, timeout(*timeout_s)?)?)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let written = match &cli.output {
                Some(path) => write_file(path, &outcome.text),
                None => std::io::stdout().write_all(outcome.text.as_bytes()).map_err(Invalid::from),
            };
            if let Err(Invalid(message)) = written {
                eprintln!("akc: {message}");
                return ExitCode::from(2);
            }
            ExitCode::from(outcome.code)
        }
        Err(Invalid(message)) => {
            eprintln!("akc: {message}");
            ExitCode::from(2)
        }
    }
}
