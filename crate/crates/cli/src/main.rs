use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context};
use attdisc_bench::{
    generate_feasible, generate_instance, run_experiment, ExperimentConfig, SolverPair,
};
use attdisc_core::{
    build_diff_matrix, build_pair_distance_matrix, parse_instance, solve, verify, Discriminator,
    Error, Instance, Method, PairIndex, SolveOptions, Verification, DEFAULT_LCM_CAP,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser)]
#[command(
    name = "attdisc",
    version,
    about = "Minimum noise-tolerant discriminators for attractors"
)]
struct Cli {
    /// Worker threads for parallel solvers (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find a discriminating node set.
    Solve(SolveArgs),
    /// Check a node set against the noise bound.
    Verify(VerifyArgs),
    /// Write a random instance.
    Gen(GenArgs),
    /// Compare an exact solver with its greedy counterpart on random instances.
    Bench(BenchArgs),
    /// Print the pair distance matrix or the singleton difference matrix.
    Dump(DumpArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    ExactPeriodic,
    GreedyPeriodic,
    ExactSingleton,
    GreedySingleton,
    BruteForce,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::ExactPeriodic => Method::ExactPeriodic,
            MethodArg::GreedyPeriodic => Method::GreedyPeriodic,
            MethodArg::ExactSingleton => Method::ExactSingleton,
            MethodArg::GreedySingleton => Method::GreedySingleton,
            MethodArg::BruteForce => Method::BruteForce,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(value_enum)]
    method: MethodArg,
    /// Instance file, `-` for stdin.
    input: PathBuf,
    /// Maximum number of noisy nodes per attractor.
    #[arg(long, default_value_t = 0)]
    k: usize,
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
    /// Wall-clock limit for the exact solvers.
    #[arg(long)]
    max_seconds: Option<f64>,
    /// Largest subset size the exact periodic search may try.
    #[arg(long)]
    max_size: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Instance file, `-` for stdin.
    input: PathBuf,
    /// Comma-separated 1-based node indices.
    #[arg(long, value_delimiter = ',', conflicts_with = "solution")]
    nodes: Option<Vec<usize>>,
    /// JSON document from `solve --format json`, `-` for stdin.
    #[arg(long)]
    solution: Option<PathBuf>,
    /// Noise bound; defaults to the solution's `k`, else 0.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    /// Maximum attractor period.
    #[arg(long, default_value_t = 1)]
    len: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Redraw until every pair can reach distance 2K+1.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    k: usize,
    /// Maximum attractor period; 1 selects the singleton solvers.
    #[arg(long, default_value_t = 1)]
    len: usize,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Wall-clock limit for each exact run.
    #[arg(long)]
    max_seconds: Option<f64>,
    /// `periodic` or `singleton`; chosen from `--len` when omitted.
    #[arg(long)]
    solvers: Option<SolverPair>,
    /// Solve repetitions concurrently.
    #[arg(long)]
    parallel: bool,
    /// Leave the timing columns empty.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MatrixArg {
    /// Pair distance matrix for periodic input, difference matrix otherwise.
    Auto,
    D,
    CAtt,
}

#[derive(Args)]
struct DumpArgs {
    /// Instance file, `-` for stdin.
    input: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    matrix: MatrixArg,
}

#[derive(Serialize, Deserialize)]
struct PairDist {
    i1: usize,
    i2: usize,
    dist: usize,
}

#[derive(Serialize, Deserialize)]
struct SolutionDoc {
    method: String,
    k: usize,
    nodes: Vec<usize>,
    cardinality: usize,
    per_pair: Vec<PairDist>,
    feasible: bool,
    wall_ms: f64,
}

#[derive(Serialize)]
struct VerifyDoc {
    k: usize,
    nodes: Vec<usize>,
    per_pair: Vec<PairDist>,
    min_distance: usize,
    feasible: bool,
}

/// Exit status for a failed run: 2 infeasible, 3 budget, 1 otherwise.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Infeasible { .. }) => 2,
        Some(Error::BudgetExceeded(_)) => 3,
        _ => 1,
    }
}

fn read_input(path: &Path) -> anyhow::Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .context("reading stdin")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn load(path: &Path, k: usize) -> anyhow::Result<Instance> {
    let text = read_input(path)?;
    let inst = parse_instance(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(inst.with_noise_bound(k))
}

fn per_pair(iter: impl Iterator<Item = (PairIndex, usize)>) -> Vec<PairDist> {
    iter.map(|(p, d)| PairDist {
        i1: p.first,
        i2: p.second,
        dist: d,
    })
    .collect()
}

fn node_names(nodes: &[usize]) -> String {
    nodes
        .iter()
        .map(|j| format!("v{}", j + 1))
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_solve(args: &SolveArgs, out: &mut impl Write) -> anyhow::Result<bool> {
    let inst = load(&args.input, args.k)?;
    let mut opts = SolveOptions::default();
    if let Some(s) = args.max_seconds {
        opts = opts.with_time_limit(Duration::from_secs_f64(s));
    }
    if let Some(k) = args.max_size {
        opts = opts.with_max_size(k);
    }
    let start = Instant::now();
    let sol: Discriminator = solve(&inst, args.method.into(), &opts)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1000.0;
    let doc = SolutionDoc {
        method: sol.method.to_string(),
        k: args.k,
        nodes: sol.nodes_one_based(),
        cardinality: sol.cardinality(),
        per_pair: per_pair(sol.per_pair()),
        feasible: sol.feasible,
        wall_ms,
    };
    match args.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?,
        Format::Csv => {
            writeln!(out, "method,k,cardinality,nodes,feasible,wall_ms")?;
            let nodes: Vec<String> = doc.nodes.iter().map(usize::to_string).collect();
            writeln!(
                out,
                "{},{},{},{},{},{:.3}",
                doc.method,
                doc.k,
                doc.cardinality,
                nodes.join(" "),
                doc.feasible,
                doc.wall_ms
            )?;
        }
        Format::Human => {
            writeln!(out, "method:      {}", doc.method)?;
            writeln!(out, "K:           {}", doc.k)?;
            writeln!(out, "nodes:       {}", node_names(&sol.nodes))?;
            writeln!(out, "cardinality: {}", doc.cardinality)?;
            writeln!(
                out,
                "feasible:    {}",
                if doc.feasible { "yes" } else { "no" }
            )?;
            writeln!(out, "distances (required {}):", inst.required_distance())?;
            for p in &doc.per_pair {
                writeln!(out, "  Att{}-Att{}: {}", p.i1, p.i2, p.dist)?;
            }
            writeln!(out, "wall time:   {:.3} ms", doc.wall_ms)?;
        }
    }
    Ok(sol.feasible)
}

fn cmd_verify(args: &VerifyArgs, out: &mut impl Write) -> anyhow::Result<bool> {
    if args.input == Path::new("-") && args.solution.as_deref() == Some(Path::new("-")) {
        bail!("instance and solution cannot both come from stdin");
    }
    let (nodes, doc_k) = match (&args.nodes, &args.solution) {
        (Some(nodes), _) => (nodes.clone(), None),
        (None, Some(path)) => {
            let doc: SolutionDoc = serde_json::from_str(&read_input(path)?)
                .with_context(|| format!("reading solution {}", path.display()))?;
            (doc.nodes, Some(doc.k))
        }
        (None, None) => bail!("pass --nodes or --solution"),
    };
    let k = args.k.or(doc_k).unwrap_or(0);
    let inst = load(&args.input, k)?;
    if let Some(&bad) = nodes.iter().find(|&&j| j == 0 || j > inst.n()) {
        return Err(Error::NodeOutOfRange {
            index: bad,
            n: inst.n(),
        }
        .into());
    }
    let zero_based: Vec<usize> = nodes.iter().map(|j| j - 1).collect();
    let v: Verification = verify(&inst, &zero_based, DEFAULT_LCM_CAP)?;
    let doc = VerifyDoc {
        k,
        nodes: v.nodes.iter().map(|j| j + 1).collect(),
        per_pair: per_pair(v.per_pair()),
        min_distance: v.min_distance(),
        feasible: v.feasible,
    };
    match args.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?,
        Format::Csv => {
            writeln!(out, "i1,i2,dist")?;
            for p in &doc.per_pair {
                writeln!(out, "{},{},{}", p.i1, p.i2, p.dist)?;
            }
        }
        Format::Human => {
            writeln!(out, "nodes:    {}", node_names(&v.nodes))?;
            writeln!(out, "K:        {k}")?;
            for p in &doc.per_pair {
                writeln!(out, "  Att{}-Att{}: {}", p.i1, p.i2, p.dist)?;
            }
            writeln!(
                out,
                "minimum:  {} (required {})",
                doc.min_distance, v.required
            )?;
            writeln!(
                out,
                "verdict:  {}",
                if v.feasible { "feasible" } else { "infeasible" }
            )?;
        }
    }
    Ok(v.feasible)
}

fn cmd_gen(args: &GenArgs, out: &mut impl Write) -> anyhow::Result<bool> {
    let mut cfg = ExperimentConfig::new(args.n, args.m, args.k.unwrap_or(0), args.len)
        .with_seed(args.seed)
        .with_repetitions(1)
        .with_solvers(SolverPair::Periodic);
    let inst = match args.k {
        Some(k) => {
            cfg.k = k;
            generate_feasible(&cfg)?.0.remove(0)
        }
        None => generate_instance(&cfg)?,
    };
    write!(out, "{}", inst.to_text())?;
    Ok(true)
}

fn cmd_bench(args: &BenchArgs, out: &mut impl Write) -> anyhow::Result<bool> {
    let mut cfg = ExperimentConfig::new(args.n, args.m, args.k, args.len)
        .with_seed(args.seed)
        .with_repetitions(args.reps);
    if let Some(s) = args.solvers {
        cfg = cfg.with_solvers(s);
    }
    if let Some(s) = args.max_seconds {
        cfg = cfg.with_budget(Duration::from_secs_f64(s));
    }
    cfg.parallel = args.parallel;
    let report = run_experiment(&cfg)?;
    write!(out, "{}", report.to_csv(!args.no_timing))?;
    Ok(true)
}

fn cmd_dump(args: &DumpArgs, out: &mut impl Write) -> anyhow::Result<bool> {
    let inst = load(&args.input, 0)?;
    let csv = match args.matrix {
        MatrixArg::D => build_pair_distance_matrix(&inst)?.to_csv(),
        MatrixArg::CAtt => build_diff_matrix(&inst)?.to_csv(),
        MatrixArg::Auto if inst.is_singleton() => build_diff_matrix(&inst)?.to_csv(),
        MatrixArg::Auto => build_pair_distance_matrix(&inst)?.to_csv(),
    };
    write!(out, "{csv}")?;
    Ok(true)
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring worker threads")?;
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match &cli.command {
        Command::Solve(a) => cmd_solve(a, &mut out),
        Command::Verify(a) => cmd_verify(a, &mut out),
        Command::Gen(a) => cmd_gen(a, &mut out),
        Command::Bench(a) => cmd_bench(a, &mut out),
        Command::Dump(a) => cmd_dump(a, &mut out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
