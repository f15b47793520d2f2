//! Thin command-line front end; all computation lives in the library.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use mintrace::experiments::{
    self, CensusParams, CheckParams, ClimbReport, ComplexityParams, DecomposeReport, FileConfig,
};
use mintrace::model::{sample_data, sigma_from_sem, Covariance, LinearSem};
use mintrace::perm::{NeighborhoodKind, Ordering};
use mintrace::search::{hill_climb_population, hill_climb_sample};
use mintrace::{cholesky, io, Error};

#[derive(Parser)]
#[command(
    name = "mintrace",
    about = "Minimum-trace DAG learning: decompositions, ordering search, and local-optima censuses",
    version
)]
struct Cli {
    /// JSON config file; command-line flags win over file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: MINTRACE_WORKERS, then all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Count strict and weak local optima over all p! orderings.
    Census(CensusArgs),
    /// Finite-sample climbs across p: edge difference and iteration counts.
    Complexity(ComplexityArgs),
    /// Run one hill climb and print its trace.
    Climb(ClimbArgs),
    /// Print (B_sigma, Omega_sigma) for a covariance and an ordering.
    Decompose(DecomposeArgs),
    /// Check identifiability conditions on generated models.
    Check(CheckArgs),
}

#[derive(Args, Default)]
struct CensusArgs {
    /// Node count (exhaustive; p <= 10).
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated subset of ADJ,RTS,R2R,R2R-REV.
    #[arg(long, value_delimiter = ',')]
    kinds: Option<Vec<String>>,
    /// Count orderings that tie the global minimum as local optima too.
    #[arg(long)]
    include_global: bool,
    /// Relative tolerance for trace ties.
    #[arg(long)]
    trace_tol: Option<f64>,
    /// Output directory for census.csv and census_summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Default)]
struct ComplexityArgs {
    /// Comma-separated node counts.
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<usize>>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated neighborhoods to run (default R2R).
    #[arg(long, alias = "kind", value_delimiter = ',')]
    kinds: Option<Vec<String>>,
    /// In-degree cap for MAP selection.
    #[arg(long)]
    din: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Default)]
struct ClimbArgs {
    /// Generate the instance from this node count (with --seed).
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Load the model from a JSON document instead of generating it.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Load a covariance matrix from CSV instead of a model.
    #[arg(long)]
    sigma_csv: Option<PathBuf>,
    /// Sample n rows and climb the finite-sample score instead of the trace.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, alias = "kinds")]
    kind: Option<String>,
    /// Initial ordering, 1-based (e.g. "3,1,2"); default random.
    #[arg(long)]
    init: Option<String>,
    #[arg(long)]
    din: Option<usize>,
    /// Write the report here as well as printing it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Default)]
struct DecomposeArgs {
    /// Covariance matrix CSV.
    #[arg(long)]
    sigma_csv: Option<PathBuf>,
    /// Model JSON (its implied covariance is decomposed).
    #[arg(long)]
    model: Option<PathBuf>,
    /// Ordering, 1-based (e.g. "2,1,3"); default identity.
    #[arg(long)]
    order: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Default)]
struct CheckArgs {
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trace_tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::from(0),
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::Config(_) | Error::Parameter(_) | Error::Model(_) => 2,
                Error::Size(_) => 3,
                Error::Degeneracy(_) | Error::Conditioning(_) => 4,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> mintrace::Result<()> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    init_workers(cli.workers.or(file.workers))?;
    let command = match cli.command {
        Some(cmd) => cmd,
        None => command_from_file(&file)?,
    };
    match command {
        Command::Census(args) => census(args, &file),
        Command::Complexity(args) => complexity(args, &file),
        Command::Climb(args) => climb(args, &file),
        Command::Decompose(args) => decompose(args, &file),
        Command::Check(args) => check(args, &file),
    }
}

fn init_workers(cli_workers: Option<usize>) -> mintrace::Result<()> {
    let workers = match cli_workers {
        Some(w) => Some(w),
        None => match std::env::var(experiments::WORKERS_ENV) {
            Ok(raw) => Some(raw.parse::<usize>().map_err(|_| {
                Error::Config(format!("{}={raw} is not a worker count", experiments::WORKERS_ENV))
            })?),
            Err(_) => None,
        },
    };
    if let Some(workers) = workers {
        if workers == 0 {
            return Err(Error::Config("worker count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

/// When no subcommand is given, the config file's `command` field selects one
/// with all parameters from the file.
fn command_from_file(file: &FileConfig) -> mintrace::Result<Command> {
    match file.command.as_deref() {
        Some("census") => Ok(Command::Census(CensusArgs::default())),
        Some("complexity") => Ok(Command::Complexity(ComplexityArgs::default())),
        Some("climb") => Ok(Command::Climb(ClimbArgs::default())),
        Some("decompose") => Ok(Command::Decompose(DecomposeArgs::default())),
        Some("check") => Ok(Command::Check(CheckArgs::default())),
        Some(other) => Err(Error::Config(format!("unknown command '{other}' in config file"))),
        None => Err(Error::Config("no subcommand given and none in the config file".into())),
    }
}

fn parse_kinds(names: &[String]) -> mintrace::Result<Vec<NeighborhoodKind>> {
    names.iter().map(|s| NeighborhoodKind::from_str(s)).collect()
}

fn single_p(values: Option<&Vec<usize>>) -> Option<usize> {
    match values {
        Some(v) if v.len() == 1 => Some(v[0]),
        _ => None,
    }
}

fn census(args: CensusArgs, file: &FileConfig) -> mintrace::Result<()> {
    let mut params = CensusParams::new(args.p.or_else(|| single_p(file.p.as_ref())).unwrap_or(8));
    if let Some(reps) = args.reps.or(file.reps) {
        params.reps = reps;
    }
    if let Some(seed) = args.seed.or(file.seed) {
        params.base_seed = seed;
    }
    if let Some(kinds) = &args.kinds {
        params.kinds = parse_kinds(kinds)?;
    } else if let Some(kinds) = &file.kinds {
        params.kinds = kinds.clone();
    }
    params.include_global = args.include_global || file.include_global.unwrap_or(false);
    if let Some(t) = args.trace_tol.or(file.trace_tol) {
        params.trace_tol = t;
    }
    let run = experiments::run_census(&params)?;
    for cell in &run.aggregate.cells {
        println!(
            "{:8} strict {:10.4} +/- {:.4}   weak {:12.4} +/- {:.4}",
            cell.kind.to_string(),
            cell.strict_mean,
            cell.strict_se,
            cell.weak_mean,
            cell.weak_se
        );
    }
    if let Some(dir) = args.out.as_ref().or(file.out.as_ref()) {
        for path in experiments::write_census_run(&run, dir)? {
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn complexity(args: ComplexityArgs, file: &FileConfig) -> mintrace::Result<()> {
    let mut params = ComplexityParams::default();
    if let Some(p) = args.p.clone().or_else(|| file.p.clone()) {
        params.p_values = p;
    }
    if let Some(n) = args.n.or(file.n) {
        params.n = n;
    }
    if let Some(reps) = args.reps.or(file.reps) {
        params.reps = reps;
    }
    if let Some(seed) = args.seed.or(file.seed) {
        params.base_seed = seed;
    }
    if let Some(kinds) = &args.kinds {
        params.kinds = parse_kinds(kinds)?;
    } else if let Some(kinds) = &file.kinds {
        params.kinds = kinds.clone();
    }
    params.score = file.score_config();
    if let Some(din) = args.din {
        params.score.d_in = Some(din);
    }
    let run = experiments::run_complexity(&params)?;
    for cell in &run.summary.cells {
        println!(
            "p={:4} {:8}  edge diff {:6.3} +/- {:.3}   iterations {:6.2} +/- {:.2}  (max {})",
            cell.p,
            cell.kind.to_string(),
            cell.edge_diff_mean,
            cell.edge_diff_se,
            cell.iter_mean,
            cell.iter_se,
            cell.iter_max
        );
    }
    if let Some(dir) = args.out.as_ref().or(file.out.as_ref()) {
        for path in experiments::write_complexity_run(&run, dir)? {
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

/// Instance loading shared by `climb` and `decompose`: a model JSON, a raw
/// covariance CSV, or a model generated from `(p, seed)`.
fn load_instance(
    model: Option<&PathBuf>,
    sigma_csv: Option<&PathBuf>,
    p: Option<usize>,
    seed: u64,
    file: &FileConfig,
) -> mintrace::Result<(Covariance, Option<LinearSem>, rand_chacha::ChaCha8Rng)> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    if let Some(path) = model.or(file.model.as_ref()) {
        let (sem, _) = io::read_model_json(path)?;
        let cov = sigma_from_sem(&sem)?;
        return Ok((cov, Some(sem), rng));
    }
    if let Some(path) = sigma_csv.or(file.sigma_csv.as_ref()) {
        let cov = Covariance::new(io::read_matrix_csv(path)?)?;
        return Ok((cov, None, rng));
    }
    let p = p
        .or_else(|| single_p(file.p.as_ref()))
        .ok_or_else(|| Error::Config("need --model, --sigma-csv, or --p".into()))?;
    let sem = mintrace::model::generate_model(p, &mut rng)?;
    let cov = sigma_from_sem(&sem)?;
    Ok((cov, Some(sem), rng))
}

fn climb(args: ClimbArgs, file: &FileConfig) -> mintrace::Result<()> {
    let seed = args.seed.or(file.seed).unwrap_or(1);
    let (cov, sem, mut rng) =
        load_instance(args.model.as_ref(), args.sigma_csv.as_ref(), args.p, seed, file)?;
    let p = cov.p();
    let kind = match &args.kind {
        Some(k) => k.parse()?,
        None => NeighborhoodKind::R2r,
    };
    let mut score = file.score_config();
    if let Some(din) = args.din {
        score.d_in = Some(din);
    }
    // Finite-sample mode draws the data before the initial ordering, so the
    // stream order matches the experiment runners.
    let data = match args.n.or(file.n) {
        Some(n) => Some(sample_data(&cov, n, &mut rng)?),
        None => None,
    };
    let init = match args.init.as_ref().or(file.init.as_ref()) {
        Some(text) => io::parse_ordering(text)?,
        None => Ordering::random(p, &mut rng),
    };
    if init.p() != p {
        return Err(Error::Parameter(format!(
            "initial ordering has length {}, expected {p}",
            init.p()
        )));
    }
    let report = match data {
        Some(data) => {
            let (dag, trace) = hill_climb_sample(&data, &init, kind, &score)?;
            let final_objective = match trace.steps.last() {
                Some(step) => step.objective,
                None => mintrace::search::phi_score(&data, &dag, &score)?,
            };
            ClimbReport {
                mode: "sample".into(),
                kind,
                edges: dag.edges().map(|(i, j)| [i + 1, j + 1]).collect(),
                edge_difference: sem
                    .as_ref()
                    .map(|s| mintrace::model::edge_difference(&dag, s.dag()))
                    .transpose()?,
                final_objective,
                trace,
            }
        }
        None => {
            let (dec, trace) = hill_climb_population(&cov, &init, kind)?;
            let dag = dec.dag(mintrace::tol::EDGE_ZERO)?;
            ClimbReport {
                mode: "population".into(),
                kind,
                edges: dag.edges().map(|(i, j)| [i + 1, j + 1]).collect(),
                edge_difference: sem
                    .as_ref()
                    .map(|s| mintrace::model::edge_difference(&dag, s.dag()))
                    .transpose()?,
                final_objective: dec.trace,
                trace,
            }
        }
    };
    emit(&report, args.out.as_ref().or(file.out.as_ref()))
}

fn decompose(args: DecomposeArgs, file: &FileConfig) -> mintrace::Result<()> {
    let (cov, _, _) = load_instance(args.model.as_ref(), args.sigma_csv.as_ref(), None, 1, file)?;
    let order = match args.order.as_ref().or(file.order.as_ref()) {
        Some(text) => io::parse_ordering(text)?,
        None => Ordering::identity(cov.p()),
    };
    let dec = cholesky::decompose(&cov, &order)?;
    emit(&DecomposeReport::from_decomposition(&dec), args.out.as_ref().or(file.out.as_ref()))
}

fn check(args: CheckArgs, file: &FileConfig) -> mintrace::Result<()> {
    let mut params = CheckParams::new(args.p.or_else(|| single_p(file.p.as_ref())).unwrap_or(6));
    if let Some(reps) = args.reps.or(file.reps) {
        params.reps = reps;
    }
    if let Some(seed) = args.seed.or(file.seed) {
        params.base_seed = seed;
    }
    if let Some(t) = args.trace_tol.or(file.trace_tol) {
        params.trace_tol = t;
    }
    let report = experiments::run_check(&params)?;
    println!(
        "weakly increasing: {}/{}   condition (5): {}/{}",
        report.weakly_increasing_count, report.reps, report.condition5_pass_count, report.reps
    );
    if report.exhaustive_verified {
        println!(
            "no strict R2R optimum off the true class: {}/{} passers, {}/{} violators",
            report.passers_conclusion_held,
            report.condition5_pass_count,
            report.violators_conclusion_held,
            report.reps - report.condition5_pass_count
        );
    }
    if let Some(dir) = args.out.as_ref().or(file.out.as_ref()) {
        for path in experiments::write_check_report(&report, dir)? {
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn emit<T: serde::Serialize>(value: &T, out: Option<&PathBuf>) -> mintrace::Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    print!("{text}");
    if let Some(path) = out {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        std::fs::write(path, text)?;
    }
    Ok(())
}
