use std::fs::{File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use sdtga_core::constraints::{intersect, Block, IndependenceSystem};
use sdtga_core::experiment::{
    builtin_corpus, run_experiment, verify_corpus, write_csv, ExperimentConfig, ObjectiveCase,
    SystemCase,
};
use sdtga_core::instance::{generate_seeded, load_instance, save_instance, Family, GenSpec};
use sdtga_core::objectives::plants::SquaredSize;
use sdtga_core::solvers::Algorithm;
use sdtga_core::{Error, Execution};

const THREADS_VAR: &str = "SDTGA_THREADS";

#[derive(Parser)]
#[command(
    name = "sdtga",
    version,
    about = "Submodular maximization experiments under k-extendible constraints"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm on one instance and append result rows.
    Run(RunArgs),
    /// Sweep algorithms x p x epsilon x trials and write a CSV.
    Bench(BenchArgs),
    /// Generate a synthetic instance.
    Gen(GenArgs),
    /// Run the property verifiers over the built-in corpus.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SolverFlags {
    /// Rank override `r` (defaults to the constraint's rank bound).
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Permit p above 1/(1+k).
    #[arg(long)]
    allow_large_p: bool,
    /// Run trials one after another.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    algorithm: Algorithm,
    /// Sampling probability (defaults to 1/(1+k)).
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    /// CSV file to append to; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    algorithm: Vec<Algorithm>,
    /// Sampling probabilities (defaults to 1/(1+k)).
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.05")]
    epsilon: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    /// CSV file to write; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    n: usize,
    /// Number of intersected partition matroids.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Blocks per partition matroid.
    #[arg(long, default_value_t = 4)]
    rank: usize,
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    /// Coverage items or facility-location clients.
    #[arg(long, default_value_t = 30)]
    universe: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Record the brute-force optimum in the instance.
    #[arg(long)]
    with_opt: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Check submodularity on every chain instead of sampling.
    #[arg(long)]
    exhaustive: bool,
    /// Add an instance's constraint and objective to the corpus.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Extendibility to claim for the added instance's constraint.
    #[arg(long, requires = "instance")]
    claim_k: Option<usize>,
    /// Add the planted counterexamples, which must be reported.
    #[arg(long)]
    include_plants: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum Failure {
    Lib(Error),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn io_error(path: &Path, source: io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Contract(_) => 1,
        Error::Parse(_) | Error::Validation { .. } | Error::Io { .. } | Error::Domain { .. } => 2,
        Error::Capacity { .. } => 3,
    }
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn configure_threads() -> Result<(), Error> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        Error::Config(format!(
            "{THREADS_VAR} must be a positive integer, got '{raw}'"
        ))
    })?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Config(format!("cannot configure thread pool: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

fn experiment(
    algorithms: Vec<Algorithm>,
    p_values: Vec<f64>,
    epsilon_values: Vec<f64>,
    trials: u64,
    flags: &SolverFlags,
    sys: &IndependenceSystem,
) -> ExperimentConfig {
    let p_values = if p_values.is_empty() {
        vec![1.0 / (1.0 + sys.extendibility() as f64)]
    } else {
        p_values
    };
    let mut cfg =
        ExperimentConfig::new(algorithms, p_values, epsilon_values, trials).with_seed(flags.seed);
    cfg.r_override = flags.r;
    cfg.allow_large_p = flags.allow_large_p;
    cfg
}

fn run(args: RunArgs) -> Result<(), Failure> {
    let problem = load_instance(&args.instance)?.build()?;
    let cfg = experiment(
        vec![args.algorithm],
        args.p.into_iter().collect(),
        vec![args.epsilon],
        args.trials,
        &args.solver,
        &problem.constraint,
    );
    let out = run_experiment(&problem, &cfg, execution(args.solver.sequential))?;
    match &args.output {
        Some(path) => {
            let fresh = std::fs::metadata(path)
                .map(|m| m.len() == 0)
                .unwrap_or(true);
            let file = OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|e| io_error(path, e))?;
            write_csv(file, &out.rows, &[], fresh)?;
        }
        None => write_csv(io::stdout().lock(), &out.rows, &[], true)?,
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<(), Failure> {
    let problem = load_instance(&args.instance)?.build()?;
    let cfg = experiment(
        args.algorithm,
        args.p,
        args.epsilon,
        args.trials,
        &args.solver,
        &problem.constraint,
    );
    let out = run_experiment(&problem, &cfg, execution(args.solver.sequential))?;
    match &args.output {
        Some(path) => {
            let file = File::create(path).map_err(|e| io_error(path, e))?;
            write_csv(io::BufWriter::new(file), &out.rows, &out.summaries, true)?;
        }
        None => write_csv(io::stdout().lock(), &out.rows, &out.summaries, true)?,
    }
    Ok(())
}

fn gen(args: GenArgs) -> Result<(), Failure> {
    if !(0.0..=1.0).contains(&args.density) {
        return Err(
            Error::Config(format!("density must lie in [0, 1], got {}", args.density)).into(),
        );
    }
    let spec = GenSpec::new(args.family, args.n)
        .with_k(args.k)
        .with_rank(args.rank)
        .with_density(args.density)
        .with_universe(args.universe);
    let mut instance = generate_seeded(&spec, args.seed)?;
    if args.with_opt {
        instance = instance.with_brute_force_opt()?;
    }
    match &args.output {
        Some(path) => save_instance(&instance, path)?,
        None => println!("{}", instance.to_json()),
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> Result<(), Failure> {
    let mut corpus = builtin_corpus();
    if let Some(path) = &args.instance {
        let spec = load_instance(path)?;
        let problem = spec.build()?;
        corpus.systems.push(SystemCase {
            name: spec.name.clone(),
            claimed_k: args
                .claim_k
                .unwrap_or_else(|| problem.constraint.extendibility()),
            system: problem.constraint,
        });
        corpus.objectives.push(ObjectiveCase {
            name: spec.name,
            function: problem.objective,
        });
    }
    if args.include_plants {
        corpus.objectives.push(ObjectiveCase {
            name: "plant-squared-size".into(),
            function: Arc::new(SquaredSize(4)),
        });
        let block = |members: Vec<usize>| Block {
            members,
            capacity: 1,
        };
        let m1 = IndependenceSystem::partition(3, vec![block(vec![0, 1]), block(vec![2])])?;
        let m2 = IndependenceSystem::partition(3, vec![block(vec![0, 2]), block(vec![1])])?;
        corpus.systems.push(SystemCase {
            name: "plant-two-partitions-claimed-1".into(),
            system: intersect(vec![m1, m2])?,
            claimed_k: 1,
        });
    }
    let report = verify_corpus(&corpus, args.exhaustive, args.seed, Execution::Parallel)?;
    let mut stdout = io::stdout().lock();
    for outcome in &report.outcomes {
        let _ = writeln!(stdout, "{outcome}");
    }
    let failed = report.failures().count();
    let _ = writeln!(stdout, "{} checks, {failed} failed", report.outcomes.len());
    if failed > 0 {
        return Err(Failure::Verification);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = configure_threads()
        .map_err(Failure::from)
        .and_then(|()| match cli.command {
            Command::Run(args) => run(args),
            Command::Bench(args) => bench(args),
            Command::Gen(args) => gen(args),
            Command::Verify(args) => verify(args),
        });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Verification) => {
            eprintln!("error: verification failed");
            ExitCode::from(4)
        }
    }
}
