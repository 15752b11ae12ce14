use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{warn, LevelFilter};
use sparsh::config::SolverConfig;
use sparsh::error::AppError;
use sparsh::problem::{build_rhs, ProblemSpec, RhsMode};
use sparsh::{mtx, report, run};
use sparsh_core::{compare_schemes, setup, BytesModel, CsrMatrix, CycleParams};

/// Aggregation AMG solver and benchmark driver.
#[derive(Parser)]
#[command(name = "sparsh", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a model problem and write it as Matrix Market.
    Gen(GenArgs),
    /// Build the hierarchy (if needed) and solve `A x = b`.
    Run(RunArgs),
    /// Print the coarsening hierarchy level by level.
    CoarsenInfo(InfoArgs),
    /// Print device memory and transfer estimates for the CI and MI placements.
    Memplan(MemplanArgs),
}

#[derive(Args)]
struct MatrixArgs {
    /// poisson2d:NXxNY, convdiff2d:NXxNY[:bx,by,c] or example6.
    #[arg(long, conflicts_with = "matrix")]
    problem: Option<ProblemSpec>,
    /// Matrix Market coordinate file.
    #[arg(long)]
    matrix: Option<PathBuf>,
}

impl MatrixArgs {
    fn spec(&self) -> Result<ProblemSpec, AppError> {
        match (&self.problem, &self.matrix) {
            (Some(p), _) => Ok(p.clone()),
            (None, Some(path)) => Ok(ProblemSpec::File(path.clone())),
            (None, None) => Err(AppError::Usage("one of --problem or --matrix is required".into())),
        }
    }
}

/// Settings shared by every command that builds a hierarchy. Values are
/// kept as text and validated by the config layer so that file entries and
/// flags go through the same parser.
#[derive(Args)]
struct SettingArgs {
    /// key = value file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// amg, cg, pcg, bicgstab or pbicgstab.
    #[arg(long)]
    solver: Option<String>,
    /// node_hem, node_hem_alt or edge_hem.
    #[arg(long)]
    coarsening: Option<String>,
    /// jacobi[:omega], gs_forward, gs_backward or gs_symmetric.
    #[arg(long)]
    smoother: Option<String>,
    #[arg(long)]
    pre: Option<String>,
    #[arg(long)]
    post: Option<String>,
    #[arg(long)]
    coarse_target: Option<String>,
    #[arg(long)]
    max_levels: Option<String>,
    /// direct or cg.
    #[arg(long)]
    coarse_solver: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    max_iters: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    threads: Option<String>,
}

impl SettingArgs {
    fn resolve(&self, base: SolverConfig) -> Result<SolverConfig, AppError> {
        let flags = [
            ("solver", &self.solver),
            ("coarsening", &self.coarsening),
            ("smoother", &self.smoother),
            ("pre", &self.pre),
            ("post", &self.post),
            ("coarse_target", &self.coarse_target),
            ("max_levels", &self.max_levels),
            ("coarse_solver", &self.coarse_solver),
            ("tol", &self.tol),
            ("max_iters", &self.max_iters),
            ("seed", &self.seed),
            ("threads", &self.threads),
        ];
        let overrides = flags.into_iter().filter_map(|(k, v)| v.clone().map(|v| (k, v)));
        let cfg = SolverConfig::resolve(base, self.config.as_deref(), overrides)?;
        configure_threads(cfg.threads);
        Ok(cfg)
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    problem: ProblemSpec,
    /// Output .mtx path; without it only a summary is printed.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    #[command(flatten)]
    settings: SettingArgs,
    /// ones, random (seeded by --seed) or file:PATH.
    #[arg(long, default_value = "ones")]
    rhs: RhsMode,
    /// Convergence CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InfoArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    /// Coarsening runs down to a single unknown unless --coarse-target or
    /// --max-levels say otherwise.
    #[command(flatten)]
    settings: SettingArgs,
    /// Per-level CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Ci,
    Mi,
    Both,
}

#[derive(Args)]
struct MemplanArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    #[command(flatten)]
    settings: SettingArgs,
    #[arg(long, value_enum, default_value = "both")]
    scheme: SchemeArg,
    /// Bytes per stored value.
    #[arg(long, default_value_t = 8)]
    value_bytes: usize,
    /// Bytes per stored index.
    #[arg(long, default_value_t = 4)]
    index_bytes: usize,
    /// Also print the event timeline.
    #[arg(long)]
    events: bool,
    /// CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    init_logging();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Run(args) => cmd_run(args),
        Command::CoarsenInfo(args) => cmd_coarsen_info(args),
        Command::Memplan(args) => cmd_memplan(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(AppError::Io { source, .. }) if source.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn init_logging() {
    let raw = std::env::var("SPARSH_LOG").unwrap_or_default();
    let (level, unknown) = match raw.to_ascii_lowercase().as_str() {
        "quiet" => (LevelFilter::Off, false),
        "info" => (LevelFilter::Info, false),
        "debug" => (LevelFilter::Debug, false),
        "" => (LevelFilter::Warn, false),
        _ => (LevelFilter::Warn, true),
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();
    if unknown {
        warn!("SPARSH_LOG={raw} not recognised; use quiet, info or debug");
    }
}

#[cfg(feature = "rayon")]
fn configure_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            warn!("cannot set thread count: {e}");
        }
    }
}

#[cfg(not(feature = "rayon"))]
fn configure_threads(threads: Option<usize>) {
    if threads.is_some() {
        warn!("built without the rayon feature; --threads is ignored");
    }
}

fn create(path: &PathBuf) -> Result<BufWriter<File>, AppError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| AppError::io(path.display().to_string(), e))
}

fn write_file(
    path: &PathBuf,
    body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>,
) -> Result<(), AppError> {
    let mut w = create(path)?;
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| AppError::io(path.display().to_string(), e))
}

fn stdout_err(e: io::Error) -> AppError {
    AppError::io("stdout", e)
}

fn load(spec: &ProblemSpec) -> Result<CsrMatrix, AppError> {
    let a = spec.build()?;
    log::info!("{spec}: {} rows, {} nonzeros", a.nrows(), a.nnz());
    Ok(a)
}

fn cmd_gen(args: GenArgs) -> Result<u8, AppError> {
    let a = load(&args.problem)?;
    if let Some(path) = &args.out {
        mtx::write_matrix_market(&a, path)?;
    }
    let mut out = io::stdout().lock();
    writeln!(out, "problem {}", args.problem).map_err(stdout_err)?;
    writeln!(out, "rows {}\nnnz {}", a.nrows(), a.nnz()).map_err(stdout_err)?;
    writeln!(out, "symmetric {}", if a.is_symmetric(0.0) { "yes" } else { "no" }).map_err(stdout_err)?;
    Ok(0)
}

fn cmd_run(args: RunArgs) -> Result<u8, AppError> {
    let spec = args.matrix.spec()?;
    let cfg = args.settings.resolve(SolverConfig::default())?;
    let a = load(&spec)?;
    if !a.is_square() {
        return Err(AppError::Usage(format!("matrix is {}x{}, not square", a.nrows(), a.ncols())));
    }
    let b = build_rhs(&args.rhs, a.nrows(), cfg.seed)?;
    let outcome = run::solve(&a, &b, &cfg)?;
    if let Some(path) = &args.out {
        write_file(path, |w| report::write_convergence_csv(&outcome.report, w))?;
    }
    report::write_run_summary(&mut io::stdout().lock(), &spec.to_string(), &a, &cfg, &outcome)
        .map_err(stdout_err)?;
    if outcome.report.converged() {
        Ok(0)
    } else {
        eprintln!(
            "not converged: {} after {} iterations",
            outcome.report.termination.as_str(),
            outcome.report.iterations
        );
        Ok(1)
    }
}

fn cmd_coarsen_info(args: InfoArgs) -> Result<u8, AppError> {
    let spec = args.matrix.spec()?;
    let mut base = SolverConfig::default();
    base.amg.coarse_target = 1;
    base.amg.max_levels = usize::MAX;
    let cfg = args.settings.resolve(base)?;
    let a = load(&spec)?;
    let h = setup(&a, &cfg.amg)?;
    let mut out = io::stdout().lock();
    writeln!(out, "problem {spec}").map_err(stdout_err)?;
    writeln!(out, "coarsening {}", sparsh::config::coarsening_name(cfg.amg.coarsening)).map_err(stdout_err)?;
    report::write_hierarchy_table(&mut out, &h).map_err(stdout_err)?;
    if let Some(path) = &args.out {
        write_file(path, |w| report::write_stats_csv(w, &h.stats()))?;
    }
    Ok(0)
}

fn cmd_memplan(args: MemplanArgs) -> Result<u8, AppError> {
    let spec = args.matrix.spec()?;
    let cfg = args.settings.resolve(SolverConfig::default())?;
    let a = load(&spec)?;
    let h = setup(&a, &cfg.amg)?;
    let bm = BytesModel {
        value_bytes: args.value_bytes,
        index_bytes: args.index_bytes,
    };
    let cmp = compare_schemes(&h, &CycleParams::from(&cfg.amg), bm);
    let plans: Vec<_> = match args.scheme {
        SchemeArg::Ci => vec![&cmp.ci],
        SchemeArg::Mi => vec![&cmp.mi],
        SchemeArg::Both => vec![&cmp.ci, &cmp.mi],
    };
    let mut out = io::stdout().lock();
    writeln!(out, "problem {spec}\nlevels {}", h.num_levels()).map_err(stdout_err)?;
    report::write_memplan_table(&mut out, &plans).map_err(stdout_err)?;
    if matches!(args.scheme, SchemeArg::Both) {
        report::write_ratios(&mut out, &cmp).map_err(stdout_err)?;
    }
    if args.events {
        for p in &plans {
            report::write_events(&mut out, p).map_err(stdout_err)?;
        }
    }
    if let Some(path) = &args.out {
        write_file(path, |w| report::write_memplan_csv(w, &plans))?;
    }
    Ok(0)
}
