use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use neumann_eigen::{
    bound_curve, compute_rho_threshold, fixed_point_solve, localize, resolve_problem, run_sweep,
    BoundPoint, Eps, Error, Grid, KernelMatrix, OutputFormat, Result, Sign, SolverConfig,
    SweepConfig, DEFAULT_SEARCH_POINTS,
};

#[derive(Parser)]
#[command(
    name = "neumann-eigen",
    version,
    about = "Eigenvalue sweeps for Hammerstein integral equations from Neumann BVPs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Admissibility thresholds and the theoretical bound curve only.
    Bounds(BoundsArgs),
    /// One eigenpair at a fixed radius.
    Solve(SolveArgs),
    /// Full sweep: both eigenvalue signs over a range of radii.
    Sweep(SweepArgs),
}

#[derive(Args, Clone)]
struct ProblemArgs {
    /// Bundled problem name (example-minus or example-plus).
    #[arg(long, default_value = "example-minus")]
    problem: String,
    /// Kernel family override: -1 (hyperbolic) or +1 (trigonometric).
    #[arg(long, value_parser = parse_eps, allow_hyphen_values = true)]
    eps: Option<Eps>,
    /// Kernel frequency override.
    #[arg(long)]
    omega: Option<f64>,
    /// Output format: csv or json.
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    common: ProblemArgs,
    /// Points on the theoretical bound curve.
    #[arg(long, default_value_t = 1000)]
    bound_curve_count: usize,
    /// Directory for the bound-curve and summary files (print-only if absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: ProblemArgs,
    /// Target sup norm of the eigenfunction.
    #[arg(long)]
    rho: f64,
    /// Eigenvalue sign: + or -.
    #[arg(long, value_parser = parse_sign, allow_hyphen_values = true)]
    sign: Sign,
    #[arg(long, default_value_t = 1000)]
    n_grid: usize,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
    /// Directory for the eigenfunction profile (print-only if absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: ProblemArgs,
    #[arg(long, default_value_t = 1000)]
    n_grid: usize,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
    #[arg(long, default_value_t = 5e-3)]
    rho_min: f64,
    /// Upper end of the sweep (default 0.25 for eps = -1, 0.75 for eps = +1).
    #[arg(long)]
    rho_max: Option<f64>,
    #[arg(long, default_value_t = 15)]
    rho_count: usize,
    #[arg(long, default_value_t = 1000)]
    bound_curve_count: usize,
    /// Also write one eigenfunction profile file per radius.
    #[arg(long)]
    profiles: bool,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn parse_eps(s: &str) -> std::result::Result<Eps, String> {
    match s {
        "-1" | "-" | "minus" => Ok(Eps::Minus),
        "+1" | "1" | "+" | "plus" => Ok(Eps::Plus),
        other => Err(format!("expected -1 or +1, got '{other}'")),
    }
}

fn parse_sign(s: &str) -> std::result::Result<Sign, String> {
    match s {
        "+" | "+1" | "plus" => Ok(Sign::Plus),
        "-" | "-1" | "minus" => Ok(Sign::Minus),
        other => Err(format!("expected + or -, got '{other}'")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Bounds(args) => cmd_bounds(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn base_config(common: &ProblemArgs) -> SweepConfig {
    let mut config = SweepConfig::new(&common.problem);
    config.eps = common.eps;
    config.omega = common.omega;
    config.format = common.format;
    config
}

fn opt_display(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "undefined".into())
}

fn write_out(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct BoundsSummary {
    problem: String,
    eps: Eps,
    omega: f64,
    rho1: Option<f64>,
    rho2: Option<f64>,
    rho0: f64,
    bound_curve_count: usize,
}

fn cmd_bounds(args: BoundsArgs) -> Result<()> {
    let config = base_config(&args.common);
    let (problem, spec) = resolve_problem(&config)?;
    let thresholds = compute_rho_threshold(spec.eps(), DEFAULT_SEARCH_POINTS)?;

    println!("problem: {}", problem.name());
    println!("eps: {}", spec.eps());
    println!("omega: {}", spec.omega());
    println!("rho1: {}", opt_display(thresholds.rho1));
    println!("rho2: {}", opt_display(thresholds.rho2));
    println!("rho0: {}", thresholds.rho0);

    if let Some(dir) = args.out {
        std::fs::create_dir_all(&dir).map_err(|source| Error::Io {
            path: dir.clone(),
            source,
        })?;
        let curve = bound_curve(spec.eps(), thresholds.rho0, args.bound_curve_count);
        let curve_path = dir.join(format!("bound_curve.{}", config.format));
        let contents = match config.format {
            OutputFormat::Csv => curve_to_csv(&curve),
            OutputFormat::Json => to_json(&curve),
        };
        write_out(&curve_path, &contents)?;
        let summary = BoundsSummary {
            problem: problem.name().to_string(),
            eps: spec.eps(),
            omega: spec.omega(),
            rho1: thresholds.rho1,
            rho2: thresholds.rho2,
            rho0: thresholds.rho0,
            bound_curve_count: args.bound_curve_count,
        };
        let summary_path = dir.join("summary.json");
        write_out(&summary_path, &to_json(&summary))?;
        println!("wrote: {}", curve_path.display());
        println!("wrote: {}", summary_path.display());
    }
    Ok(())
}

fn curve_to_csv(curve: &[BoundPoint]) -> String {
    let mut out = String::from("rho,bound,neg_bound\n");
    for p in curve {
        let bound = p.bound.map(|b| b.to_string()).unwrap_or_default();
        let neg = p.neg_bound.map(|b| b.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{},{}\n", p.rho, bound, neg));
    }
    out
}

#[derive(Serialize)]
struct SolveSummary {
    problem: String,
    eps: Eps,
    omega: f64,
    n_grid: usize,
    rho: f64,
    sign: Sign,
    lambda: f64,
    iterations: usize,
    converged: bool,
    consistency_error: f64,
    bvp_residual: Option<f64>,
    bound: Option<f64>,
    rho0: f64,
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    let config = base_config(&args.common);
    let (problem, spec) = resolve_problem(&config)?;
    let grid = Grid::with_breakpoints(args.n_grid, problem.breakpoints())?;
    let kernel = KernelMatrix::assemble(spec, &grid);
    let envelope = problem.envelope(args.rho)?;
    let report = localize(args.rho, spec.eps(), &envelope, &kernel, &grid)?;
    let solver_config = SolverConfig {
        tol: args.tol,
        max_iter: args.max_iter,
        ..SolverConfig::new(args.sign)
    };
    let pair = fixed_point_solve(args.rho, &solver_config, &problem, &kernel, &grid)?;

    println!("problem: {}", problem.name());
    println!("eps: {}", spec.eps());
    println!("omega: {}", spec.omega());
    println!("rho: {}", args.rho);
    println!("sign: {}", args.sign);
    println!("lambda: {}", pair.lambda);
    println!("iterations: {}", pair.iterations);
    println!("converged: {}", pair.converged);
    println!("consistency_error: {}", pair.consistency_error);
    println!("bvp_residual: {}", opt_display(pair.bvp_residual));
    println!("bound: {}", opt_display(report.bound));
    println!("rho0: {}", report.rho0);

    if let Some(dir) = args.out {
        std::fs::create_dir_all(&dir).map_err(|source| Error::Io {
            path: dir.clone(),
            source,
        })?;
        let profile_path = dir.join(format!("profile_rho_{}.{}", args.rho, config.format));
        let contents = match config.format {
            OutputFormat::Csv => {
                let mut out = String::from("t,u\n");
                for (t, u) in grid.nodes().iter().zip(&pair.u) {
                    out.push_str(&format!("{t},{u}\n"));
                }
                out
            }
            OutputFormat::Json => {
                #[derive(Serialize)]
                struct ProfileJson<'a> {
                    rho: f64,
                    t: &'a [f64],
                    u: &'a [f64],
                }
                to_json(&ProfileJson {
                    rho: args.rho,
                    t: grid.nodes(),
                    u: &pair.u,
                })
            }
        };
        write_out(&profile_path, &contents)?;
        let summary = SolveSummary {
            problem: problem.name().to_string(),
            eps: spec.eps(),
            omega: spec.omega(),
            n_grid: args.n_grid,
            rho: args.rho,
            sign: args.sign,
            lambda: pair.lambda,
            iterations: pair.iterations,
            converged: pair.converged,
            consistency_error: pair.consistency_error,
            bvp_residual: pair.bvp_residual,
            bound: report.bound,
            rho0: report.rho0,
        };
        let summary_path = dir.join("summary.json");
        write_out(&summary_path, &to_json(&summary))?;
        println!("wrote: {}", profile_path.display());
        println!("wrote: {}", summary_path.display());
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let mut config = base_config(&args.common);
    config.n_grid = args.n_grid;
    config.tol = args.tol;
    config.max_iter = args.max_iter;
    config.rho_min = args.rho_min;
    config.rho_max = args.rho_max;
    config.rho_count = args.rho_count;
    config.bound_curve_count = args.bound_curve_count;
    config.profiles = args.profiles;
    config.out_dir = args.out;

    let result = run_sweep(&config)?;
    let files = neumann_eigen::emit_outputs(&result, &config)?;

    println!("problem: {}", result.summary.problem);
    println!("eps: {}", result.summary.eps);
    println!("omega: {}", result.summary.omega);
    println!("rho1: {}", opt_display(result.summary.rho1));
    println!("rho2: {}", opt_display(result.summary.rho2));
    println!("rho0: {}", result.summary.rho0);
    println!("rows: {}", result.rows.len());
    let unconverged = result
        .rows
        .iter()
        .filter(|r| !(r.converged_plus && r.converged_minus))
        .count();
    println!("unconverged: {unconverged}");
    for f in files {
        println!("wrote: {}", f.display());
    }
    Ok(())
}
