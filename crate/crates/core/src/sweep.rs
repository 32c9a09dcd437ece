//! End-to-end parameter sweep: thresholds, per-radius eigenpairs for both
//! signs, the theoretical bound curve, and machine-readable output files.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kernel::{Eps, KernelMatrix, KernelSpec};
use crate::localization::{
    closed_form_lower_max, compute_rho_threshold, localize, RhoThresholds,
    DEFAULT_SEARCH_POINTS,
};
use crate::problem::{preset, ProblemSpec};
use crate::solver::{fixed_point_solve, EigenpairApprox, Sign, SolverConfig};

/// Sampling density per branch when tracing the bound curve.
const BOUND_CURVE_SAMPLES: usize = 600;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

/// Sweep configuration; `None` fields fall back to the preset defaults
/// (`eps`, `omega`) or to the eps-dependent default range (`rho_max`).
#[derive(Debug, Clone, Serialize)]
pub struct SweepConfig {
    pub problem: String,
    pub eps: Option<Eps>,
    pub omega: Option<f64>,
    pub n_grid: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub rho_min: f64,
    pub rho_max: Option<f64>,
    pub rho_count: usize,
    pub bound_curve_count: usize,
    pub format: OutputFormat,
    pub out_dir: PathBuf,
    pub profiles: bool,
}

impl SweepConfig {
    pub fn new(problem: &str) -> Self {
        Self {
            problem: problem.to_string(),
            eps: None,
            omega: None,
            n_grid: 1000,
            tol: 1e-7,
            max_iter: 1000,
            rho_min: 5e-3,
            rho_max: None,
            rho_count: 15,
            bound_curve_count: 1000,
            format: OutputFormat::Csv,
            out_dir: PathBuf::from("out"),
            profiles: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rho_min.is_finite() && self.rho_min > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "rho_min must be positive, got {}",
                self.rho_min
            )));
        }
        if let Some(rho_max) = self.rho_max {
            if !(rho_max.is_finite() && rho_max >= self.rho_min) {
                return Err(Error::InvalidArgument(format!(
                    "rho_max = {rho_max} must be at least rho_min = {}",
                    self.rho_min
                )));
            }
        }
        if self.rho_count == 0 || self.bound_curve_count == 0 {
            return Err(Error::InvalidArgument("counts must be at least 1".into()));
        }
        Ok(())
    }
}

/// Default sweep upper radius per kernel family.
pub fn default_rho_max(eps: Eps) -> f64 {
    match eps {
        Eps::Minus => 0.25,
        Eps::Plus => 0.75,
    }
}

fn canonical_omega(eps: Eps) -> f64 {
    match eps {
        Eps::Minus => 1.0,
        Eps::Plus => FRAC_PI_2,
    }
}

/// Resolve the preset plus any `eps`/`omega` overrides into a concrete
/// kernel spec. Overriding `eps` without `omega` switches to the canonical
/// frequency of the other kernel family.
pub fn resolve_problem(config: &SweepConfig) -> Result<(ProblemSpec, KernelSpec)> {
    let (problem, default_spec) = preset(&config.problem)?;
    let eps = config.eps.unwrap_or_else(|| default_spec.eps());
    let omega = match config.omega {
        Some(om) => om,
        None if eps == default_spec.eps() => default_spec.omega(),
        None => canonical_omega(eps),
    };
    Ok((problem, KernelSpec::new(eps, omega)?))
}

/// One sweep line: both eigenpairs at a radius plus the theoretical bound.
/// Solver breakdown leaves the affected fields empty instead of failing the
/// sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub rho: f64,
    pub lambda_plus: Option<f64>,
    pub err_plus: Option<f64>,
    pub converged_plus: bool,
    pub lambda_minus: Option<f64>,
    pub err_minus: Option<f64>,
    pub converged_minus: bool,
    pub bound: Option<f64>,
    pub bvp_residual_plus: Option<f64>,
    pub bvp_residual_minus: Option<f64>,
}

/// Point of the theoretical bound curve `(rho, a(rho), -a(rho))`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundPoint {
    pub rho: f64,
    pub bound: Option<f64>,
    pub neg_bound: Option<f64>,
}

/// Node samples of both eigenfunctions at one radius.
#[derive(Debug, Clone)]
pub struct EigenfunctionProfile {
    pub rho: f64,
    pub u_plus: Option<Vec<f64>>,
    pub u_minus: Option<Vec<f64>>,
}

/// Resolved configuration echo plus the thresholds.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub problem: String,
    pub eps: Eps,
    pub omega: f64,
    pub n_grid: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub rho_min: f64,
    pub rho_max: f64,
    pub rho_count: usize,
    pub bound_curve_count: usize,
    pub rho1: Option<f64>,
    pub rho2: Option<f64>,
    pub rho0: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub summary: SweepSummary,
    pub rows: Vec<SweepRow>,
    pub bound_curve: Vec<BoundPoint>,
    /// Grid nodes shared by all profiles.
    pub nodes: Vec<f64>,
    pub profiles: Vec<EigenfunctionProfile>,
}

/// `count` points from `a` to `b` inclusive (just `a` when `count == 1`).
pub fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![a];
    }
    (0..count)
        .map(|i| {
            if i == count - 1 {
                b
            } else {
                a + (b - a) * i as f64 / (count - 1) as f64
            }
        })
        .collect()
}

/// Bound curve `a(rho) = rho / max F_lower(rho)` on `count` points strictly
/// inside `(0, rho0)`, from the closed forms.
pub fn bound_curve(eps: Eps, rho0: f64, count: usize) -> Vec<BoundPoint> {
    (1..=count)
        .map(|j| {
            let rho = rho0 * j as f64 / (count + 1) as f64;
            let (_, max_lower) = closed_form_lower_max(eps, rho, BOUND_CURVE_SAMPLES);
            let bound = (max_lower > 0.0).then(|| rho / max_lower);
            BoundPoint {
                rho,
                bound,
                neg_bound: bound.map(|b| -b),
            }
        })
        .collect()
}

/// Run the full sweep: grid and kernel assembled once, thresholds computed,
/// then for every radius both eigenvalue signs solved and the localization
/// bound attached. Rows come out ordered by increasing radius.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let (problem, spec) = resolve_problem(config)?;
    let grid = Grid::with_breakpoints(config.n_grid, problem.breakpoints())?;
    let kernel = KernelMatrix::assemble(spec, &grid);
    let thresholds: RhoThresholds = compute_rho_threshold(spec.eps(), DEFAULT_SEARCH_POINTS)?;

    let rho_max = config.rho_max.unwrap_or_else(|| default_rho_max(spec.eps()));
    if rho_max < config.rho_min {
        return Err(Error::InvalidArgument(format!(
            "default rho_max = {rho_max} is below rho_min = {}",
            config.rho_min
        )));
    }
    let rhos = linspace(config.rho_min, rho_max, config.rho_count);

    let per_rho: Vec<(SweepRow, EigenfunctionProfile)> = rhos
        .par_iter()
        .map(|&rho| compute_row(rho, &problem, &kernel, &grid, config.tol, config.max_iter))
        .collect::<Result<_>>()?;
    let (rows, profiles): (Vec<_>, Vec<_>) = per_rho.into_iter().unzip();

    let summary = SweepSummary {
        problem: problem.name().to_string(),
        eps: spec.eps(),
        omega: spec.omega(),
        n_grid: config.n_grid,
        tol: config.tol,
        max_iter: config.max_iter,
        rho_min: config.rho_min,
        rho_max,
        rho_count: config.rho_count,
        bound_curve_count: config.bound_curve_count,
        rho1: thresholds.rho1,
        rho2: thresholds.rho2,
        rho0: thresholds.rho0,
    };
    Ok(SweepResult {
        summary,
        rows,
        bound_curve: bound_curve(spec.eps(), thresholds.rho0, config.bound_curve_count),
        nodes: grid.nodes().to_vec(),
        profiles,
    })
}

fn compute_row(
    rho: f64,
    problem: &ProblemSpec,
    kernel: &KernelMatrix,
    grid: &Grid,
    tol: f64,
    max_iter: usize,
) -> Result<(SweepRow, EigenfunctionProfile)> {
    let envelope = problem.envelope(rho)?;
    let report = localize(rho, kernel.spec().eps(), &envelope, kernel, grid)?;

    let solve = |sign: Sign| -> Result<Option<EigenpairApprox>> {
        let config = SolverConfig {
            tol,
            max_iter,
            ..SolverConfig::new(sign)
        };
        match fixed_point_solve(rho, &config, problem, kernel, grid) {
            Ok(pair) => Ok(Some(pair)),
            // breakdown is a per-row outcome, not a sweep failure
            Err(Error::Breakdown(_)) | Err(Error::NonFinite(_)) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let plus = solve(Sign::Plus)?;
    let minus = solve(Sign::Minus)?;

    let row = SweepRow {
        rho,
        lambda_plus: plus.as_ref().map(|p| p.lambda),
        err_plus: plus.as_ref().map(|p| p.consistency_error),
        converged_plus: plus.as_ref().is_some_and(|p| p.converged),
        lambda_minus: minus.as_ref().map(|p| p.lambda),
        err_minus: minus.as_ref().map(|p| p.consistency_error),
        converged_minus: minus.as_ref().is_some_and(|p| p.converged),
        bound: report.bound,
        bvp_residual_plus: plus.as_ref().and_then(|p| p.bvp_residual),
        bvp_residual_minus: minus.as_ref().and_then(|p| p.bvp_residual),
    };
    let profile = EigenfunctionProfile {
        rho,
        u_plus: plus.map(|p| p.u),
        u_minus: minus.map(|p| p.u),
    };
    Ok((row, profile))
}

pub const RESULTS_CSV_HEADER: &str = "rho,lambda_plus,err_plus,converged_plus,lambda_minus,err_minus,converged_minus,bound,bvp_residual_plus,bvp_residual_minus";

fn opt_field(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn results_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(RESULTS_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.rho,
            opt_field(r.lambda_plus),
            opt_field(r.err_plus),
            r.converged_plus,
            opt_field(r.lambda_minus),
            opt_field(r.err_minus),
            r.converged_minus,
            opt_field(r.bound),
            opt_field(r.bvp_residual_plus),
            opt_field(r.bvp_residual_minus),
        ));
    }
    out
}

fn bound_curve_csv(curve: &[BoundPoint]) -> String {
    let mut out = String::from("rho,bound,neg_bound\n");
    for p in curve {
        out.push_str(&format!(
            "{},{},{}\n",
            p.rho,
            opt_field(p.bound),
            opt_field(p.neg_bound)
        ));
    }
    out
}

fn profile_csv(nodes: &[f64], profile: &EigenfunctionProfile) -> String {
    let mut out = String::from("t,u_plus,u_minus\n");
    for (i, t) in nodes.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{}\n",
            t,
            opt_field(profile.u_plus.as_ref().map(|u| u[i])),
            opt_field(profile.u_minus.as_ref().map(|u| u[i])),
        ));
    }
    out
}

#[derive(Serialize)]
struct ProfileJson<'a> {
    rho: f64,
    t: &'a [f64],
    u_plus: &'a Option<Vec<f64>>,
    u_minus: &'a Option<Vec<f64>>,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

/// Write the sweep outputs under `config.out_dir` and report the paths:
/// the results table, the bound curve, a summary with the thresholds, the
/// configuration echo, and (on request) one eigenfunction profile per
/// radius. Identical inputs produce byte-identical files.
pub fn emit_outputs(result: &SweepResult, config: &SweepConfig) -> Result<Vec<PathBuf>> {
    if result.rows.is_empty() {
        return Err(Error::InvalidArgument("no sweep rows to write".into()));
    }
    fs::create_dir_all(&config.out_dir).map_err(|source| Error::Io {
        path: config.out_dir.clone(),
        source,
    })?;
    let mut written = Vec::new();
    let ext = config.format.to_string();

    let results_path = config.out_dir.join(format!("results.{ext}"));
    let results = match config.format {
        OutputFormat::Csv => results_csv(&result.rows),
        OutputFormat::Json => to_json(&result.rows),
    };
    write_file(&results_path, &results)?;
    written.push(results_path);

    let curve_path = config.out_dir.join(format!("bound_curve.{ext}"));
    let curve = match config.format {
        OutputFormat::Csv => bound_curve_csv(&result.bound_curve),
        OutputFormat::Json => to_json(&result.bound_curve),
    };
    write_file(&curve_path, &curve)?;
    written.push(curve_path);

    let summary_path = config.out_dir.join("summary.json");
    write_file(&summary_path, &to_json(&result.summary))?;
    written.push(summary_path);

    let config_path = config.out_dir.join("config.json");
    write_file(&config_path, &to_json(config))?;
    written.push(config_path);

    if config.profiles {
        for profile in &result.profiles {
            let path = config
                .out_dir
                .join(format!("profile_rho_{}.{ext}", profile.rho));
            let contents = match config.format {
                OutputFormat::Csv => profile_csv(&result.nodes, profile),
                OutputFormat::Json => to_json(&ProfileJson {
                    rho: profile.rho,
                    t: &result.nodes,
                    u_plus: &profile.u_plus,
                    u_minus: &profile.u_minus,
                }),
            };
            write_file(&path, &contents)?;
            written.push(path);
        }
    }
    Ok(written)
}
