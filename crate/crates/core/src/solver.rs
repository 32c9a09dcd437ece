//! Normalized fixed-point iteration for eigenpairs with prescribed sup norm.
//!
//! Given a radius `rho` and an eigenvalue sign `sigma`, the iteration
//!
//! ```text
//! w       = T u_n
//! lambda  = sigma * rho / sup|w|
//! u_(n+1) = lambda * w
//! ```
//!
//! keeps `sup|u_n| = rho` for every iterate past the first and stops once
//! `sup|u_new - u| + |lambda_new - lambda|` drops below the tolerance.
//! Failing to meet the tolerance within the iteration budget is not an
//! error; the result carries a `converged` flag and diagnostics either way.

use serde::Serialize;
use std::fmt;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kernel::{KernelMatrix, KernelSpec};
use crate::localization::envelope_transforms;
use crate::problem::ProblemSpec;

/// Eigenvalue sign selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    #[serde(rename = "+1")]
    Plus,
    #[serde(rename = "-1")]
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// Iteration controls.
///
/// `initial_u` defaults to the constant `rho` profile and `initial_lambda`
/// to `sign * 1`; the initial eigenvalue only matters through its sign
/// because the first normalization replaces it.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub sign: Sign,
    pub initial_u: Option<Vec<f64>>,
    pub initial_lambda: Option<f64>,
}

impl SolverConfig {
    pub fn new(sign: Sign) -> Self {
        Self {
            tol: 1e-7,
            max_iter: 1000,
            sign,
            initial_u: None,
            initial_lambda: None,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
        }
        if let Some(u0) = &self.initial_u {
            if u0.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "initial profile has {} samples, grid has {n}",
                    u0.len()
                )));
            }
        }
        if let Some(l0) = self.initial_lambda {
            if !l0.is_finite() || l0 * self.sign.value() <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "initial eigenvalue {l0} does not match requested sign {}",
                    self.sign
                )));
            }
        }
        Ok(())
    }
}

/// One computed eigenpair with its diagnostics.
#[derive(Debug, Clone)]
pub struct EigenpairApprox {
    pub rho: f64,
    pub lambda: f64,
    /// Node samples of the eigenfunction, `sup|u| = rho`.
    pub u: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Fixed-point defect `sup|u - lambda*Tu|`, recomputed after the loop.
    pub consistency_error: f64,
    /// Max interior defect of the differential form, `None` for grids too
    /// small to difference.
    pub bvp_residual: Option<f64>,
    /// Iterate bound `max(|lambda_0|, rho / max F_lower)`; `None` when the
    /// lower transform has no positive part.
    pub c_rho: Option<f64>,
}

/// Sup norm over node samples (the discrete proxy for the sup norm).
pub fn sup_norm(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Run the normalized fixed-point iteration at radius `rho`.
///
/// Well-posedness is guaranteed while the lower envelope transform has a
/// positive maximum (`rho` below the threshold); outside that range the
/// iteration still runs, but the operator norm may collapse, which surfaces
/// as a breakdown error.
pub fn fixed_point_solve(
    rho: f64,
    config: &SolverConfig,
    problem: &ProblemSpec,
    kernel: &KernelMatrix,
    grid: &Grid,
) -> Result<EigenpairApprox> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "radius must be positive, got {rho}"
        )));
    }
    let n = grid.len();
    config.validate(n)?;

    let sigma = config.sign.value();
    let mut u = config
        .initial_u
        .clone()
        .unwrap_or_else(|| vec![rho; n]);
    let mut lambda = config.initial_lambda.unwrap_or(sigma);
    let lambda0_abs = lambda.abs();

    let mut converged = false;
    let mut iterations = 0;
    for k in 1..=config.max_iter {
        let w = problem.apply_hammerstein(kernel, grid, &u)?;
        let w_norm = sup_norm(&w);
        if w_norm == 0.0 {
            return Err(Error::Breakdown(format!(
                "sup norm of Tu vanished at iteration {k}"
            )));
        }
        let lambda_new = sigma * rho / w_norm;
        if !lambda_new.is_finite() {
            return Err(Error::NonFinite(format!(
                "eigenvalue update at iteration {k}"
            )));
        }
        let u_new: Vec<f64> = w.iter().map(|&x| lambda_new * x).collect();
        let delta = u_new
            .iter()
            .zip(&u)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            + (lambda_new - lambda).abs();
        u = u_new;
        lambda = lambda_new;
        iterations = k;
        if delta < config.tol {
            converged = true;
            break;
        }
    }

    let tu = problem.apply_hammerstein(kernel, grid, &u)?;
    let consistency_error = u
        .iter()
        .zip(&tu)
        .map(|(ui, ti)| (ui - lambda * ti).abs())
        .fold(0.0, f64::max);

    let envelope = problem.envelope(rho)?;
    let (lower, _) = envelope_transforms(&envelope, kernel, grid)?;
    let max_lower = lower.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let c_rho = (max_lower > 0.0).then(|| lambda0_abs.max(rho / max_lower));

    let mut pair = EigenpairApprox {
        rho,
        lambda,
        u,
        iterations,
        converged,
        consistency_error,
        bvp_residual: None,
        c_rho,
    };
    if n >= 5 {
        pair.bvp_residual =
            Some(bvp_residual(&pair, kernel.spec(), problem, grid)?.interior_max);
    }
    Ok(pair)
}

/// Recompute the fixed-point defect `sup|u - lambda*Tu|` of a pair.
pub fn consistency_error(
    pair: &EigenpairApprox,
    problem: &ProblemSpec,
    kernel: &KernelMatrix,
    grid: &Grid,
) -> Result<f64> {
    let tu = problem.apply_hammerstein(kernel, grid, &pair.u)?;
    Ok(pair
        .u
        .iter()
        .zip(&tu)
        .map(|(ui, ti)| (ui - pair.lambda * ti).abs())
        .fold(0.0, f64::max))
}

/// Finite-difference residual of the differential form of the problem.
#[derive(Debug, Clone, Copy)]
pub struct BvpResidual {
    /// Max over interior nodes of `|eps*u'' + omega^2*u - lambda*f|`.
    pub interior_max: f64,
    /// One-sided derivative magnitude at `t = 0`.
    pub boundary_derivative_left: f64,
    /// One-sided derivative magnitude at `t = 1`.
    pub boundary_derivative_right: f64,
}

/// Check an eigenpair against the differential form `eps*u'' + omega^2*u =
/// lambda*f(t, u, H[u])` by second-order central differences.
///
/// Nodes adjacent to grid breakpoints are excluded (the second derivative
/// loses smoothness order there), as are junctions where the local spacing
/// changes. The boundary derivative estimates land at zero at first order in
/// `h` when the pair honors the Neumann conditions.
pub fn bvp_residual(
    pair: &EigenpairApprox,
    spec: KernelSpec,
    problem: &ProblemSpec,
    grid: &Grid,
) -> Result<BvpResidual> {
    let n = grid.len();
    if n < 5 {
        return Err(Error::InvalidArgument(format!(
            "residual check needs at least 5 nodes, got {n}"
        )));
    }
    if pair.u.len() != n {
        return Err(Error::InvalidArgument(format!(
            "eigenfunction has {} samples, grid has {n}",
            pair.u.len()
        )));
    }
    let h_val = problem.eval_functional(grid, &pair.u)?;
    let t = grid.nodes();
    let u = &pair.u;
    let eps = spec.eps().value();
    let om2 = spec.omega() * spec.omega();
    let near_breakpoint = |x: f64| grid.breakpoints().contains(&x);

    let mut interior_max = 0.0f64;
    for i in 1..n - 1 {
        if near_breakpoint(t[i - 1]) || near_breakpoint(t[i]) || near_breakpoint(t[i + 1]) {
            continue;
        }
        let h_left = t[i] - t[i - 1];
        let h_right = t[i + 1] - t[i];
        if (h_left - h_right).abs() > 1e-9 * h_left.max(h_right) {
            continue;
        }
        let second = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h_left * h_right);
        let f = problem.eval_nonlinearity(t[i], u[i], h_val)?;
        interior_max = interior_max.max((eps * second + om2 * u[i] - pair.lambda * f).abs());
    }
    Ok(BvpResidual {
        interior_max,
        boundary_derivative_left: ((u[1] - u[0]) / (t[1] - t[0])).abs(),
        boundary_derivative_right: ((u[n - 1] - u[n - 2]) / (t[n - 1] - t[n - 2])).abs(),
    })
}
