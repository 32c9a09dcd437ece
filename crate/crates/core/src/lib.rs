//! Eigenpairs of parameter-dependent Hammerstein integral equations
//! equivalent to Neumann boundary value problems with a functional term.
//!
//! The integral equation is
//!
//! ```text
//! u(t) = lambda * Int_0^1 k(t, s) f(s, u(s), H[u]) ds,    t in [0, 1],
//! ```
//!
//! where `k` is the Green's kernel of `eps*u'' + omega^2*u` under Neumann
//! conditions and `H` is a scalar functional of the whole unknown. For each
//! target sup norm `rho` a normalized fixed-point iteration produces one
//! eigenpair per eigenvalue sign with `sup|u| = rho` exactly, and envelope
//! bounds on `f` yield an admissibility threshold `rho0` together with the
//! localization estimate `|lambda| <= rho / max F_lower` valid below it.
//!
//! Two ready-made problems are bundled (`example-minus` on the hyperbolic
//! kernel, `example-plus` on the trigonometric one); the `neumann-eigen`
//! binary sweeps them over `rho` and writes plot-ready CSV or JSON tables.
//!
//! ```
//! use neumann_eigen::{
//!     example_minus, fixed_point_solve, Grid, KernelMatrix, Sign, SolverConfig,
//! };
//!
//! let (problem, spec) = example_minus();
//! let grid = Grid::with_breakpoints(200, problem.breakpoints()).unwrap();
//! let kernel = KernelMatrix::assemble(spec, &grid);
//! let pair =
//!     fixed_point_solve(0.2, &SolverConfig::new(Sign::Plus), &problem, &kernel, &grid).unwrap();
//! assert!(pair.converged && pair.lambda > 0.0);
//! ```

mod error;
pub mod grid;
pub mod kernel;
pub mod localization;
pub mod problem;
pub mod solver;
pub mod sweep;

pub use error::{Error, Result};
pub use grid::Grid;
pub use kernel::{Eps, KernelMatrix, KernelSpec};
pub use localization::{
    closed_form_integrals, closed_form_lower, closed_form_lower_max, closed_form_upper,
    compute_rho_threshold, envelope_transforms, localize, ActiveCondition, BranchIntegrals,
    LocalizationReport, RhoThresholds, DEFAULT_SEARCH_POINTS,
};
pub use problem::{
    example_minus, example_plus, preset, EnvelopeBounds, ProblemSpec, FORCING_SIGN_CHANGE,
};
pub use solver::{
    bvp_residual, consistency_error, fixed_point_solve, sup_norm, BvpResidual, EigenpairApprox,
    Sign, SolverConfig,
};
pub use sweep::{
    bound_curve, default_rho_max, emit_outputs, linspace, resolve_problem, run_sweep, BoundPoint,
    EigenfunctionProfile, OutputFormat, SweepConfig, SweepResult, SweepRow, SweepSummary,
    RESULTS_CSV_HEADER,
};
