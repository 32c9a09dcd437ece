//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured quantities. Tolerances are pinned in the assertions.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use neumann_eigen::{
    bvp_residual, closed_form_integrals, closed_form_lower, closed_form_upper,
    envelope_transforms, example_minus, example_plus, fixed_point_solve, run_sweep, sup_norm, Eps,
    Grid, KernelMatrix, ProblemSpec, Sign, SolverConfig, SweepConfig, FORCING_SIGN_CHANGE,
    RESULTS_CSV_HEADER,
};

const LN3_OVER_4: f64 = 0.27465307216702745;
const LN3_OVER_2: f64 = 0.5493061443340549;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_neumann-eigen")
}

fn run_bin(args: &[&str]) -> (String, bool, Duration) {
    let start = Instant::now();
    let output = Command::new(bin())
        .args(args)
        .output()
        .expect("binary should run");
    let elapsed = start.elapsed();
    let stdout = String::from_utf8(output.stdout).expect("utf-8 stdout");
    (stdout, output.status.success(), elapsed)
}

fn stdout_value(stdout: &str, key: &str) -> f64 {
    let prefix = format!("{key}: ");
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no '{key}' line in:\n{stdout}"))
        .trim()
        .parse()
        .unwrap_or_else(|_| panic!("unparsable '{key}' value"))
}

fn setup(eps: Eps, n: usize) -> (ProblemSpec, KernelMatrix, Grid) {
    let (problem, spec) = match eps {
        Eps::Minus => example_minus(),
        Eps::Plus => example_plus(),
    };
    let grid = Grid::with_breakpoints(n, problem.breakpoints()).unwrap();
    let kernel = KernelMatrix::assemble(spec, &grid);
    (problem, kernel, grid)
}

/// Closed-form maximum of the lower transform for the trigonometric kernel.
fn trig_lower_max(rho: f64) -> f64 {
    (9.0 * (-2.0 * rho).exp() - (2.0 * rho).exp()) / (4.0 * PI * PI)
}

#[test]
fn criterion_01_thresholds_trigonometric() {
    let (stdout, ok, elapsed) = run_bin(&["bounds", "--problem", "example-plus"]);
    assert!(ok);
    let rho1 = stdout_value(&stdout, "rho1");
    let rho2 = stdout_value(&stdout, "rho2");
    let rho0 = stdout_value(&stdout, "rho0");
    assert!((rho1 - LN3_OVER_4).abs() < 1e-6, "rho1 = {rho1}");
    assert!((rho2 - LN3_OVER_2).abs() < 1e-6, "rho2 = {rho2}");
    assert!((rho0 - LN3_OVER_2).abs() < 1e-6, "rho0 = {rho0}");
    assert!(
        elapsed < Duration::from_secs(1),
        "bounds took {elapsed:?}, budget is 1 s"
    );
    println!(
        "ACCEPTANCE criterion 1 (eps=+1 thresholds rho1={rho1}, rho2={rho2}, {elapsed:?}): PASS"
    );
}

#[test]
fn criterion_02_threshold_hyperbolic() {
    let (stdout, ok, elapsed) = run_bin(&["bounds", "--problem", "example-minus"]);
    assert!(ok);
    let rho0 = stdout_value(&stdout, "rho0");
    assert!((rho0 - 0.2252).abs() < 5e-4, "rho0 = {rho0}");
    assert!(
        elapsed < Duration::from_secs(1),
        "bounds took {elapsed:?}, budget is 1 s"
    );
    println!("ACCEPTANCE criterion 2 (eps=-1 threshold rho0={rho0}, {elapsed:?}): PASS");
}

#[test]
fn criterion_03_closed_form_maximum() {
    let (problem, kernel, grid) = setup(Eps::Plus, 1000);
    for rho in [0.1, 0.3, 0.5] {
        let envelope = problem.envelope(rho).unwrap();
        let (lower, _) = envelope_transforms(&envelope, &kernel, &grid).unwrap();
        let mut best = 0;
        for (i, &v) in lower.iter().enumerate() {
            if v >= lower[best] {
                best = i;
            }
        }
        assert_eq!(best, grid.len() - 1, "maximizing node at rho = {rho}");
        assert_eq!(grid.nodes()[best], 1.0);
        let expect = trig_lower_max(rho);
        assert!(
            (lower[best] - expect).abs() < 1e-4,
            "rho = {rho}: {} vs {expect}",
            lower[best]
        );
    }
    println!("ACCEPTANCE criterion 3 (max of lower transform matches closed form at t=1): PASS");
}

#[test]
fn criterion_04_kernel_identities() {
    let grid = Grid::with_breakpoints(1000, &[FORCING_SIGN_CHANGE]).unwrap();
    let ones = vec![1.0; grid.len()];
    let cases = [
        (example_minus().1, 1.0),
        (example_plus().1, 0.4052847345693511), // 4 / pi^2
    ];
    for (spec, expect) in cases {
        let kernel = KernelMatrix::assemble(spec, &grid);
        for (i, v) in kernel.apply(&grid, &ones).unwrap().into_iter().enumerate() {
            assert!(
                (v - expect).abs() < 1e-4,
                "row {i} integral {v} vs {expect}"
            );
        }
        for i in 0..grid.len() {
            for j in (i + 1)..grid.len() {
                assert_eq!(kernel.entry(i, j), kernel.entry(j, i));
            }
            for j in 0..grid.len() {
                assert!(kernel.entry(i, j) >= 0.0);
            }
        }
    }
    println!("ACCEPTANCE criterion 4 (row integrals 1 and 4/pi^2, symmetry, nonnegativity): PASS");
}

#[test]
fn criterion_05_first_iterate_oracle() {
    let (problem, kernel, grid) = setup(Eps::Plus, 1000);
    for rho in [0.2, 0.5] {
        for sign in [Sign::Plus, Sign::Minus] {
            let config = SolverConfig {
                max_iter: 1,
                ..SolverConfig::new(sign)
            };
            let pair = fixed_point_solve(rho, &config, &problem, &kernel, &grid).unwrap();
            let expect = sign.value() * rho * PI * PI / 2.0;
            let rel = ((pair.lambda - expect) / expect).abs();
            assert!(
                rel < 1e-3,
                "rho = {rho}, sign {sign}: lambda1 = {} vs {expect}",
                pair.lambda
            );
        }
    }
    println!("ACCEPTANCE criterion 5 (first iterate lambda1 = rho*pi^2/2): PASS");
}

#[test]
fn criterion_06_fixed_point_invariants_over_default_sweeps() {
    for problem_name in ["example-minus", "example-plus"] {
        let mut config = SweepConfig::new(problem_name);
        config.profiles = true;
        config.bound_curve_count = 10; // rows are under test here, not the curve
        let result = run_sweep(&config).unwrap();
        assert_eq!(result.rows.len(), 15);
        let rho0 = result.summary.rho0;
        for (row, profile) in result.rows.iter().zip(&result.profiles) {
            assert!(row.converged_plus && row.converged_minus, "rho = {}", row.rho);
            let lambda_plus = row.lambda_plus.unwrap();
            let lambda_minus = row.lambda_minus.unwrap();
            assert!(
                lambda_plus > 0.0 && lambda_minus < 0.0,
                "sign dichotomy at rho = {}",
                row.rho
            );
            assert!(row.err_plus.unwrap() < 1e-6);
            assert!(row.err_minus.unwrap() < 1e-6);
            for u in [profile.u_plus.as_ref().unwrap(), profile.u_minus.as_ref().unwrap()] {
                assert!(
                    (sup_norm(u) - row.rho).abs() < 1e-12,
                    "norm preservation at rho = {}",
                    row.rho
                );
            }
            assert_eq!(
                row.bound.is_some(),
                row.rho < rho0,
                "bound presence at rho = {} (rho0 = {rho0})",
                row.rho
            );
            if let Some(bound) = row.bound {
                assert!(
                    lambda_plus.abs() <= bound + 1e-3 && lambda_minus.abs() <= bound + 1e-3,
                    "localization at rho = {}: |lambda| vs {bound}",
                    row.rho
                );
            }
        }
    }
    println!("ACCEPTANCE criterion 6 (norms, errors, signs, bound compliance on both sweeps): PASS");
}

#[test]
fn criterion_07_bvp_residual_convergence() {
    let residuals = |n: usize| {
        let (problem, kernel, grid) = setup(Eps::Minus, n);
        let pair = fixed_point_solve(
            0.2,
            &SolverConfig::new(Sign::Plus),
            &problem,
            &kernel,
            &grid,
        )
        .unwrap();
        assert!(pair.converged);
        let res = bvp_residual(&pair, kernel.spec(), &problem, &grid).unwrap();
        (
            res.interior_max,
            res.boundary_derivative_left,
            res.boundary_derivative_right,
        )
    };
    let (r500, l500, b500) = residuals(500);
    let (r1000, l1000, b1000) = residuals(1000);
    let (r2000, l2000, b2000) = residuals(2000);
    assert!(
        r500 / r1000 >= 3.0 && r1000 / r2000 >= 3.0,
        "interior residuals {r500} -> {r1000} -> {r2000}"
    );
    assert!(
        l1000 <= 0.75 * l500 && l2000 <= 0.75 * l1000,
        "left boundary derivatives {l500} -> {l1000} -> {l2000}"
    );
    assert!(
        b1000 <= 0.75 * b500 && b2000 <= 0.75 * b1000,
        "right boundary derivatives {b500} -> {b1000} -> {b2000}"
    );
    println!(
        "ACCEPTANCE criterion 7 (residuals {r500:.2e} -> {r1000:.2e} -> {r2000:.2e}, Neumann first order): PASS"
    );
}

#[test]
fn criterion_08_branch_junction_and_transform_agreement() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for eps in [Eps::Minus, Eps::Plus] {
        let (problem, kernel, grid) = setup(eps, 1000);
        let rho0 = neumann_eigen::compute_rho_threshold(eps, 2000).unwrap().rho0;
        for _ in 0..20 {
            let rho = rng.random_range(1e-3..rho0);
            let bi = closed_form_integrals(eps, FORCING_SIGN_CHANGE);
            let (em, ep) = ((-2.0 * rho).exp(), (2.0 * rho).exp());
            let left = em * bi.a + ep * bi.b;
            let right = em * bi.c + ep * bi.d;
            assert!(
                (left - right).abs() < 1e-12,
                "junction mismatch at eps {eps}, rho {rho}"
            );

            let envelope = problem.envelope(rho).unwrap();
            let (lower, upper) = envelope_transforms(&envelope, &kernel, &grid).unwrap();
            let mut sup = 0.0f64;
            for (&t, (&lo, &up)) in grid.nodes().iter().zip(lower.iter().zip(&upper)) {
                sup = sup.max((lo - closed_form_lower(eps, rho, t)).abs());
                sup = sup.max((up - closed_form_upper(eps, rho, t)).abs());
            }
            assert!(sup <= 1e-3, "eps {eps}, rho {rho}: sup error {sup}");
        }
    }
    println!("ACCEPTANCE criterion 8 (branch junction 1e-12, numeric vs analytic 1e-3): PASS");
}

#[test]
fn criterion_09_determinism_and_csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let (_, ok, _) = run_bin(&[
            "sweep",
            "--problem",
            "example-minus",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(ok);
    }
    for file in ["results.csv", "bound_curve.csv", "summary.json"] {
        let a = std::fs::read(out_a.join(file)).unwrap();
        let b = std::fs::read(out_b.join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }

    let text = std::fs::read_to_string(out_a.join("results.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), RESULTS_CSV_HEADER);
    let mut rows = 0;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 10);
        let lambda_plus: f64 = fields[1].parse().unwrap();
        let lambda_minus: f64 = fields[4].parse().unwrap();
        let converged_plus: bool = fields[3].parse().unwrap();
        let converged_minus: bool = fields[6].parse().unwrap();
        assert!(lambda_plus > 0.0 && lambda_minus < 0.0);
        assert!(converged_plus && converged_minus);
        if !fields[7].is_empty() {
            let bound: f64 = fields[7].parse().unwrap();
            assert!(lambda_plus.abs() <= bound + 1e-3);
            assert!(lambda_minus.abs() <= bound + 1e-3);
        }
        rows += 1;
    }
    assert_eq!(rows, 15);

    let curve = std::fs::read_to_string(out_a.join("bound_curve.csv")).unwrap();
    assert_eq!(curve.lines().count(), 1001); // header + bound_curve_count
    println!("ACCEPTANCE criterion 9 (byte-identical reruns, CSV round-trip invariants): PASS");
}

// The eigenfunction profile keeps its prescribed sup norm in the emitted
// data as well (checked here at the radius highlighted by the figures).
#[test]
fn profile_sup_norm_matches_radius() {
    let (problem, kernel, grid) = setup(Eps::Plus, 1000);
    let pair = fixed_point_solve(
        0.5,
        &SolverConfig::new(Sign::Plus),
        &problem,
        &kernel,
        &grid,
    )
    .unwrap();
    let max_abs = sup_norm(&pair.u);
    assert!((max_abs - 0.5).abs() < 1e-12);
    assert!(pair.u.iter().any(|&v| (v.abs() - 0.5).abs() < 1e-12));
}
