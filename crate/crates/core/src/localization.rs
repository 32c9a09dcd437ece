//! Envelope transforms, admissibility thresholds, and the eigenvalue
//! localization bound.
//!
//! For the bundled problems the kernel transform of the forcing has closed
//! forms on each side of the sign change at `t = 2/3`: four functions
//! `a, b, c, d` such that the lower envelope transform is
//! `e^{-2 rho} a(t) + e^{2 rho} b(t)` on the left branch and
//! `e^{-2 rho} c(t) + e^{2 rho} d(t)` on the right branch (the upper
//! transform swaps the exponential factors). The transform keeps a positive
//! maximum exactly for `rho` below a threshold `rho0`, computed here by
//! dense sampling plus golden-section refinement; below the threshold the
//! eigenvalues at radius `rho` obey `|lambda| <= rho / max F_lower`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kernel::{Eps, KernelMatrix, KernelSpec};
use crate::problem::{EnvelopeBounds, FORCING_SIGN_CHANGE};

/// Sampling density per branch in the threshold and bound-curve searches.
pub const DEFAULT_SEARCH_POINTS: usize = 2000;

/// Abscissa tolerance of the golden-section refinement.
const GOLDEN_XTOL: f64 = 1e-10;

/// Which sign condition activates the localization estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ActiveCondition {
    /// The lower transform attains a positive value somewhere.
    LowerPositive,
    /// The upper transform attains a negative value somewhere.
    UpperNegative,
    /// Neither sign condition holds; no bound is available.
    None,
}

/// Closed-form branch integrals of the bundled forcing against the kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchIntegrals {
    /// Left-branch (t <= 2/3) integral over [0, 2/3].
    pub a: f64,
    /// Left-branch integral over [2/3, 1]; negative on its branch.
    pub b: f64,
    /// Right-branch (t >= 2/3) integral over [0, 2/3].
    pub c: f64,
    /// Right-branch integral over [2/3, 1]; negative on its branch.
    pub d: f64,
}

/// Closed forms of the four branch integrals for the bundled kernels.
///
/// All four are evaluated at any `t` in [0, 1]; consumers restrict `a`, `b`
/// to the left branch and `c`, `d` to the right one.
pub fn closed_form_integrals(eps: Eps, t: f64) -> BranchIntegrals {
    let b = 1.5 * PI;
    match eps {
        Eps::Minus => {
            let sinh1 = 1f64.sinh();
            let q = 1.0 / ((1.0 + b * b) * sinh1);
            let cosh_third = (1f64 / 3.0).cosh();
            let cosh_two_thirds = (2f64 / 3.0).cosh();
            BranchIntegrals {
                a: q * ((b * t).sin() * sinh1
                    + b * ((1.0 - t).cosh() + cosh_third * t.cosh())),
                b: -q * b * cosh_third * t.cosh(),
                c: q * b * (cosh_two_thirds + 1.0) * (1.0 - t).cosh(),
                d: q * (sinh1 * (b * t).sin() - b * cosh_two_thirds * (1.0 - t).cosh()),
            }
        }
        Eps::Plus => {
            let s = (FRAC_PI_2 * t).sin();
            let c = (FRAC_PI_2 * t).cos();
            let sqrt3 = 3f64.sqrt();
            let scale = 1.0 / (4.0 * PI * PI);
            BranchIntegrals {
                a: scale * (8.0 * s * s * s + 3.0 * sqrt3 * c),
                b: -scale * 3.0 * sqrt3 * c,
                c: scale * 9.0 * s,
                d: -scale * s * (9.0 - 8.0 * s * s),
            }
        }
    }
}

/// Closed-form lower envelope transform of the bundled problems at radius
/// `rho`.
pub fn closed_form_lower(eps: Eps, rho: f64, t: f64) -> f64 {
    let bi = closed_form_integrals(eps, t);
    let (em, ep) = ((-2.0 * rho).exp(), (2.0 * rho).exp());
    if t <= FORCING_SIGN_CHANGE {
        em * bi.a + ep * bi.b
    } else {
        em * bi.c + ep * bi.d
    }
}

/// Closed-form upper envelope transform (exponential factors swapped).
pub fn closed_form_upper(eps: Eps, rho: f64, t: f64) -> f64 {
    let bi = closed_form_integrals(eps, t);
    let (em, ep) = ((-2.0 * rho).exp(), (2.0 * rho).exp());
    if t <= FORCING_SIGN_CHANGE {
        ep * bi.a + em * bi.b
    } else {
        ep * bi.c + em * bi.d
    }
}

/// Maximum of the closed-form lower transform over [0, 1].
///
/// Returns `(t, value)`; both branches are sampled at `samples` points and
/// refined by golden section.
pub fn closed_form_lower_max(eps: Eps, rho: f64, samples: usize) -> (f64, f64) {
    let f = |t: f64| closed_form_lower(eps, rho, t);
    let left = branch_max(&f, 0.0, FORCING_SIGN_CHANGE, samples);
    let right = branch_max(&f, FORCING_SIGN_CHANGE, 1.0, samples);
    // ties toward the larger abscissa
    if right.1 >= left.1 {
        right
    } else {
        left
    }
}

/// Branch-wise admissibility thresholds; `rho0 = max(rho1, rho2)` over the
/// defined branches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoThresholds {
    pub rho1: Option<f64>,
    pub rho2: Option<f64>,
    pub rho0: f64,
    /// Maximizer of `-a/b` on the left branch.
    pub t_rho1: Option<f64>,
    /// Maximizer of `-c/d` on the right branch.
    pub t_rho2: Option<f64>,
}

/// Largest `rho` for which the lower envelope transform of the bundled
/// problem with this `eps` still attains a positive maximum.
///
/// `rho1 = log(max -a/b) / 4` over the left branch and
/// `rho2 = log(max -c/d) / 4` over the right one; a branch whose objective
/// never goes positive yields `None`, and if both degenerate the threshold
/// is undefined.
pub fn compute_rho_threshold(eps: Eps, search_points: usize) -> Result<RhoThresholds> {
    let g1 = move |t: f64| {
        let bi = closed_form_integrals(eps, t);
        -bi.a / bi.b
    };
    let g2 = move |t: f64| {
        let bi = closed_form_integrals(eps, t);
        -bi.c / bi.d
    };
    thresholds_from_objectives(&g1, &g2, search_points)
}

fn thresholds_from_objectives(
    g1: &(impl Fn(f64) -> f64 + ?Sized),
    g2: &(impl Fn(f64) -> f64 + ?Sized),
    search_points: usize,
) -> Result<RhoThresholds> {
    if search_points < 100 {
        return Err(Error::InvalidArgument(format!(
            "threshold search needs at least 100 sample points, got {search_points}"
        )));
    }
    let (t1, m1) = branch_max(g1, 0.0, FORCING_SIGN_CHANGE, search_points);
    let (t2, m2) = branch_max(g2, FORCING_SIGN_CHANGE, 1.0, search_points);
    let rho1 = (m1 > 0.0).then(|| m1.ln() / 4.0);
    let rho2 = (m2 > 0.0).then(|| m2.ln() / 4.0);
    let rho0 = match (rho1, rho2) {
        (Some(x), Some(y)) => x.max(y),
        (Some(x), None) => x,
        (None, Some(y)) => y,
        (None, None) => {
            return Err(Error::ThresholdUndefined(
                "both branch objectives are non-positive".into(),
            ))
        }
    };
    Ok(RhoThresholds {
        rho1,
        rho2,
        rho0,
        t_rho1: rho1.map(|_| t1),
        t_rho2: rho2.map(|_| t2),
    })
}

/// Kernel transforms of the envelope pair, sampled on the grid nodes.
///
/// Requires every envelope breakpoint to coincide with a grid node, so the
/// quadrature keeps second order across the kinks.
pub fn envelope_transforms(
    envelope: &EnvelopeBounds,
    kernel: &KernelMatrix,
    grid: &Grid,
) -> Result<(Vec<f64>, Vec<f64>)> {
    for &bp in envelope.breakpoints() {
        if !grid.has_node(bp) {
            return Err(Error::InvalidArgument(format!(
                "envelope breakpoint {bp} is not a grid node"
            )));
        }
    }
    let lower: Vec<f64> = grid.nodes().iter().map(|&t| envelope.f_lower(t)).collect();
    let upper: Vec<f64> = grid.nodes().iter().map(|&t| envelope.f_upper(t)).collect();
    Ok((kernel.apply(grid, &lower)?, kernel.apply(grid, &upper)?))
}

/// Localization data at one radius: thresholds, the active sign condition,
/// the extremal point, and the bound when one exists.
#[derive(Debug, Clone)]
pub struct LocalizationReport {
    pub rho: f64,
    pub rho1: Option<f64>,
    pub rho2: Option<f64>,
    pub rho0: f64,
    pub active_condition: ActiveCondition,
    /// Extremal point of the deciding transform (argmax of the lower one
    /// when no condition is active).
    pub t_extremal: f64,
    /// `rho / F_lower(t_extremal)` under the positive condition,
    /// `-rho / F_upper(t_extremal)` under the negative one.
    pub bound: Option<f64>,
    pub f_lower_curve: Vec<f64>,
    pub f_upper_curve: Vec<f64>,
}

/// Evaluate the localization estimate at radius `rho`.
///
/// The transforms are computed by quadrature from the supplied envelope (not
/// from the closed forms, which only enter through the thresholds), the
/// extremum over nodes is refined by golden section between the neighboring
/// nodes, and ties between equal node values resolve toward larger `t`.
pub fn localize(
    rho: f64,
    eps: Eps,
    envelope: &EnvelopeBounds,
    kernel: &KernelMatrix,
    grid: &Grid,
) -> Result<LocalizationReport> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "localization radius must be positive, got {rho}"
        )));
    }
    let (f_lower_curve, f_upper_curve) = envelope_transforms(envelope, kernel, grid)?;
    let thresholds = compute_rho_threshold(eps, DEFAULT_SEARCH_POINTS)?;

    let spec = kernel.spec();
    let lower_samples: Vec<f64> = grid.nodes().iter().map(|&t| envelope.f_lower(t)).collect();
    let upper_samples: Vec<f64> = grid.nodes().iter().map(|&t| envelope.f_upper(t)).collect();
    let lower_at = |t: f64| transform_at(spec, grid, &lower_samples, t);
    let upper_at = |t: f64| transform_at(spec, grid, &upper_samples, t);

    let (t_max, lower_max) = refine_node_extremum(grid, &f_lower_curve, &lower_at, false);
    if lower_max > 0.0 {
        return Ok(LocalizationReport {
            rho,
            rho1: thresholds.rho1,
            rho2: thresholds.rho2,
            rho0: thresholds.rho0,
            active_condition: ActiveCondition::LowerPositive,
            t_extremal: t_max,
            bound: Some(rho / lower_max),
            f_lower_curve,
            f_upper_curve,
        });
    }

    let (t_min, upper_min) = refine_node_extremum(grid, &f_upper_curve, &upper_at, true);
    let (active_condition, t_extremal, bound) = if upper_min < 0.0 {
        (
            ActiveCondition::UpperNegative,
            t_min,
            Some(-rho / upper_min),
        )
    } else {
        (ActiveCondition::None, t_max, None)
    };
    Ok(LocalizationReport {
        rho,
        rho1: thresholds.rho1,
        rho2: thresholds.rho2,
        rho0: thresholds.rho0,
        active_condition,
        t_extremal,
        bound,
        f_lower_curve,
        f_upper_curve,
    })
}

/// Continuous (Nystrom-interpolated) kernel transform of node samples.
fn transform_at(spec: KernelSpec, grid: &Grid, samples: &[f64], t: f64) -> f64 {
    grid.nodes()
        .iter()
        .zip(grid.weights())
        .zip(samples)
        .map(|((&s, &w), &fv)| w * spec.value_unchecked(t, s) * fv)
        .sum()
}

/// Node-level argmax (or argmin) refined by golden section between the
/// neighboring nodes. Ties between node values resolve toward larger `t`.
fn refine_node_extremum(
    grid: &Grid,
    curve: &[f64],
    continuous: &dyn Fn(f64) -> f64,
    minimize: bool,
) -> (f64, f64) {
    let sign = if minimize { -1.0 } else { 1.0 };
    let mut best = 0;
    for (i, &v) in curve.iter().enumerate() {
        if sign * v >= sign * curve[best] {
            best = i;
        }
    }
    let nodes = grid.nodes();
    let lo = nodes[best.saturating_sub(1)];
    let hi = nodes[(best + 1).min(nodes.len() - 1)];
    let objective = |t: f64| sign * continuous(t);
    let (t_refined, v_refined) = golden_section_max(&objective, lo, hi, GOLDEN_XTOL);
    if v_refined > sign * curve[best] {
        (t_refined, sign * v_refined)
    } else {
        (nodes[best], curve[best])
    }
}

/// Dense sampling of `f` over [a, b] followed by golden-section refinement
/// around the best sample. Ties resolve toward larger `t`. Returns `(x, f(x))`.
fn branch_max(
    f: &(impl Fn(f64) -> f64 + ?Sized),
    a: f64,
    b: f64,
    samples: usize,
) -> (f64, f64) {
    debug_assert!(samples >= 2);
    let mut best_x = a;
    let mut best_v = f(a);
    for i in 1..samples {
        let t = if i == samples - 1 {
            b
        } else {
            a + (b - a) * i as f64 / (samples - 1) as f64
        };
        let v = f(t);
        if v >= best_v {
            best_x = t;
            best_v = v;
        }
    }
    let step = (b - a) / (samples - 1) as f64;
    let lo = (best_x - step).max(a);
    let hi = (best_x + step).min(b);
    let (xr, vr) = golden_section_max(f, lo, hi, GOLDEN_XTOL);
    if vr > best_v {
        (xr, vr)
    } else {
        (best_x, best_v)
    }
}

/// Golden-section search for the maximum of `f` on [a, b] to abscissa
/// tolerance `xtol`. Returns the best evaluated point.
fn golden_section_max(
    f: &(impl Fn(f64) -> f64 + ?Sized),
    mut a: f64,
    mut b: f64,
    xtol: f64,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iter = 0;
    while b - a > xtol && iter < 200 {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        iter += 1;
    }
    let xm = 0.5 * (a + b);
    let fm = f(xm);
    let mut best = (xm, fm);
    for cand in [(x1, f1), (x2, f2)] {
        if cand.1 > best.1 {
            best = cand;
        }
    }
    best
}
