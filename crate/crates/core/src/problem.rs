//! Right-hand sides `f(t, u, H[u])` with their functional term and
//! rho-parametrized envelope bounds, and the Hammerstein operator `T` built
//! from them.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kernel::{Eps, KernelMatrix, KernelSpec};

/// Where the bundled forcing `sin(3*pi*t/2)` changes sign.
pub const FORCING_SIGN_CHANGE: f64 = 2.0 / 3.0;

type NonlinearityFn = dyn Fn(f64, f64, f64) -> f64 + Send + Sync;
type FunctionalFn = dyn Fn(&Grid, &[f64]) -> f64 + Send + Sync;
type EnvelopeFn = dyn Fn(f64) -> EnvelopeBounds + Send + Sync;
type CurveFn = dyn Fn(f64) -> f64 + Send + Sync;

/// Sandwich for `f` over the box [0,1] x [-rho,rho] x [h_lower,h_upper]:
/// `f_lower(t) <= f(t, u, v) <= f_upper(t)` must hold there.
pub struct EnvelopeBounds {
    rho: f64,
    h_lower: f64,
    h_upper: f64,
    f_lower: Box<CurveFn>,
    f_upper: Box<CurveFn>,
    breakpoints: Vec<f64>,
}

impl EnvelopeBounds {
    pub fn new(
        rho: f64,
        h_lower: f64,
        h_upper: f64,
        f_lower: Box<CurveFn>,
        f_upper: Box<CurveFn>,
        breakpoints: Vec<f64>,
    ) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "envelope radius must be positive, got {rho}"
            )));
        }
        if !h_lower.is_finite() || !h_upper.is_finite() || h_lower > h_upper {
            return Err(Error::InvalidArgument(format!(
                "functional bounds out of order: [{h_lower}, {h_upper}]"
            )));
        }
        for &b in &breakpoints {
            if !(b > 0.0 && b < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "envelope breakpoint {b} outside (0, 1)"
                )));
            }
        }
        Ok(Self {
            rho,
            h_lower,
            h_upper,
            f_lower,
            f_upper,
            breakpoints,
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn h_lower(&self) -> f64 {
        self.h_lower
    }

    pub fn h_upper(&self) -> f64 {
        self.h_upper
    }

    pub fn f_lower(&self, t: f64) -> f64 {
        (self.f_lower)(t)
    }

    pub fn f_upper(&self, t: f64) -> f64 {
        (self.f_upper)(t)
    }

    /// Sign-change points of the envelope curves; quadrature grids must carry
    /// them as nodes.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }
}

/// A Hammerstein right-hand side: the nonlinearity `f(t, u, v)`, the scalar
/// functional `H[u]` feeding its third slot, and the envelope family.
///
/// `H` must be continuous on the closed rho-ball for the envelope reasoning
/// to apply; for user-supplied functionals that is the caller's obligation.
pub struct ProblemSpec {
    name: String,
    nonlinearity: Box<NonlinearityFn>,
    functional: Box<FunctionalFn>,
    envelope: Box<EnvelopeFn>,
    breakpoints: Vec<f64>,
}

impl ProblemSpec {
    pub fn new(
        name: impl Into<String>,
        nonlinearity: Box<NonlinearityFn>,
        functional: Box<FunctionalFn>,
        envelope: Box<EnvelopeFn>,
        breakpoints: Vec<f64>,
    ) -> Self {
        Self {
            name: name.into(),
            nonlinearity,
            functional,
            envelope,
            breakpoints,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Sign-change points the discretization grid should carry as nodes.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// `H[u]` from node samples.
    pub fn eval_functional(&self, grid: &Grid, u: &[f64]) -> Result<f64> {
        if u.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} samples, got {}",
                grid.len(),
                u.len()
            )));
        }
        let h = (self.functional)(grid, u);
        if !h.is_finite() {
            return Err(Error::NonFinite(format!("functional value H[u] = {h}")));
        }
        Ok(h)
    }

    /// `f(t, u, v)`; a non-finite result (division by zero in the bundled
    /// problems when `v = 0`) is an error.
    pub fn eval_nonlinearity(&self, t: f64, u_val: f64, h_val: f64) -> Result<f64> {
        let v = (self.nonlinearity)(t, u_val, h_val);
        if !v.is_finite() {
            return Err(Error::NonFinite(format!(
                "f({t}, {u_val}, {h_val}) = {v}"
            )));
        }
        Ok(v)
    }

    /// Envelope bounds valid on the closed ball of radius `rho`.
    pub fn envelope(&self, rho: f64) -> Result<EnvelopeBounds> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "envelope radius must be positive, got {rho}"
            )));
        }
        Ok((self.envelope)(rho))
    }

    /// The Hammerstein operator without the eigenvalue factor:
    /// `(T u)(t_i) = sum_j w_j k(t_i, t_j) f(t_j, u_j, H[u])`.
    ///
    /// `H[u]` is evaluated once and shared across nodes.
    pub fn apply_hammerstein(
        &self,
        kernel: &KernelMatrix,
        grid: &Grid,
        u: &[f64],
    ) -> Result<Vec<f64>> {
        let h = self.eval_functional(grid, u)?;
        let mut f = Vec::with_capacity(u.len());
        for (&t, &uv) in grid.nodes().iter().zip(u) {
            f.push(self.eval_nonlinearity(t, uv, h)?);
        }
        let out = kernel.apply(grid, &f)?;
        if let Some(bad) = out.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("operator output {bad}")));
        }
        Ok(out)
    }
}

/// The shared nonlinearity of the bundled problems:
/// `sin(3*pi*t/2) * e^u / v` with `v = H[u] = integral of e^u`.
fn bundled_problem(name: &str) -> ProblemSpec {
    let nonlinearity = |t: f64, u: f64, v: f64| (1.5 * PI * t).sin() * u.exp() / v;
    let functional = |grid: &Grid, u: &[f64]| {
        let exp_u: Vec<f64> = u.iter().map(|x| x.exp()).collect();
        grid.integrate(&exp_u).expect("length already validated")
    };
    let envelope = |rho: f64| {
        let lower = move |t: f64| {
            let factor = if t <= FORCING_SIGN_CHANGE {
                (-2.0 * rho).exp()
            } else {
                (2.0 * rho).exp()
            };
            factor * (1.5 * PI * t).sin()
        };
        let upper = move |t: f64| {
            let factor = if t <= FORCING_SIGN_CHANGE {
                (2.0 * rho).exp()
            } else {
                (-2.0 * rho).exp()
            };
            factor * (1.5 * PI * t).sin()
        };
        EnvelopeBounds::new(
            rho,
            (-rho).exp(),
            rho.exp(),
            Box::new(lower),
            Box::new(upper),
            vec![FORCING_SIGN_CHANGE],
        )
        .expect("bundled envelope parameters are valid")
    };
    ProblemSpec::new(
        name,
        Box::new(nonlinearity),
        Box::new(functional),
        Box::new(envelope),
        vec![FORCING_SIGN_CHANGE],
    )
}

/// Bundled problem on the hyperbolic kernel (`eps = -1`, `omega = 1`).
pub fn example_minus() -> (ProblemSpec, KernelSpec) {
    (
        bundled_problem("example-minus"),
        KernelSpec::new(Eps::Minus, 1.0).expect("valid spec"),
    )
}

/// Bundled problem on the trigonometric kernel (`eps = +1`, `omega = pi/2`).
pub fn example_plus() -> (ProblemSpec, KernelSpec) {
    (
        bundled_problem("example-plus"),
        KernelSpec::new(Eps::Plus, FRAC_PI_2).expect("valid spec"),
    )
}

/// Look up a bundled problem by CLI name.
pub fn preset(name: &str) -> Result<(ProblemSpec, KernelSpec)> {
    match name {
        "example-minus" => Ok(example_minus()),
        "example-plus" => Ok(example_plus()),
        _ => Err(Error::InvalidArgument(format!(
            "unknown problem '{name}' (available: example-minus, example-plus)"
        ))),
    }
}
