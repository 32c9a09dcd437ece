//! Green's kernels of the Neumann problem `eps*u'' + omega^2*u = g` on [0, 1]
//! and their dense Nystrom discretization.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Sign of the second-derivative coefficient, selecting the hyperbolic or
/// trigonometric kernel form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Eps {
    #[serde(rename = "-1")]
    Minus,
    #[serde(rename = "+1")]
    Plus,
}

impl Eps {
    pub fn value(self) -> f64 {
        match self {
            Eps::Minus => -1.0,
            Eps::Plus => 1.0,
        }
    }
}

impl fmt::Display for Eps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Eps::Minus => "-1",
            Eps::Plus => "+1",
        })
    }
}

/// Parameter pair `(eps, omega)` naming one Neumann Green's kernel.
///
/// Construction enforces the domain on which the kernel is non-negative:
/// `omega > 0` for `eps = -1` and `0 < omega <= pi/2` for `eps = +1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelSpec {
    eps: Eps,
    omega: f64,
}

impl KernelSpec {
    pub fn new(eps: Eps, omega: f64) -> Result<Self> {
        if !omega.is_finite() || omega <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "omega must be positive and finite, got {omega}"
            )));
        }
        if eps == Eps::Plus && omega > FRAC_PI_2 {
            return Err(Error::InvalidArgument(format!(
                "omega = {omega} exceeds pi/2; the kernel for eps = +1 would change sign"
            )));
        }
        Ok(Self { eps, omega })
    }

    pub fn eps(&self) -> Eps {
        self.eps
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Kernel value `k(t, s)`; symmetric in `(t, s)` by the min/max form.
    pub fn value(&self, t: f64, s: f64) -> Result<f64> {
        for x in [t, s] {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::InvalidArgument(format!(
                    "kernel argument {x} outside [0, 1]"
                )));
            }
        }
        Ok(self.value_unchecked(t, s))
    }

    /// `k(t, s)` without the domain check; callers guarantee `t, s` in [0, 1].
    pub(crate) fn value_unchecked(&self, t: f64, s: f64) -> f64 {
        let lo = t.min(s);
        let hi = t.max(s);
        let om = self.omega;
        match self.eps {
            Eps::Minus => (om * (1.0 - hi)).cosh() * (om * lo).cosh() / (om * om.sinh()),
            Eps::Plus => (om * (1.0 - hi)).cos() * (om * lo).cos() / (om * om.sin()),
        }
    }
}

/// Dense Nystrom discretization `G[i][j] = k(t_i, t_j)` of a kernel on a grid.
///
/// Symmetric and entrywise non-negative by construction; immutable after
/// assembly.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    spec: KernelSpec,
    n: usize,
    entries: Vec<f64>,
}

impl KernelMatrix {
    pub fn assemble(spec: KernelSpec, grid: &Grid) -> Self {
        let n = grid.len();
        let nodes = grid.nodes();
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = spec.value_unchecked(nodes[i], nodes[j]);
                entries[i * n + j] = v;
                entries[j * n + i] = v;
            }
        }
        Self { spec, n, entries }
    }

    pub fn spec(&self) -> KernelSpec {
        self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Quadrature of the kernel against node samples:
    /// `out_i = sum_j w_j * G[i][j] * g_j`.
    pub fn apply(&self, grid: &Grid, samples: &[f64]) -> Result<Vec<f64>> {
        if grid.len() != self.n || samples.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "kernel matrix is {0}x{0}, grid has {1} nodes, samples {2}",
                self.n,
                grid.len(),
                samples.len()
            )));
        }
        let wf: Vec<f64> = grid
            .weights()
            .iter()
            .zip(samples)
            .map(|(w, s)| w * s)
            .collect();
        Ok((0..self.n)
            .map(|i| self.row(i).iter().zip(&wf).map(|(g, v)| g * v).sum())
            .collect())
    }
}
