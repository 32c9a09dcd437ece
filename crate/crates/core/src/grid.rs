//! Uniform grids on [0, 1] with composite trapezoidal quadrature.
//!
//! Interior breakpoints are forced onto the node set, so integrands with a
//! kink there (such as the piecewise envelope bounds) keep the full second
//! order of the trapezoidal rule.

use crate::error::{Error, Result};

/// Node/weight table for composite trapezoidal quadrature on [0, 1].
///
/// Immutable after construction; nodes are strictly increasing with
/// `t[0] = 0`, `t[n-1] = 1`, weights sum to one, and every declared
/// breakpoint coincides exactly with a node.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    breakpoints: Vec<f64>,
}

impl Grid {
    /// Uniform grid with no interior breakpoints.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::with_breakpoints(n, &[])
    }

    /// Grid with `n` nodes whose node set contains every breakpoint.
    ///
    /// The `n - 1` intervals are distributed over the segments between
    /// consecutive breakpoints proportionally to segment length (at least one
    /// interval per segment); nodes are uniform within each segment.
    pub fn with_breakpoints(n: usize, breakpoints: &[f64]) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least 3 nodes, got {n}"
            )));
        }
        let mut bps = breakpoints.to_vec();
        for &b in &bps {
            if !(b > 0.0 && b < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "breakpoint {b} outside the open interval (0, 1)"
                )));
            }
        }
        bps.sort_by(f64::total_cmp);
        bps.dedup();

        let intervals = n - 1;
        if intervals < bps.len() + 1 {
            return Err(Error::InvalidArgument(format!(
                "{n} nodes cannot accommodate {} breakpoints",
                bps.len()
            )));
        }

        let mut bounds = Vec::with_capacity(bps.len() + 2);
        bounds.push(0.0);
        bounds.extend_from_slice(&bps);
        bounds.push(1.0);
        let counts = allocate_intervals(&bounds, intervals);

        let mut nodes = Vec::with_capacity(n);
        let mut weights = vec![0.0; n];
        let mut offset = 0;
        for (seg, &count) in counts.iter().enumerate() {
            let (a, b) = (bounds[seg], bounds[seg + 1]);
            let h = (b - a) / count as f64;
            let first = if seg == 0 { 0 } else { 1 };
            for j in first..=count {
                // segment endpoints are taken verbatim so breakpoints land
                // on nodes bit-exactly
                let t = if j == count {
                    b
                } else {
                    a + (b - a) * j as f64 / count as f64
                };
                nodes.push(t);
            }
            for j in 0..=count {
                let w = if j == 0 || j == count { h / 2.0 } else { h };
                weights[offset + j] += w;
            }
            offset += count;
        }
        debug_assert_eq!(nodes.len(), n);

        Ok(Self {
            nodes,
            weights,
            breakpoints: bps,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Whether `x` coincides exactly with some node.
    pub fn has_node(&self, x: f64) -> bool {
        self.nodes.contains(&x)
    }

    /// Composite trapezoidal quadrature of node samples: `sum_i w_i * s_i`.
    ///
    /// Exact for integrands piecewise linear between breakpoints, O(h^2)
    /// accurate for smooth ones. The sum is Neumaier-compensated so that
    /// summation roundoff stays below the quadrature error at n ~ 10^3.
    pub fn integrate(&self, samples: &[f64]) -> Result<f64> {
        if samples.len() != self.nodes.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} samples, got {}",
                self.nodes.len(),
                samples.len()
            )));
        }
        let mut sum = 0.0f64;
        let mut compensation = 0.0f64;
        for (w, s) in self.weights.iter().zip(samples) {
            let term = w * s;
            let next = sum + term;
            if sum.abs() >= term.abs() {
                compensation += (sum - next) + term;
            } else {
                compensation += (term - next) + sum;
            }
            sum = next;
        }
        Ok(sum + compensation)
    }
}

/// Largest-remainder apportionment of `total` intervals over the segments
/// delimited by `bounds`, each segment receiving at least one.
fn allocate_intervals(bounds: &[f64], total: usize) -> Vec<usize> {
    let segments = bounds.len() - 1;
    let ideals: Vec<f64> = (0..segments)
        .map(|i| (bounds[i + 1] - bounds[i]) * total as f64)
        .collect();
    let mut counts: Vec<usize> = ideals
        .iter()
        .map(|&x| (x.floor() as usize).max(1))
        .collect();

    let mut assigned: usize = counts.iter().sum();
    // order segments by descending fractional part, stable on index
    let mut order: Vec<usize> = (0..segments).collect();
    order.sort_by(|&i, &j| {
        let (fi, fj) = (ideals[i].fract(), ideals[j].fract());
        fj.total_cmp(&fi).then(i.cmp(&j))
    });
    let mut k = 0;
    while assigned < total {
        counts[order[k % segments]] += 1;
        assigned += 1;
        k += 1;
    }
    // over-assignment can only come from the minimum-one clamp
    let mut k = 0;
    while assigned > total {
        let i = order[segments - 1 - (k % segments)];
        if counts[i] > 1 {
            counts[i] -= 1;
            assigned -= 1;
        }
        k += 1;
    }
    counts
}
