//! Negative spectrum of the second variation of the weighted energy at the
//! equator map.
//!
//! The quadratic form `int (u'^2 - (d-1) u^2 / y^2) w dy` with
//! `w = y^(d-1) e^(-y^2/4)` is discretized by central differences on a
//! uniform grid over `[y_min, y_max]` with Dirichlet ends and lumped mass
//! `int u^2 w dy`. After symmetric diagonal scaling the generalized problem
//! `K u = lambda M u` is a symmetric tridiagonal eigenproblem whose
//! eigenvalue counts follow from Sylvester's law of inertia.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MorseGrid {
    /// Number of interior nodes.
    pub nodes: usize,
    pub y_min: f64,
    pub y_max: f64,
}

impl Default for MorseGrid {
    fn default() -> Self {
        Self {
            nodes: 2000,
            y_min: 1e-3,
            y_max: 20.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub d: f64,
    pub nodes: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub negative_count: usize,
    /// Smallest eigenvalues in increasing order.
    pub smallest: Vec<f64>,
    /// Largest relative eigen-residual among the reported eigenvalues.
    pub residual: f64,
}

pub const REPORTED_EIGENVALUES: usize = 3;
const RESIDUAL_TOL: f64 = 1e-6;

pub(crate) struct Tridiagonal {
    pub diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    pub off: Vec<f64>,
}

impl Tridiagonal {
    /// Number of eigenvalues strictly below `lambda` (negative pivots of
    /// `A - lambda I`).
    pub fn count_below(&self, lambda: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.diag.len() {
            let coupling = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] / q };
            q = self.diag[i] - lambda - coupling;
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + lambda.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// `k`-th smallest eigenvalue (0-based) by bisection on the inertia count.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-13 * hi.abs().max(lo.abs()).max(1.0) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.off[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    /// Solves `(A - shift I) x = rhs` by the Thomas algorithm.
    fn solve_shifted(&self, shift: f64, rhs: &[f64]) -> Vec<f64> {
        let n = rhs.len();
        let mut c = vec![0.0; n];
        let mut dvec = vec![0.0; n];
        let tiny = f64::EPSILON * 1e-3;
        let mut denom = self.diag[0] - shift;
        if denom == 0.0 {
            denom = tiny;
        }
        if n > 1 {
            c[0] = self.off[0] / denom;
        }
        dvec[0] = rhs[0] / denom;
        for i in 1..n {
            let mut m = self.diag[i] - shift - self.off[i - 1] * c[i - 1];
            if m == 0.0 {
                m = tiny;
            }
            if i + 1 < n {
                c[i] = self.off[i] / m;
            }
            dvec[i] = (rhs[i] - self.off[i - 1] * dvec[i - 1]) / m;
        }
        let mut x = vec![0.0; n];
        x[n - 1] = dvec[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = dvec[i] - c[i] * x[i + 1];
        }
        x
    }

    /// Relative residual `|A x - lambda x| / (|lambda| + scale)` after inverse
    /// iteration at `lambda`.
    pub fn residual(&self, lambda: f64) -> f64 {
        let n = self.diag.len();
        let scale = self.diag.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let shift = lambda + 1e-10 * (lambda.abs() + 1.0);
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + (i % 7) as f64 * 0.1).collect();
        for _ in 0..4 {
            x = self.solve_shifted(shift, &x);
            let norm = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            if !(norm.is_finite() && norm > 0.0) {
                return f64::INFINITY;
            }
            x.iter_mut().for_each(|v| *v /= norm);
        }
        let ax = self.apply(&x);
        let r = ax
            .iter()
            .zip(&x)
            .fold(0.0_f64, |m, (a, v)| m.max((a - lambda * v).abs()));
        r / (lambda.abs() + scale)
    }
}

fn log_weight(d: f64, y: f64) -> f64 {
    (d - 1.0) * y.ln() - 0.25 * y * y
}

pub(crate) fn assemble(d: f64, grid: &MorseGrid) -> Tridiagonal {
    let n = grid.nodes;
    let h = (grid.y_max - grid.y_min) / (n + 1) as f64;
    let y = |i: f64| grid.y_min + i * h;
    let lw: Vec<f64> = (1..=n).map(|i| log_weight(d, y(i as f64))).collect();
    let half = |i: usize| log_weight(d, y(i as f64 + 0.5));
    let h2 = h * h;
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n {
        let node = i + 1;
        let yi = y(node as f64);
        let left = (half(node - 1) - lw[i]).exp();
        let right = (half(node) - lw[i]).exp();
        diag.push((left + right) / h2 - (d - 1.0) / (yi * yi));
        if i + 1 < n {
            off.push(-(half(node) - 0.5 * (lw[i] + lw[i + 1])).exp() / h2);
        }
    }
    Tridiagonal { diag, off }
}

pub fn morse_index(d: f64, grid: &MorseGrid) -> Result<SpectrumReport> {
    if !(d > 2.0 && d.is_finite()) {
        return Err(Error::InvalidArgument(format!("Morse index needs d > 2, got {d}")));
    }
    if grid.nodes < 3 {
        return Err(Error::InvalidArgument("grid needs at least 3 nodes".into()));
    }
    if !(grid.y_min > 0.0 && grid.y_max > grid.y_min && grid.y_max.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "grid domain [{}, {}] must satisfy 0 < y_min < y_max",
            grid.y_min, grid.y_max
        )));
    }
    let t = assemble(d, grid);
    let negative_count = t.count_below(0.0);
    let smallest: Vec<f64> = (0..REPORTED_EIGENVALUES.min(grid.nodes))
        .map(|k| t.eigenvalue(k))
        .collect();
    let residual = smallest
        .iter()
        .map(|l| t.residual(*l))
        .fold(0.0_f64, f64::max);
    if !(residual <= RESIDUAL_TOL) {
        return Err(Error::Eigensolve { residual });
    }
    Ok(SpectrumReport {
        d,
        nodes: grid.nodes,
        y_min: grid.y_min,
        y_max: grid.y_max,
        negative_count,
        smallest,
        residual,
    })
}
