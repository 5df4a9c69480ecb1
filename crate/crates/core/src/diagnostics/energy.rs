//! Weighted Dirichlet energy
//! `E(f) = int_0^inf (f'^2 + (d-1) sin^2 f / y^2) y^(d-1) e^(-y^2/4) dy`
//! whose Euler–Lagrange equation is the harmonic-map shrinker equation.

use serde::Serialize;
use statrs::function::gamma::{gamma, gamma_ur};

use crate::error::{Error, Result};
use crate::models::{estimate_limit, FlowKind, ModelParams};
use crate::ode::Trajectory;
use crate::quadrature::adaptive_simpson;

pub const ENERGY_ABS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyReport {
    pub value: f64,
    /// Accumulated quadrature error estimate.
    pub error: f64,
    /// Analytic contribution beyond the last sample.
    pub tail: f64,
}

fn density(d: f64, y: f64, f: f64, fp: f64) -> f64 {
    let weight = (-0.25 * y * y).exp();
    let kinetic = fp * fp * y.powf(d - 1.0);
    let s = f.sin();
    let potential = if y > 0.0 {
        (d - 1.0) * s * s * y.powf(d - 3.0)
    } else if s == 0.0 {
        // sin f ~ f' y near a regular origin
        (d - 1.0) * fp * fp * y.powf(d - 1.0)
    } else if d == 3.0 {
        (d - 1.0) * s * s
    } else if d > 3.0 {
        0.0
    } else {
        f64::INFINITY
    };
    (kinetic + potential) * weight
}

/// `int_Y^inf y^(d-3) e^(-y^2/4) dy = 2^(d-3) Gamma((d-2)/2, Y^2/4)`.
pub fn gaussian_moment_tail(d: f64, y: f64) -> f64 {
    let s = 0.5 * (d - 2.0);
    let upper = if y > 0.0 { gamma_ur(s, 0.25 * y * y) } else { 1.0 };
    2f64.powf(d - 3.0) * gamma(s) * upper
}

/// Energy of the equator map `f = pi/2`: `(d-1) 2^(d-3) Gamma((d-2)/2)`.
pub fn equator_energy(d: f64) -> f64 {
    (d - 1.0) * gaussian_moment_tail(d, 0.0)
}

/// Energy of a sampled harmonic-map profile. The interval before the first
/// sample uses the linear extrapolation of the first sample; the interval
/// beyond the last sample uses the leading tail `f = b`.
pub fn energy(traj: &Trajectory<2>, params: &ModelParams) -> Result<EnergyReport> {
    if params.kind() != FlowKind::HarmonicMap {
        return Err(Error::Unsupported("energy"));
    }
    let d = params.d();
    let (y0, y_last) = traj.y_range();
    let span = (y_last - y0).max(f64::MIN_POSITIVE);
    let mut value = 0.0;
    let mut error = 0.0;

    if y0 > 0.0 {
        let first = traj.first();
        let head = gauss_legendre(
            |y| {
                let f = first.u[0] + first.u[1] * (y - y0);
                density(d, y, f, first.u[1])
            },
            0.0,
            y0,
        );
        value += head;
    }

    for w in traj.samples.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let tol = ENERGY_ABS_TOL * (b.y - a.y) / span;
        let q = adaptive_simpson(
            |y| {
                let u = crate::ode::hermite_between(a, b, y);
                density(d, y, u[0], u[1])
            },
            a.y,
            b.y,
            tol,
        );
        value += q.value;
        error += q.error;
    }

    let last = traj.last();
    let limit = estimate_limit(params, last.u[0], y_last, 4);
    let s = limit.sin();
    let tail = (d - 1.0) * s * s * gaussian_moment_tail(d, y_last);
    value += tail;

    Ok(EnergyReport { value, error, tail })
}

fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    const X: [f64; 4] = [
        0.183_434_642_495_649_8,
        0.525_532_409_916_329,
        0.796_666_477_413_626_7,
        0.960_289_856_497_536_3,
    ];
    const W: [f64; 4] = [
        0.362_683_783_378_362,
        0.313_706_645_877_887_3,
        0.222_381_034_453_374_5,
        0.101_228_536_290_376_3,
    ];
    let m = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    X.iter()
        .zip(W.iter())
        .map(|(x, w)| w * (f(m - r * x) + f(m + r * x)))
        .sum::<f64>()
        * r
}
