//! The auxiliary function `h = y^3 v'` and its second-order equation
//! `y^2 h'' = alpha h' + beta h`.

use serde::Serialize;

use crate::models::{FlowKind, ModelParams};
use crate::ode::{Termination, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientPair {
    pub alpha: f64,
    pub beta: f64,
}

/// `alpha(y)` and `beta(y)` at profile value `value`.
pub fn coefficients(params: &ModelParams, y: f64, value: f64) -> CoefficientPair {
    let d = params.d();
    match params.kind() {
        FlowKind::HarmonicMap => CoefficientPair {
            alpha: 0.5 * y * (y * y - 2.0 * d + 10.0),
            beta: d - 7.0 + (d - 1.0) * (1.0 + (2.0 * value).cos()),
        },
        FlowKind::YangMills => {
            let w = 1.0 - value;
            CoefficientPair {
                alpha: 0.5 * y * (y * y - 2.0 * d + 14.0),
                beta: d - 10.0 + 3.0 * (d - 2.0) * w * w,
            }
        }
    }
}

/// Positive root of `alpha`; beyond it `alpha > 0`.
pub fn alpha_root(params: &ModelParams) -> f64 {
    let shift = match params.kind() {
        FlowKind::HarmonicMap => 10.0,
        FlowKind::YangMills => 14.0,
    };
    (2.0 * params.d() - shift).max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HSample {
    pub y: f64,
    pub h: f64,
    pub hp: f64,
    pub hpp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HProfile {
    pub samples: Vec<HSample>,
}

/// `h` and `h'` at a state, with `v''` taken from the profile equation.
pub fn h_and_derivative(params: &ModelParams, y: f64, u: &[f64; 2]) -> (f64, f64) {
    if y == 0.0 {
        return (0.0, 0.0);
    }
    let vpp = params.field(y, u)[1];
    let y2 = y * y;
    (y2 * y * u[1], y2 * y * vpp + 3.0 * y2 * u[1])
}

/// `h''` from differentiating `h = y^3 v'` twice, independently of the
/// `alpha`/`beta` form.
pub fn h_second_derivative_direct(params: &ModelParams, y: f64, u: &[f64; 2]) -> f64 {
    if y == 0.0 {
        return 0.0;
    }
    let vpp = params.field(y, u)[1];
    let vppp = params.third_derivative(y, u);
    y * y * y * vppp + 6.0 * y * y * vpp + 6.0 * y * u[1]
}

/// Residual of `y^2 h'' = alpha h' + beta h` at one state, with `h''` from
/// the direct route.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HResidual {
    pub residual: f64,
    pub h: f64,
    /// `|y^2 h''| + |alpha h'| + |beta h|`; the residual cannot be resolved
    /// below a few ulps of this.
    pub scale: f64,
}

impl HResidual {
    /// `residual < tol (1 + |h|)`, allowing for cancellation among terms of
    /// size `scale`.
    pub fn within(&self, tol: f64) -> bool {
        self.residual < tol * (1.0 + self.h.abs()) + ROUNDING_FLOOR * self.scale
    }
}

/// Relative rounding allowance for the cancellation in the `h`-equation.
pub const ROUNDING_FLOOR: f64 = 64.0 * f64::EPSILON;

pub fn h_equation_residual(params: &ModelParams, y: f64, u: &[f64; 2]) -> HResidual {
    let (h, hp) = h_and_derivative(params, y, u);
    let hpp = h_second_derivative_direct(params, y, u);
    let c = coefficients(params, y, u[0]);
    let terms = [y * y * hpp, c.alpha * hp, c.beta * h];
    HResidual {
        residual: (terms[0] - terms[1] - terms[2]).abs(),
        h,
        scale: terms.iter().map(|t| t.abs()).sum(),
    }
}

pub fn h_profile(traj: &Trajectory<2>, params: &ModelParams) -> HProfile {
    let samples = traj
        .samples
        .iter()
        .map(|s| {
            let (h, hp) = h_and_derivative(params, s.y, &s.u);
            let hpp = if s.y > 0.0 {
                let c = coefficients(params, s.y, s.u[0]);
                (c.alpha * hp + c.beta * h) / (s.y * s.y)
            } else {
                0.0
            };
            HSample { y: s.y, h, hp, hpp }
        })
        .collect();
    HProfile { samples }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// `h' > 0` along the whole computed trajectory, which extends past the
    /// root of `alpha`.
    Monotone,
    NotMonotone,
    /// `h' > 0` so far, but the trajectory exited before the root of `alpha`.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub a: f64,
    pub min_hp: f64,
    pub min_location: f64,
    /// First sample where `h' <= 0`, if any.
    pub first_nonpositive: Option<f64>,
    pub y_exit: f64,
    pub exit: String,
    pub alpha_root: f64,
    /// `alpha h' + beta h > 0` at every sample beyond the root of `alpha`.
    pub convex_beyond_root: bool,
    pub verdict: Verdict,
}

/// Scans `h'` along a trajectory launched from the origin.
pub fn monotonicity_of(traj: &Trajectory<2>, params: &ModelParams, a: f64) -> MonotonicityReport {
    let root = alpha_root(params);
    let mut min_hp = f64::INFINITY;
    let mut min_location = f64::NAN;
    let mut first_nonpositive = None;
    let mut convex = true;
    for s in traj.samples.iter().filter(|s| s.y > 0.0) {
        let (h, hp) = h_and_derivative(params, s.y, &s.u);
        if hp < min_hp {
            min_hp = hp;
            min_location = s.y;
        }
        if hp <= 0.0 && first_nonpositive.is_none() {
            first_nonpositive = Some(s.y);
        }
        if s.y > root {
            let c = coefficients(params, s.y, s.u[0]);
            if c.alpha * hp + c.beta * h <= 0.0 {
                convex = false;
            }
        }
    }
    let y_exit = traj.last().y;
    let verdict = if first_nonpositive.is_some() {
        Verdict::NotMonotone
    } else if y_exit < root {
        Verdict::Inconclusive
    } else {
        Verdict::Monotone
    };
    let exit = match traj.reason {
        Termination::ReachedEnd => "reached_end".to_string(),
        Termination::Event(i) => format!("event_{i}"),
        Termination::Diverged => "diverged".to_string(),
        Termination::StepLimit => "step_limit".to_string(),
    };
    MonotonicityReport {
        a,
        min_hp,
        min_location,
        first_nonpositive,
        y_exit,
        exit,
        alpha_root: root,
        convex_beyond_root: convex,
        verdict,
    }
}
