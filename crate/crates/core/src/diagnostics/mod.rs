//! Numerical counterparts of the analytic objects behind the nonexistence
//! argument: the `h`-function, its coefficients, the weighted energy, the
//! equator oscillation discriminant and the equator Morse index.

pub mod energy;
pub mod hfunc;
pub mod morse;
pub mod verify;

use serde::Serialize;

pub use energy::{energy, equator_energy, EnergyReport};
pub use hfunc::{
    alpha_root, coefficients, h_and_derivative, h_equation_residual, h_profile,
    h_second_derivative_direct, monotonicity_of, CoefficientPair, HProfile, HResidual, HSample,
    MonotonicityReport, Verdict,
};
pub use morse::{morse_index, MorseGrid, SpectrumReport};
pub use verify::{integral_form_defect, verify_model, Check};

use crate::error::Result;
use crate::models::ModelParams;
use crate::shooter::{forward_trajectory, ShootConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquatorDiscriminant {
    pub d: f64,
    pub value: f64,
    /// Linearized perturbations about the equator oscillate (value < 0).
    pub oscillatory: bool,
}

/// `d^2 - 8d + 8`; negative exactly when perturbations of the equator map
/// oscillate.
pub fn equator_discriminant(d: f64) -> EquatorDiscriminant {
    let value = d * d - 8.0 * d + 8.0;
    EquatorDiscriminant {
        d,
        value,
        oscillatory: value < 0.0,
    }
}

/// Integrates from the origin with parameter `a` and scans `h'` up to the
/// exit point.
pub fn monotonicity_certificate(
    params: &ModelParams,
    a: f64,
    cfg: &ShootConfig,
) -> Result<MonotonicityReport> {
    let traj = forward_trajectory(params, a, cfg)?;
    Ok(monotonicity_of(&traj, params, a))
}
