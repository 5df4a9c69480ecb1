//! Shrinker ODEs for the equivariant harmonic-map and Yang–Mills heat flows.
//!
//! Both profile equations share the form
//!
//! ```text
//! v'' + (D/y - y/2) v' - K N(v) / y^2 = 0
//! ```
//!
//! with `D = d-1, K = (d-1)/2, N(v) = sin 2v` for the harmonic map flow and
//! `D = d-3, K = d-2, N(v) = v(v-1)(v-2)` for the Yang–Mills flow. The
//! origin is a regular singular point; integration starts a short distance
//! away from it using a power series, and the decaying tail at infinity is
//! described by an asymptotic series in `1/y^2`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::SystemState;
use crate::series;

/// Largest supported truncation order of the origin series.
pub const MAX_SERIES_ORDER: usize = 41;
pub const DEFAULT_LAUNCH_OFFSET: f64 = 1e-3;
pub const DEFAULT_SERIES_ORDER: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FlowKind {
    HarmonicMap,
    YangMills,
}

impl FlowKind {
    pub fn name(self) -> &'static str {
        match self {
            FlowKind::HarmonicMap => "harmonic map",
            FlowKind::YangMills => "Yang-Mills",
        }
    }

    /// Dimensions must exceed this value.
    pub fn min_dimension(self) -> f64 {
        match self {
            FlowKind::HarmonicMap => 2.0,
            FlowKind::YangMills => 4.0,
        }
    }

    /// Dimension from which no shrinker exists.
    pub fn critical_dimension(self) -> f64 {
        match self {
            FlowKind::HarmonicMap => 7.0,
            FlowKind::YangMills => 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    kind: FlowKind,
    d: f64,
}

impl ModelParams {
    pub fn new(kind: FlowKind, d: f64) -> Result<Self> {
        let min = kind.min_dimension();
        if !(d.is_finite() && d > min) {
            return Err(Error::InadmissibleDimension {
                model: kind.name(),
                d,
                min,
            });
        }
        Ok(Self { kind, d })
    }

    pub fn harmonic_map(d: f64) -> Result<Self> {
        Self::new(FlowKind::HarmonicMap, d)
    }

    pub fn yang_mills(d: f64) -> Result<Self> {
        Self::new(FlowKind::YangMills, d)
    }

    pub fn kind(&self) -> FlowKind {
        self.kind
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// The equator value: `pi/2` for harmonic maps, `1` for Yang–Mills.
    pub fn equator(&self) -> f64 {
        match self.kind {
            FlowKind::HarmonicMap => FRAC_PI_2,
            FlowKind::YangMills => 1.0,
        }
    }

    /// Image of a profile value under the reflection symmetry.
    pub fn reflect(&self, v: f64) -> f64 {
        match self.kind {
            FlowKind::HarmonicMap => PI - v,
            FlowKind::YangMills => 2.0 - v,
        }
    }

    /// Constant solutions of the profile equation.
    pub fn constant_solutions(&self) -> [f64; 3] {
        match self.kind {
            FlowKind::HarmonicMap => [0.0, FRAC_PI_2, PI],
            FlowKind::YangMills => [0.0, 1.0, 2.0],
        }
    }

    pub(crate) fn damping(&self) -> f64 {
        match self.kind {
            FlowKind::HarmonicMap => self.d - 1.0,
            FlowKind::YangMills => self.d - 3.0,
        }
    }

    pub(crate) fn coupling(&self) -> f64 {
        match self.kind {
            FlowKind::HarmonicMap => 0.5 * (self.d - 1.0),
            FlowKind::YangMills => self.d - 2.0,
        }
    }

    pub(crate) fn nonlinearity(&self, v: f64) -> f64 {
        match self.kind {
            FlowKind::HarmonicMap => (2.0 * v).sin(),
            FlowKind::YangMills => v * (v - 1.0) * (v - 2.0),
        }
    }

    pub(crate) fn nonlinearity_prime(&self, v: f64) -> f64 {
        match self.kind {
            FlowKind::HarmonicMap => 2.0 * (2.0 * v).cos(),
            FlowKind::YangMills => 3.0 * v * v - 6.0 * v + 2.0,
        }
    }

    /// `N(equator + w)`, free of cancellation for small `w`.
    pub(crate) fn shifted_nonlinearity(&self, w: f64) -> f64 {
        match self.kind {
            FlowKind::HarmonicMap => -(2.0 * w).sin(),
            FlowKind::YangMills => w * (w * w - 1.0),
        }
    }

    /// Vector field for the deviation `w = v - equator`; `y` must be positive.
    #[inline]
    pub fn deviation_field(&self, y: f64, u: &[f64; 2]) -> [f64; 2] {
        let [w, p] = *u;
        let wpp = -(self.damping() / y - 0.5 * y) * p + self.coupling() * self.shifted_nonlinearity(w) / (y * y);
        [p, wpp]
    }

    /// Vector field `(v', v'')` without the domain check; `y` must be positive.
    #[inline]
    pub fn field(&self, y: f64, u: &[f64; 2]) -> [f64; 2] {
        let [v, p] = *u;
        let vpp = -(self.damping() / y - 0.5 * y) * p + self.coupling() * self.nonlinearity(v) / (y * y);
        [p, vpp]
    }

    pub fn rhs(&self, state: &SystemState<2>) -> Result<[f64; 2]> {
        if !(state.y > 0.0) {
            return Err(Error::Domain(state.y));
        }
        Ok(self.field(state.y, &state.u))
    }

    /// `v'''` obtained by differentiating the profile equation along a solution.
    pub fn third_derivative(&self, y: f64, u: &[f64; 2]) -> f64 {
        let [v, p] = *u;
        let vpp = self.field(y, u)[1];
        let dam = self.damping();
        let k = self.coupling();
        let dy = (dam / (y * y) + 0.5) * p - 2.0 * k * self.nonlinearity(v) / (y * y * y);
        let dv = k * self.nonlinearity_prime(v) / (y * y);
        let dp = -(dam / y - 0.5 * y);
        dy + dv * p + dp * vpp
    }

    /// `lim y^3 v'(y)` for a profile tending to `b`.
    pub fn tail_constant(&self, b: f64) -> f64 {
        -2.0 * self.coupling() * self.nonlinearity(b)
    }

    /// Tail mismatch `Y^3 v'(Y) + 2K N(v(Y))`; zero when the leading-order
    /// decay condition holds at `Y`.
    pub fn miss(&self, y: f64, u: &[f64; 2]) -> f64 {
        y.powi(3) * u[1] - self.tail_constant(u[0])
    }

    /// Tail evaluation point used by the shooter.
    pub fn default_tail_point(&self) -> f64 {
        12.0_f64.max(2.0 * (2.0 * self.d).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OriginData {
    pub a: f64,
    pub y_start: f64,
    pub order: usize,
}

impl OriginData {
    pub fn new(a: f64, y_start: f64, order: usize) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidOrigin(format!("shooting parameter a = {a} must be positive")));
        }
        if !(y_start > 0.0 && y_start.is_finite()) {
            return Err(Error::InvalidOrigin(format!("launch offset {y_start} must be positive")));
        }
        if order < 3 {
            return Err(Error::InvalidOrigin(format!("series order {order} must be at least 3")));
        }
        Ok(Self { a, y_start, order })
    }

    /// Default launch: the offset shrinks with the intrinsic length scale of
    /// the profile near the origin (`1/a` for harmonic maps, `1/sqrt(a)` for
    /// Yang–Mills).
    pub fn launch(params: &ModelParams, a: f64, offset: f64, order: usize) -> Result<Self> {
        let scale = match params.kind() {
            FlowKind::HarmonicMap => a.max(1.0),
            FlowKind::YangMills => a.max(1.0).sqrt(),
        };
        Self::new(a, offset / scale, order)
    }
}

/// Coefficients `c_k` of the regular solution `sum c_k y^k` at the origin,
/// through power `order`. The first coefficient is `a` (harmonic map, odd
/// series) or `a/2` (Yang–Mills, even series).
pub fn series_coefficients(params: &ModelParams, a: f64, order: usize) -> Result<Vec<f64>> {
    if order > MAX_SERIES_ORDER {
        return Err(Error::SeriesOrder {
            requested: order,
            max: MAX_SERIES_ORDER,
        });
    }
    let d = params.d();
    let dam = params.damping();
    let k_c = params.coupling();
    let len = order + 1;
    let mut c = vec![0.0; len.max(3)];
    let first = match params.kind() {
        FlowKind::HarmonicMap => {
            c[1] = a;
            1
        }
        FlowKind::YangMills => {
            c[2] = 0.5 * a;
            2
        }
    };
    let mut k = first + 2;
    while k <= order {
        // Nonlinear term with c_k still zero gives its contribution from lower orders.
        let lower = nonlinear_series(params, &c, k + 1)[k];
        let kf = k as f64;
        let diag = kf * (kf - 1.0) + dam * kf - 2.0 * k_c;
        debug_assert!(diag > 0.0, "indicial factor vanishes at k={k}, d={d}");
        c[k] = (0.5 * (kf - 2.0) * c[k - 2] + k_c * lower) / diag;
        k += 2;
    }
    c.truncate(len);
    Ok(c)
}

fn nonlinear_series(params: &ModelParams, v: &[f64], len: usize) -> Vec<f64> {
    match params.kind() {
        FlowKind::HarmonicMap => {
            let twice: Vec<f64> = v.iter().map(|x| 2.0 * x).collect();
            series::sin_cos(&twice, len).0
        }
        FlowKind::YangMills => {
            let sq = series::mul(v, v, len);
            let cube = series::mul(&sq, v, len);
            (0..len)
                .map(|i| {
                    let vi = v.get(i).copied().unwrap_or(0.0);
                    cube[i] - 3.0 * sq[i] + 2.0 * vi
                })
                .collect()
        }
    }
}

fn shifted_nonlinear_series(params: &ModelParams, w: &[f64], len: usize) -> Vec<f64> {
    match params.kind() {
        FlowKind::HarmonicMap => {
            let twice: Vec<f64> = w.iter().map(|x| 2.0 * x).collect();
            series::sin_cos(&twice, len).0.into_iter().map(|c| -c).collect()
        }
        FlowKind::YangMills => {
            let sq = series::mul(w, w, len);
            let cube = series::mul(&sq, w, len);
            (0..len)
                .map(|i| cube[i] - w.get(i).copied().unwrap_or(0.0))
                .collect()
        }
    }
}

/// State at the launch offset from the truncated origin series.
pub fn series_origin(params: &ModelParams, origin: &OriginData) -> Result<SystemState<2>> {
    let c = series_coefficients(params, origin.a, origin.order)?;
    let (v, p) = series::eval_with_derivative(&c, origin.y_start);
    Ok(SystemState::new(origin.y_start, [v, p]))
}

/// Residual `v'' - field(v, v')` of the truncated origin series at `y`.
pub fn series_residual(params: &ModelParams, a: f64, order: usize, y: f64) -> Result<f64> {
    let c = series_coefficients(params, a, order)?;
    let (v, p) = series::eval_with_derivative(&c, y);
    let dc: Vec<f64> = c.iter().enumerate().skip(1).map(|(k, ck)| k as f64 * ck).collect();
    let (_, vpp) = series::eval_with_derivative(&dc, y);
    let rhs = params.rhs(&SystemState::new(y, [v, p]))?;
    Ok(vpp - rhs[1])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailData {
    pub b: f64,
    pub y: f64,
}

/// Leading-order tail: `v = b + t1/Y^2`, `v' = -2 t1/Y^3` with
/// `2 t1 = -lim y^3 v'`.
pub fn tail_state(params: &ModelParams, tail: &TailData) -> Result<SystemState<2>> {
    tail_series_state(params, tail, 1)
}

/// Coefficients `t_k` of the asymptotic tail `v ~ sum t_k y^(-2k)`, `t_0 = b`.
pub fn tail_series_coefficients(params: &ModelParams, b: f64, terms: usize) -> Vec<f64> {
    tail_recurrence(params, b, terms, |t, m| nonlinear_series(params, t, m))
}

/// Tail coefficients of the deviation `w = v - equator`, with `t_0 = beta`
/// the limit of `w`. Accurate in relative terms even when `beta` is tiny.
pub fn tail_deviation_coefficients(params: &ModelParams, beta: f64, terms: usize) -> Vec<f64> {
    tail_recurrence(params, beta, terms, |t, m| shifted_nonlinear_series(params, t, m))
}

fn tail_recurrence<F>(params: &ModelParams, t0: f64, terms: usize, nonlinear: F) -> Vec<f64>
where
    F: Fn(&[f64], usize) -> Vec<f64>,
{
    let dam = params.damping();
    let k_c = params.coupling();
    let len = terms + 1;
    let mut t = vec![0.0; len];
    t[0] = t0;
    for m in 1..len {
        let q = nonlinear(&t[..m], m);
        let mf = m as f64;
        t[m] = (2.0 * (mf - 1.0) * (dam - 2.0 * mf + 1.0) * t[m - 1] + k_c * q[m - 1]) / mf;
    }
    t
}

fn state_from_tail(t: &[f64], y: f64) -> SystemState<2> {
    let x = 1.0 / (y * y);
    let (v, dv_dx) = series::eval_with_derivative(t, x);
    SystemState::new(y, [v, dv_dx * (-2.0 * x / y)])
}

/// Tail state from `terms` terms of the asymptotic series.
pub fn tail_series_state(params: &ModelParams, tail: &TailData, terms: usize) -> Result<SystemState<2>> {
    if !(tail.y > 0.0 && tail.y.is_finite()) {
        return Err(Error::InvalidArgument(format!("tail point {} must be positive", tail.y)));
    }
    Ok(state_from_tail(&tail_series_coefficients(params, tail.b, terms), tail.y))
}

/// Deviation state `(w, w')` at `y` of the tail whose deviation tends to `beta`.
pub fn tail_deviation_state(params: &ModelParams, beta: f64, y: f64, terms: usize) -> Result<SystemState<2>> {
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::InvalidArgument(format!("tail point {y} must be positive")));
    }
    Ok(state_from_tail(&tail_deviation_coefficients(params, beta, terms), y))
}

/// Inverts the tail series: the limit `b` whose asymptotic profile passes
/// through `value` at `y`.
pub fn estimate_limit(params: &ModelParams, value: f64, y: f64, terms: usize) -> f64 {
    let mut b = value;
    for _ in 0..100 {
        let state = match tail_series_state(params, &TailData { b, y }, terms) {
            Ok(s) => s,
            Err(_) => return value,
        };
        let next = b - (state.u[0] - value);
        if !next.is_finite() {
            return value;
        }
        if (next - b).abs() <= 1e-15 * next.abs().max(1.0) {
            return next;
        }
        b = next;
    }
    b
}

/// `gamma` and `delta` of the explicit Yang–Mills shrinker
/// `g1 = y^2 / (gamma + delta y^2)`.
pub fn ym_g1_parameters(d: f64) -> (f64, f64) {
    let gamma = 0.5 * (6.0 * d - 12.0 - (d + 2.0) * (2.0 * d - 4.0).sqrt());
    let delta = (d - 2.0).sqrt() / (2.0 * 2.0_f64.sqrt());
    (gamma, delta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExplicitG1 {
    pub g: f64,
    pub gp: f64,
    pub gpp: f64,
    /// Location of the pole when `gamma < 0`.
    pub pole: Option<f64>,
}

pub fn ym_explicit_g1(d: f64, y: f64) -> Result<ExplicitG1> {
    if !(d > 2.0) {
        return Err(Error::InvalidArgument(format!("explicit profile needs d > 2, got {d}")));
    }
    let (gamma, delta) = ym_g1_parameters(d);
    let pole = (gamma < 0.0).then(|| (-gamma / delta).sqrt());
    let den = gamma + delta * y * y;
    if den.abs() <= 1e-14 * (gamma.abs() + delta * y * y) {
        return Err(Error::Pole {
            y,
            pole: pole.unwrap_or(0.0),
        });
    }
    let g = y * y / den;
    let gp = 2.0 * gamma * y / (den * den);
    let gpp = 2.0 * gamma * (gamma - 3.0 * delta * y * y) / (den * den * den);
    Ok(ExplicitG1 { g, gp, gpp, pole })
}

/// `v'^2 + (d-1) sin^2(v) / y^2`, bounded along a shrinker iff its blowup is
/// of type I.
pub fn type1_quantity(params: &ModelParams, state: &SystemState<2>) -> Result<f64> {
    if params.kind() != FlowKind::HarmonicMap {
        return Err(Error::Unsupported("type-I quantity"));
    }
    if !(state.y > 0.0) {
        return Err(Error::Domain(state.y));
    }
    let [f, fp] = state.u;
    let s = f.sin() / state.y;
    Ok(fp * fp + (params.d() - 1.0) * s * s)
}
