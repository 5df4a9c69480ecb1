//! Shooting from the singular origin.
//!
//! A forward shot launches the regular origin solution with parameter `a`
//! and integrates it to the tail point `Y`, counting transversal crossings of
//! the equator value. Off-solutions pick up the growing mode
//! `y^(-D) e^(y^2/4)`, so the sign of the tail mismatch
//! `M(a) = Y^3 v'(Y) + 2K N(v(Y))` flips across every shrinker and a sweep of
//! `a` brackets them.
//!
//! Forward shots cannot resolve a shrinker much beyond the bracketing stage,
//! because the growing mode amplifies every error by about `e^(Y^2/4)`.
//! [`refine`] therefore bisects first and then polishes `(a, b)` with a
//! Newton iteration that matches the forward solution against a backward
//! integration from the asymptotic tail at an interior point.

use rayon::prelude::*;
use serde::Serialize;

use crate::diagnostics::energy;
use crate::error::{Error, Result};
use crate::models::{
    estimate_limit, series_origin, tail_deviation_coefficients, tail_deviation_state,
    type1_quantity, FlowKind, ModelParams, OriginData, DEFAULT_LAUNCH_OFFSET,
    DEFAULT_SERIES_ORDER,
};
use crate::ode::{
    integrate, Direction, EventSpec, IntegratorConfig, Sample, SystemState, Termination,
    Trajectory,
};

/// Crossings with `|v'|` below this are tangential touches and are not counted.
pub const TANGENCY_TOL: f64 = 1e-12;
/// Terms of the asymptotic tail series used for tail states and limits.
pub const TAIL_TERMS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootConfig {
    pub integrator: IntegratorConfig,
    /// Tail point `Y`; `None` selects the model default.
    pub tail_point: Option<f64>,
    pub tail_tol: f64,
    /// A shot counts as type-I bounded while `sup (v'^2 + (d-1) sin^2 v / y^2)`
    /// stays below `bound_cap * max(1, d a^2)`.
    pub bound_cap: f64,
    pub launch_offset: f64,
    pub series_order: usize,
}

impl Default for ShootConfig {
    fn default() -> Self {
        Self {
            integrator: IntegratorConfig::default(),
            tail_point: None,
            tail_tol: 1e-6,
            bound_cap: 1e4,
            launch_offset: DEFAULT_LAUNCH_OFFSET,
            series_order: DEFAULT_SERIES_ORDER,
        }
    }
}

impl ShootConfig {
    pub fn tail_point_for(&self, params: &ModelParams) -> f64 {
        self.tail_point.unwrap_or_else(|| params.default_tail_point())
    }

    fn validate(&self) -> Result<()> {
        self.integrator.validate()?;
        if let Some(y) = self.tail_point {
            if !(y > 0.0 && y.is_finite()) {
                return Err(Error::InvalidArgument(format!("tail point {y} must be positive")));
            }
        }
        if !(self.tail_tol > 0.0) {
            return Err(Error::InvalidArgument("tail tolerance must be positive".into()));
        }
        if !(self.bound_cap > 0.0) {
            return Err(Error::InvalidArgument("bound cap must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exit {
    TailMatched,
    OvershootTop,
    UndershootBottom,
    Diverged,
    Inconclusive,
}

impl Exit {
    pub fn as_str(self) -> &'static str {
        match self {
            Exit::TailMatched => "tail_matched",
            Exit::OvershootTop => "overshoot_top",
            Exit::UndershootBottom => "undershoot_bottom",
            Exit::Diverged => "diverged",
            Exit::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootOutcome {
    pub a: f64,
    pub crossings: usize,
    pub exit: Exit,
    /// Tail mismatch at `Y`; `+-inf` on divergence (sign of `v'`), NaN when
    /// the integration failed.
    pub miss: f64,
    /// Limit of the asymptotic tail through `v(Y)`; NaN unless `Y` was reached.
    pub b_estimate: f64,
    pub y_exit: f64,
    /// Supremum of the type-I quantity (harmonic map only).
    pub max_type1: Option<f64>,
}

/// Sample at `y = 0` of the regular origin solution.
fn origin_sample(params: &ModelParams, a: f64) -> Sample<2> {
    match params.kind() {
        FlowKind::HarmonicMap => Sample {
            y: 0.0,
            u: [0.0, a],
            du: [a, 0.0],
        },
        FlowKind::YangMills => Sample {
            y: 0.0,
            u: [0.0, 0.0],
            du: [0.0, a],
        },
    }
}

fn launch_config(cfg: &IntegratorConfig, y_start: f64) -> IntegratorConfig {
    IntegratorConfig {
        initial_step: cfg.initial_step.min(0.1 * y_start).min(cfg.max_step),
        ..*cfg
    }
}

fn integrate_from_origin(
    params: &ModelParams,
    a: f64,
    y_end: f64,
    cfg: &ShootConfig,
    with_events: bool,
) -> Result<Trajectory<2>> {
    cfg.validate()?;
    let origin = OriginData::launch(params, a, cfg.launch_offset, cfg.series_order)?;
    let state = series_origin(params, &origin)?;
    let eq = params.equator();
    let events = if with_events {
        vec![EventSpec::new(move |_, u: &[f64; 2]| u[0] - eq, Direction::Any, false)]
    } else {
        Vec::new()
    };
    let p = *params;
    let mut traj = integrate(
        move |y, u| p.field(y, u),
        &state,
        y_end,
        &launch_config(&cfg.integrator, origin.y_start),
        &events,
    )?;
    traj.samples.insert(0, origin_sample(params, a));
    Ok(traj)
}

/// Solution launched from the origin with parameter `a`, integrated up to
/// the tail point or until it diverges. The first sample is the origin itself.
pub fn forward_trajectory(params: &ModelParams, a: f64, cfg: &ShootConfig) -> Result<Trajectory<2>> {
    integrate_from_origin(params, a, cfg.tail_point_for(params), cfg, true)
}

fn max_type1(params: &ModelParams, samples: &[Sample<2>]) -> Option<f64> {
    if params.kind() != FlowKind::HarmonicMap {
        return None;
    }
    let sup = samples
        .iter()
        .filter(|s| s.y > 0.0)
        .filter_map(|s| type1_quantity(params, &s.state()).ok())
        .fold(0.0_f64, f64::max);
    Some(sup)
}

fn type1_bounded(params: &ModelParams, a: f64, sup: Option<f64>, cap: f64) -> bool {
    match sup {
        Some(s) => s.is_finite() && s <= cap * (params.d() * a * a).max(1.0),
        None => true,
    }
}

fn count_crossings(traj: &Trajectory<2>) -> usize {
    traj.events.iter().filter(|e| e.u[1].abs() >= TANGENCY_TOL).count()
}

/// Classifies the forward shot with parameter `a`.
pub fn shoot(params: &ModelParams, a: f64, cfg: &ShootConfig) -> Result<ShootOutcome> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidOrigin(format!("shooting parameter a = {a} must be positive")));
    }
    let traj = forward_trajectory(params, a, cfg)?;
    let last = traj.last();
    let crossings = count_crossings(&traj);
    let sup = max_type1(params, &traj.samples);
    let mut outcome = ShootOutcome {
        a,
        crossings,
        exit: Exit::Inconclusive,
        miss: f64::NAN,
        b_estimate: f64::NAN,
        y_exit: last.y,
        max_type1: sup,
    };
    match traj.reason {
        Termination::Diverged => {
            outcome.exit = Exit::Diverged;
            let slope = if last.u[1] != 0.0 { last.u[1] } else { last.u[0] };
            outcome.miss = if slope >= 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
        }
        Termination::ReachedEnd if last.u.iter().all(|v| v.is_finite()) => {
            let miss = params.miss(last.y, &last.u);
            outcome.miss = miss;
            outcome.b_estimate = estimate_limit(params, last.u[0], last.y, TAIL_TERMS);
            outcome.exit = if miss.abs() < cfg.tail_tol && type1_bounded(params, a, sup, cfg.bound_cap) {
                Exit::TailMatched
            } else if last.u[0] > params.equator() {
                Exit::OvershootTop
            } else {
                Exit::UndershootBottom
            };
        }
        _ => {}
    }
    Ok(outcome)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub a: f64,
    pub outcome: ShootOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BracketKind {
    /// The miss changes sign.
    SignChange,
    /// Only the crossing count changes.
    CrossingChange,
    Both,
}

impl BracketKind {
    pub fn has_sign_change(self) -> bool {
        matches!(self, BracketKind::SignChange | BracketKind::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bracket {
    pub a_lo: f64,
    pub a_hi: f64,
    pub crossings_lo: usize,
    pub crossings_hi: usize,
    pub kind: BracketKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub brackets: Vec<Bracket>,
}

impl SweepTable {
    pub fn count(&self, exit: Exit) -> usize {
        self.rows.iter().filter(|r| r.outcome.exit == exit).count()
    }
}

fn miss_sign(miss: f64) -> Option<bool> {
    if miss.is_nan() || miss == 0.0 {
        None
    } else {
        Some(miss > 0.0)
    }
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i + 1 == n {
                hi
            } else {
                (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

fn brackets_of(rows: &[SweepRow]) -> Vec<Bracket> {
    rows.windows(2)
        .filter_map(|w| {
            let (lo, hi) = (&w[0].outcome, &w[1].outcome);
            let sign = match (miss_sign(lo.miss), miss_sign(hi.miss)) {
                (Some(x), Some(y)) => x != y,
                _ => false,
            };
            let cross = lo.crossings != hi.crossings;
            let kind = match (sign, cross) {
                (true, true) => BracketKind::Both,
                (true, false) => BracketKind::SignChange,
                (false, true) => BracketKind::CrossingChange,
                (false, false) => return None,
            };
            Some(Bracket {
                a_lo: lo.a,
                a_hi: hi.a,
                crossings_lo: lo.crossings,
                crossings_hi: hi.crossings,
                kind,
            })
        })
        .collect()
}

fn sweep_points(params: &ModelParams, grid: &[f64], cfg: &ShootConfig) -> Result<Vec<SweepRow>> {
    grid.par_iter()
        .map(|&a| shoot(params, a, cfg).map(|outcome| SweepRow { a, outcome }))
        .collect()
}

/// Shoots on `n_grid` log-spaced values of `a` in `[a_min, a_max]` and flags
/// adjacent rows whose crossing counts differ or whose misses change sign.
pub fn bracket_sweep(
    params: &ModelParams,
    a_min: f64,
    a_max: f64,
    n_grid: usize,
    cfg: &ShootConfig,
) -> Result<SweepTable> {
    if !(a_min > 0.0 && a_min < a_max && a_max.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "sweep window [{a_min}, {a_max}] must satisfy 0 < a_min < a_max"
        )));
    }
    if n_grid < 2 {
        return Err(Error::InvalidArgument("sweep needs at least 2 points".into()));
    }
    let rows = sweep_points(params, &log_grid(a_min, a_max, n_grid), cfg)?;
    let brackets = brackets_of(&rows);
    Ok(SweepTable { rows, brackets })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefineConfig {
    pub shoot: ShootConfig,
    /// Bisection stops once the bracket is narrower than this.
    pub tol_a: f64,
    /// Interior point where forward and backward solutions are matched;
    /// `None` places it [`MATCH_SCALE`] intrinsic lengths from the origin,
    /// capped at [`MAX_MATCH_POINT`].
    pub match_point: Option<f64>,
    /// Start of the backward integration from the asymptotic tail.
    pub far_point: f64,
    pub max_newton: usize,
    /// The matching residual must fall below this for success.
    pub match_tol: f64,
}

impl Default for RefineConfig {
    fn default() -> Self {
        Self {
            shoot: ShootConfig::default(),
            tol_a: 1e-10,
            match_point: None,
            far_point: 40.0,
            max_newton: 40,
            match_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShrinkerSolution {
    pub a: f64,
    pub b: f64,
    /// `b - equator`, carried separately because it can be far smaller than
    /// the resolution of `b`.
    pub beta: f64,
    /// Transversal crossings of the equator value.
    pub n: usize,
    #[serde(skip)]
    pub trajectory: Trajectory<2>,
    pub max_type1: Option<f64>,
    pub energy: Option<f64>,
    /// `|Y^3 v'(Y) + 2K N(b)|` at the far end `Y` of the profile.
    pub tail_residual: f64,
    pub tail_point: f64,
    /// Mismatch of `(w, w')` at the match point after the Newton polish.
    pub match_residual: f64,
}

const MATCH_MAX_STEP: f64 = 0.05;
pub const MATCH_SCALE: f64 = 16.0;
pub const MAX_MATCH_POINT: f64 = 4.0;
/// A candidate must leave the equator state at the match point by this
/// multiple of the integrator's local error scale.
pub const NOISE_FACTOR: f64 = 100.0;
/// The matching legs integrate deviations that can be many orders of
/// magnitude below one, so their absolute tolerance is scaled down to leave
/// the error control effectively relative.
pub const DEVIATION_ABS_SCALE: f64 = 1e-8;

fn match_point_for(params: &ModelParams, a: f64, cfg: &RefineConfig) -> f64 {
    cfg.match_point.unwrap_or_else(|| {
        let length = match params.kind() {
            FlowKind::HarmonicMap => 1.0 / a.max(1e-12),
            FlowKind::YangMills => 1.0 / a.max(1e-12).sqrt(),
        };
        (MATCH_SCALE * length).min(MAX_MATCH_POINT)
    })
}

fn matching_integrator(cfg: &ShootConfig) -> IntegratorConfig {
    IntegratorConfig {
        max_step: cfg.integrator.max_step.min(MATCH_MAX_STEP),
        initial_step: cfg.integrator.initial_step.min(MATCH_MAX_STEP),
        abs_tol: cfg.integrator.abs_tol * DEVIATION_ABS_SCALE,
        ..cfg.integrator
    }
}

// The matching legs integrate the deviation `w = v - equator`. Profiles with
// many crossings sit extremely close to the equator over most of their range,
// and only the deviation carries their information.

/// Forward leg from the origin to `y_m`, in deviation variables.
fn forward_leg(params: &ModelParams, a: f64, y_m: f64, cfg: &RefineConfig) -> Result<Trajectory<2>> {
    let sc = &cfg.shoot;
    sc.validate()?;
    let origin = OriginData::launch(params, a, sc.launch_offset, sc.series_order)?;
    let launch = series_origin(params, &origin)?;
    let start = SystemState::new(launch.y, [launch.u[0] - params.equator(), launch.u[1]]);
    let p = *params;
    let icfg = launch_config(&matching_integrator(sc), origin.y_start);
    let traj = integrate(move |y, u| p.deviation_field(y, u), &start, y_m, &icfg, &[])?;
    if traj.reason != Termination::ReachedEnd {
        return Err(Error::MatchFailed {
            residual: f64::INFINITY,
            iterations: 0,
        });
    }
    Ok(traj)
}

/// Backward leg from the asymptotic tail with deviation limit `beta` at the
/// far point down to `y_m`, in deviation variables and increasing `y`.
fn backward_leg(params: &ModelParams, beta: f64, y_m: f64, cfg: &RefineConfig) -> Result<Trajectory<2>> {
    let start = tail_deviation_state(params, beta, cfg.far_point, TAIL_TERMS)?;
    let p = *params;
    // s = -y, state (w, dw/ds) = (w, -w').
    let rev = move |s: f64, u: &[f64; 2]| {
        let f = p.deviation_field(-s, &[u[0], -u[1]]);
        [u[1], f[1]]
    };
    let s0 = SystemState::new(-cfg.far_point, [start.u[0], -start.u[1]]);
    let traj = integrate(rev, &s0, -y_m, &matching_integrator(&cfg.shoot), &[])?;
    if traj.reason != Termination::ReachedEnd {
        return Err(Error::MatchFailed {
            residual: f64::INFINITY,
            iterations: 0,
        });
    }
    let samples = traj
        .samples
        .iter()
        .rev()
        .map(|s| Sample {
            y: -s.y,
            u: [s.u[0], -s.u[1]],
            du: [-s.du[0], s.du[1]],
        })
        .collect();
    Ok(Trajectory {
        samples,
        events: Vec::new(),
        reason: Termination::ReachedEnd,
    })
}

fn match_residual(params: &ModelParams, a: f64, beta: f64, y_m: f64, cfg: &RefineConfig) -> Result<[f64; 2]> {
    let f = forward_leg(params, a, y_m, cfg)?.last().u;
    let g = backward_leg(params, beta, y_m, cfg)?.first().u;
    Ok([f[0] - g[0], f[1] - g[1]])
}

fn norm(r: &[f64; 2]) -> f64 {
    r[0].abs().max(r[1].abs())
}

/// Newton iteration on `(a, beta)` for the two-sided matching conditions.
fn polish(params: &ModelParams, a0: f64, beta0: f64, y_m: f64, cfg: &RefineConfig) -> Result<(f64, f64, f64)> {
    let (mut a, mut beta) = (a0, beta0);
    let mut r = match_residual(params, a, beta, y_m, cfg)?;
    let mut iterations = 0;
    while iterations < cfg.max_newton {
        if norm(&r) < 1e-14 {
            break;
        }
        iterations += 1;
        let da = 1e-7 * a.abs();
        let db = 1e-7 * beta.abs().max(1e-12);
        let ra = match_residual(params, a + da, beta, y_m, cfg)?;
        let rb = match_residual(params, a, beta + db, y_m, cfg)?;
        let j = [
            [(ra[0] - r[0]) / da, (rb[0] - r[0]) / db],
            [(ra[1] - r[1]) / da, (rb[1] - r[1]) / db],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if !(det.abs() > 0.0 && det.is_finite()) {
            break;
        }
        let step_a = (j[1][1] * r[0] - j[0][1] * r[1]) / det;
        let step_b = (j[0][0] * r[1] - j[1][0] * r[0]) / det;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let (na, nb) = (a - lambda * step_a, beta - lambda * step_b);
            if na > 0.0 {
                if let Ok(nr) = match_residual(params, na, nb, y_m, cfg) {
                    if norm(&nr) < norm(&r) {
                        a = na;
                        beta = nb;
                        r = nr;
                        accepted = true;
                        break;
                    }
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let res = norm(&r);
    if !(res < cfg.match_tol) {
        return Err(Error::MatchFailed {
            residual: res,
            iterations,
        });
    }
    Ok((a, beta, res))
}

/// Literal decay-condition defect `|Y^3 v'(Y) + 2K N(b)|` of the asymptotic
/// tail with deviation limit `beta`.
fn tail_defect(params: &ModelParams, beta: f64, y: f64) -> f64 {
    let t = tail_deviation_coefficients(params, beta, TAIL_TERMS);
    let x = 1.0 / (y * y);
    let (_, dw_dx) = crate::series::eval_with_derivative(&t, x);
    let wp = dw_dx * (-2.0 * x / y);
    (y.powi(3) * wp + 2.0 * params.coupling() * params.shifted_nonlinearity(beta)).abs()
}

/// Beyond the far point the asymptotic series is exact to rounding, so the
/// profile is continued with series samples until the decay condition holds
/// literally to well below `tail_tol`.
fn analytic_extension(params: &ModelParams, beta: f64, from: f64, tail_tol: f64) -> Result<Vec<Sample<2>>> {
    let mut y_end = from;
    while tail_defect(params, beta, y_end) >= 1e-2 * tail_tol && y_end < 1e7 {
        y_end *= 2.0;
    }
    if y_end == from {
        return Ok(Vec::new());
    }
    let doublings = (y_end / from).log2().round() as usize;
    let n = 16 * doublings;
    let eq = params.equator();
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let y = from * (y_end / from).powf(i as f64 / n as f64);
        let s = tail_deviation_state(params, beta, y, TAIL_TERMS)?;
        out.push(Sample {
            y,
            u: [s.u[0] + eq, s.u[1]],
            du: params.deviation_field(y, &s.u),
        });
    }
    Ok(out)
}

fn crossings_of(params: &ModelParams, samples: &[Sample<2>]) -> usize {
    let eq = params.equator();
    let mut count = 0;
    let mut prev: Option<f64> = None;
    for s in samples.iter().filter(|s| s.y > 0.0) {
        let g = s.u[0] - eq;
        if g == 0.0 {
            continue;
        }
        if let Some(p) = prev {
            if (p < 0.0) != (g < 0.0) && s.u[1].abs() >= TANGENCY_TOL {
                count += 1;
            }
        }
        prev = Some(g);
    }
    count
}

fn to_profile(eq: f64, s: &Sample<2>) -> Sample<2> {
    Sample {
        y: s.y,
        u: [s.u[0] + eq, s.u[1]],
        du: s.du,
    }
}

/// Assembles the matched profile for `(a, beta)`, with `beta = b - equator`:
/// origin, forward leg, backward leg and analytic tail.
pub fn matched_profile(params: &ModelParams, a: f64, beta: f64, cfg: &RefineConfig) -> Result<Trajectory<2>> {
    let y_m = match_point_for(params, a, cfg);
    let eq = params.equator();
    let fwd = forward_leg(params, a, y_m, cfg)?;
    let bwd = backward_leg(params, beta, y_m, cfg)?;
    let mut samples = vec![origin_sample(params, a)];
    samples.extend(fwd.samples.iter().map(|s| to_profile(eq, s)));
    samples.extend(bwd.samples.iter().skip(1).map(|s| to_profile(eq, s)));
    samples.extend(analytic_extension(params, beta, cfg.far_point, cfg.shoot.tail_tol)?);
    Ok(Trajectory {
        samples,
        events: Vec::new(),
        reason: Termination::ReachedEnd,
    })
}

/// Refines a sign-change bracket to a shrinker.
pub fn refine(params: &ModelParams, a_lo: f64, a_hi: f64, cfg: &RefineConfig) -> Result<ShrinkerSolution> {
    if !(cfg.tol_a > 0.0 && cfg.tol_a.is_finite()) {
        return Err(Error::InvalidArgument(format!("tol_a = {} must be positive", cfg.tol_a)));
    }
    if !(a_lo > 0.0 && a_lo < a_hi && a_hi.is_finite()) {
        return Err(Error::InvalidArgument(format!("invalid bracket [{a_lo}, {a_hi}]")));
    }
    if let Some(m) = cfg.match_point {
        if !(m > 0.0 && cfg.far_point > m) {
            return Err(Error::InvalidArgument("need 0 < match_point < far_point".into()));
        }
    }
    if !(cfg.far_point > MAX_MATCH_POINT && cfg.far_point.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "far point must exceed {MAX_MATCH_POINT}"
        )));
    }
    let sc = &cfg.shoot;
    let s_lo = miss_sign(shoot(params, a_lo, sc)?.miss);
    let s_hi = miss_sign(shoot(params, a_hi, sc)?.miss);
    let (Some(s_lo), Some(s_hi)) = (s_lo, s_hi) else {
        return Err(Error::BracketDissolved { a_lo, a_hi });
    };
    if s_lo == s_hi {
        return Err(Error::BracketDissolved { a_lo, a_hi });
    }
    let (mut lo, mut hi) = (a_lo, a_hi);
    for _ in 0..400 {
        if hi - lo < cfg.tol_a {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match miss_sign(shoot(params, mid, sc)?.miss) {
            Some(s) if s == s_lo => lo = mid,
            Some(_) => hi = mid,
            None => break,
        }
    }
    let a_mid = 0.5 * (lo + hi);

    // Starting limit from the forward solution at a moderate distance, where
    // the bisected shot is still accurate.
    let probe = integrate_from_origin(params, a_mid, cfg.far_point.min(8.0), sc, false)?;
    let last = probe.last();
    let eq = params.equator();
    let beta0 = estimate_limit(params, last.u[0], last.y, TAIL_TERMS) - eq;

    let y_m = match_point_for(params, a_mid, cfg);
    let (a, beta, match_res) = polish(params, a_mid, beta0, y_m, cfg)?;
    let at_match = forward_leg(params, a, y_m, cfg)?.last().u;
    let deviation = at_match[0].abs().max((at_match[1] * y_m).abs());
    let noise = NOISE_FACTOR * (sc.integrator.abs_tol + sc.integrator.rel_tol * eq);
    if deviation < noise {
        return Err(Error::Unresolved { a, deviation, noise });
    }
    let trajectory = matched_profile(params, a, beta, cfg)?;
    let n = crossings_of(params, &trajectory.samples);
    if n == 0 {
        return Err(Error::MatchFailed {
            residual: match_res,
            iterations: cfg.max_newton,
        });
    }
    let end = trajectory.last();
    let tail_residual =
        (end.y.powi(3) * end.u[1] + 2.0 * params.coupling() * params.shifted_nonlinearity(beta)).abs();
    let energy = match params.kind() {
        FlowKind::HarmonicMap => Some(energy::energy(&trajectory, params)?.value),
        FlowKind::YangMills => None,
    };
    Ok(ShrinkerSolution {
        a,
        b: eq + beta,
        beta,
        n,
        max_type1: max_type1(params, &trajectory.samples),
        energy,
        tail_residual,
        tail_point: end.y,
        match_residual: match_res,
        trajectory,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FindConfig {
    pub refine: RefineConfig,
    pub a_min: f64,
    pub a_max: f64,
    pub n_grid: usize,
    /// The window is widened by decades up to this value while crossing
    /// counts are missing.
    pub a_cap: f64,
    pub points_per_decade: usize,
}

impl Default for FindConfig {
    fn default() -> Self {
        Self {
            refine: RefineConfig::default(),
            a_min: 1e-3,
            a_max: 50.0,
            n_grid: 500,
            a_cap: 1e5,
            points_per_decade: 106,
        }
    }
}

fn refine_sign_brackets(
    params: &ModelParams,
    rows: &[SweepRow],
    cfg: &RefineConfig,
) -> Result<Vec<ShrinkerSolution>> {
    let brackets: Vec<Bracket> = brackets_of(rows)
        .into_iter()
        .filter(|b| b.kind.has_sign_change())
        .collect();
    let refined: Vec<Result<ShrinkerSolution>> = brackets
        .par_iter()
        .map(|b| refine(params, b.a_lo, b.a_hi, cfg))
        .collect();
    let mut out = Vec::new();
    for r in refined {
        match r {
            Ok(s) => out.push(s),
            // Sign flips driven by integration noise leave nothing to match.
            Err(Error::BracketDissolved { .. } | Error::Unresolved { .. } | Error::MatchFailed { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Sweeps, refines every sign-change bracket and returns the solutions with
/// crossing counts `1..=n_max` that were found, sorted by `n`.
pub fn find_shrinkers(params: &ModelParams, n_max: usize, cfg: &FindConfig) -> Result<Vec<ShrinkerSolution>> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let sc = &cfg.refine.shoot;
    let mut table = bracket_sweep(params, cfg.a_min, cfg.a_max, cfg.n_grid, sc)?;
    let mut found = refine_sign_brackets(params, &table.rows, &cfg.refine)?;
    let complete = |found: &[ShrinkerSolution]| (1..=n_max).all(|n| found.iter().any(|s| s.n == n));

    let mut hi = cfg.a_max;
    while !complete(&found) && hi < cfg.a_cap {
        let next = (hi * 10.0).min(cfg.a_cap);
        let pts = ((cfg.points_per_decade as f64 * (next / hi).log10()).ceil() as usize).max(2);
        let grid = log_grid(hi, next, pts + 1);
        let mut rows = sweep_points(params, &grid[1..], sc)?;
        let boundary = vec![*table.rows.last().expect("non-empty sweep")];
        let mut seam = boundary.clone();
        seam.extend(rows.iter().copied());
        found.extend(refine_sign_brackets(params, &seam, &cfg.refine)?);
        table.rows.append(&mut rows);
        hi = next;
    }

    found.retain(|s| s.n <= n_max);
    found.sort_by(|x, y| x.n.cmp(&y.n).then(x.a.partial_cmp(&y.a).expect("finite a")));
    found.dedup_by_key(|s| s.n);
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hm(d: f64) -> ModelParams {
        ModelParams::harmonic_map(d).unwrap()
    }

    #[test]
    fn rejects_nonpositive_a() {
        assert!(shoot(&hm(3.0), 0.0, &ShootConfig::default()).is_err());
        assert!(shoot(&hm(3.0), -1.0, &ShootConfig::default()).is_err());
    }

    #[test]
    fn zero_tolerance_is_an_error() {
        let cfg = RefineConfig {
            tol_a: 0.0,
            ..RefineConfig::default()
        };
        assert!(matches!(
            refine(&hm(3.0), 0.5, 5.0, &cfg),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn identical_outcomes_give_no_brackets() {
        let t = bracket_sweep(&hm(8.0), 1.0, 1.1, 2, &ShootConfig::default()).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert!(t.brackets.is_empty());
    }

    #[test]
    fn dissolved_bracket() {
        // Both ends lie beyond the first shrinker and before the second.
        let err = refine(&hm(3.0), 5.0, 6.0, &RefineConfig::default()).unwrap_err();
        assert!(matches!(err, Error::BracketDissolved { .. }));
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1e-3, 50.0, 500);
        assert_eq!(g.len(), 500);
        assert_eq!(g[0], 1e-3);
        assert_eq!(g[499], 50.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn origin_sample_prepended() {
        let t = forward_trajectory(&hm(3.0), 1.0, &ShootConfig::default()).unwrap();
        assert_eq!(t.first().y, 0.0);
        assert!(t.samples.windows(2).all(|w| w[0].y < w[1].y));
    }

    #[test]
    fn tiny_a_undershoots() {
        // The growing mode amplifies f by about 3e13 on [0, 12], so "small"
        // means a well below 1e-13.
        let o = shoot(&hm(3.0), 1e-16, &ShootConfig::default()).unwrap();
        assert_eq!(o.crossings, 0);
        assert_eq!(o.exit, Exit::UndershootBottom);
    }

    #[test]
    fn explicit_yang_mills_shot_is_tail_matched() {
        let p = ModelParams::yang_mills(5.0).unwrap();
        let (gamma, delta) = crate::models::ym_g1_parameters(5.0);
        // At finite Y the exact profile still carries an O(Y^-2) miss.
        let cfg = ShootConfig {
            tail_point: Some(8.0),
            tail_tol: 0.1,
            ..ShootConfig::default()
        };
        let o = shoot(&p, 2.0 / gamma, &cfg).unwrap();
        assert_eq!(o.exit, Exit::TailMatched);
        assert!((o.b_estimate - 1.0 / delta).abs() < 1e-5, "{}", o.b_estimate);
    }

    #[test]
    fn first_harmonic_map_bracket_d3() {
        let t = bracket_sweep(&hm(3.0), 0.1, 10.0, 100, &ShootConfig::default()).unwrap();
        let first = t.brackets.first().expect("a bracket");
        // a_1 from an independent two-sided solve with a DOP853 integrator.
        let a1 = 2.738_753_125_884_695_5;
        assert!(first.a_lo < a1 && a1 < first.a_hi, "{first:?}");
        assert_eq!((first.crossings_lo, first.crossings_hi), (1, 2));
    }

    #[test]
    fn refine_recovers_explicit_profile() {
        let p = ModelParams::yang_mills(5.0).unwrap();
        let (gamma, delta) = crate::models::ym_g1_parameters(5.0);
        let s = refine(&p, 4.5, 4.9, &RefineConfig::default()).unwrap();
        assert_eq!(s.n, 1);
        assert!((s.a - 2.0 / gamma).abs() < 1e-6);
        assert!((s.b - 1.0 / delta).abs() < 1e-6);
        assert!(s.tail_residual < 1e-6);
    }
}
