//! Adaptive explicit Runge–Kutta integration with dense output and event location.
//!
//! The method is the Dormand–Prince 5(4) pair with a standard elementary
//! step-size controller. Events are located by bisection, where each trial
//! point is produced by a fresh Runge–Kutta sub-step from the start of the
//! step that contains the sign change.

mod dopri;
mod trajectory;

pub use trajectory::{EventHit, Sample, Termination, Trajectory};
pub(crate) use trajectory::hermite as hermite_between;

use serde::Serialize;

use crate::error::{Error, Result};
use dopri::dp_step;

/// Any component above this magnitude ends the integration as diverged.
pub const DIVERGENCE_THRESHOLD: f64 = 1e8;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_step: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            initial_step: 1e-4,
            max_step: 0.1,
            max_steps: 500_000,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.rel_tol) || !positive(self.abs_tol) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if !positive(self.initial_step) || !positive(self.max_step) {
            return Err(Error::InvalidConfig("step sizes must be positive".into()));
        }
        if self.initial_step > self.max_step {
            return Err(Error::InvalidConfig(
                "initial_step must not exceed max_step".into(),
            ));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemState<const N: usize> {
    pub y: f64,
    pub u: [f64; N],
}

impl<const N: usize> SystemState<N> {
    pub fn new(y: f64, u: [f64; N]) -> Self {
        Self { y, u }
    }

    pub fn is_finite(&self) -> bool {
        self.y.is_finite() && self.u.iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Rising,
    Falling,
    Any,
}

impl Direction {
    fn triggers(self, before: f64, after: f64) -> bool {
        let rising = before < 0.0 && after >= 0.0;
        let falling = before > 0.0 && after <= 0.0;
        match self {
            Direction::Rising => rising,
            Direction::Falling => falling,
            Direction::Any => rising || falling,
        }
    }
}

pub type EventFn<'a, const N: usize> = Box<dyn Fn(f64, &[f64; N]) -> f64 + Send + Sync + 'a>;

pub struct EventSpec<'a, const N: usize> {
    pub func: EventFn<'a, N>,
    pub direction: Direction,
    pub terminal: bool,
}

impl<'a, const N: usize> EventSpec<'a, N> {
    pub fn new(
        func: impl Fn(f64, &[f64; N]) -> f64 + Send + Sync + 'a,
        direction: Direction,
        terminal: bool,
    ) -> Self {
        Self {
            func: Box::new(func),
            direction,
            terminal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResult<const N: usize> {
    pub state: SystemState<N>,
    pub error: [f64; N],
}

fn all_finite<const N: usize>(v: &[f64; N]) -> bool {
    v.iter().all(|x| x.is_finite())
}

fn exceeds_threshold<const N: usize>(v: &[f64; N]) -> bool {
    v.iter().any(|x| x.abs() > DIVERGENCE_THRESHOLD)
}

/// A single embedded-pair step. The error estimate is the difference between
/// the fifth- and fourth-order solutions.
pub fn step<F, const N: usize>(rhs: F, state: &SystemState<N>, h: f64) -> Result<StepResult<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("step size {h} must be positive")));
    }
    let k1 = rhs(state.y, &state.u);
    if !all_finite(&k1) {
        return Err(Error::Diverged { y: state.y });
    }
    let stage = dp_step(&rhs, state.y, &state.u, &k1, h);
    if !all_finite(&stage.u) || !all_finite(&stage.err) {
        return Err(Error::Diverged { y: state.y + h });
    }
    Ok(StepResult {
        state: SystemState {
            y: state.y + h,
            u: stage.u,
        },
        error: stage.err,
    })
}

/// Integrates with `n` equal steps; used for convergence-order studies.
pub fn integrate_fixed<F, const N: usize>(
    rhs: F,
    state0: &SystemState<N>,
    y_end: f64,
    n: usize,
) -> Result<SystemState<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    if !(state0.y < y_end) {
        return Err(Error::EmptySpan {
            start: state0.y,
            end: y_end,
        });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one step".into()));
    }
    let h = (y_end - state0.y) / n as f64;
    let mut state = *state0;
    for i in 0..n {
        let next = step(&rhs, &state, h)?;
        state = next.state;
        if i + 1 == n {
            state.y = y_end;
        }
    }
    Ok(state)
}

/// Adaptive integration from `state0` to `y_end`.
///
/// Each accepted step satisfies `|err_i| <= abs_tol + rel_tol * |u_i|`.
/// Non-terminal events are recorded and integration continues; the first
/// terminal event ends the trajectory at the refined event location.
pub fn integrate<F, const N: usize>(
    rhs: F,
    state0: &SystemState<N>,
    y_end: f64,
    cfg: &IntegratorConfig,
    events: &[EventSpec<'_, N>],
) -> Result<Trajectory<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    cfg.validate()?;
    if !(state0.y < y_end) {
        return Err(Error::EmptySpan {
            start: state0.y,
            end: y_end,
        });
    }
    if !state0.is_finite() {
        return Err(Error::Diverged { y: state0.y });
    }

    let mut y = state0.y;
    let mut u = state0.u;
    let mut k1 = rhs(y, &u);
    let mut samples = vec![Sample { y, u, du: k1 }];
    let mut hits = Vec::new();
    if !all_finite(&k1) {
        return Ok(Trajectory {
            samples,
            events: hits,
            reason: Termination::Diverged,
        });
    }

    let mut g_prev: Vec<f64> = events.iter().map(|e| (e.func)(y, &u)).collect();
    let mut h = cfg.initial_step.min(cfg.max_step).min(y_end - y);
    let mut attempts = 0usize;

    loop {
        if attempts >= cfg.max_steps {
            return Ok(Trajectory {
                samples,
                events: hits,
                reason: Termination::StepLimit,
            });
        }
        attempts += 1;

        let remaining = y_end - y;
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        let min_step = 16.0 * f64::EPSILON * y.abs().max(1.0);
        if h < min_step {
            return Ok(Trajectory {
                samples,
                events: hits,
                reason: Termination::StepLimit,
            });
        }

        let stage = dp_step(&rhs, y, &u, &k1, h);
        let finite = all_finite(&stage.u) && all_finite(&stage.k7) && all_finite(&stage.err);
        let err_norm = if finite {
            (0..N)
                .map(|i| {
                    let scale = cfg.abs_tol + cfg.rel_tol * u[i].abs().max(stage.u[i].abs());
                    stage.err[i].abs() / scale
                })
                .fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };

        if err_norm > 1.0 {
            let factor = if err_norm.is_finite() {
                (SAFETY * err_norm.powf(-0.2)).max(MIN_FACTOR)
            } else {
                MIN_FACTOR
            };
            h *= factor;
            continue;
        }

        let y_new = if last { y_end } else { y + h };
        let u_new = stage.u;

        // Event detection over [y, y_new].
        let g_new: Vec<f64> = events.iter().map(|e| (e.func)(y_new, &u_new)).collect();
        let mut found: Vec<(f64, usize, [f64; N])> = Vec::new();
        for (id, ev) in events.iter().enumerate() {
            if ev.direction.triggers(g_prev[id], g_new[id]) {
                let (ye, ue) = locate(&rhs, ev, y, &u, &k1, y_new - y, g_prev[id], cfg.rel_tol);
                found.push((ye, id, ue));
            }
        }
        found.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite event location"));
        let terminal = found.iter().position(|(_, id, _)| events[*id].terminal);
        if let Some(t) = terminal {
            for (ye, id, ue) in found.iter().take(t + 1) {
                hits.push(EventHit {
                    y: *ye,
                    event: *id,
                    u: *ue,
                });
            }
            let (ye, id, ue) = found[t];
            if ye > y {
                samples.push(Sample {
                    y: ye,
                    u: ue,
                    du: rhs(ye, &ue),
                });
            }
            return Ok(Trajectory {
                samples,
                events: hits,
                reason: Termination::Event(id),
            });
        }
        for (ye, id, ue) in found {
            hits.push(EventHit { y: ye, event: id, u: ue });
        }

        y = y_new;
        u = u_new;
        k1 = stage.k7;
        g_prev = g_new;
        samples.push(Sample { y, u, du: k1 });

        if exceeds_threshold(&u) {
            return Ok(Trajectory {
                samples,
                events: hits,
                reason: Termination::Diverged,
            });
        }
        if last {
            return Ok(Trajectory {
                samples,
                events: hits,
                reason: Termination::ReachedEnd,
            });
        }

        let factor = if err_norm == 0.0 {
            MAX_FACTOR
        } else {
            (SAFETY * err_norm.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
        };
        h = (h * factor).min(cfg.max_step);
    }
}

/// Bisection on the event function over one step, re-stepping from the start
/// of the step for each trial point.
#[allow(clippy::too_many_arguments)]
fn locate<F, const N: usize>(
    rhs: &F,
    ev: &EventSpec<'_, N>,
    y: f64,
    u: &[f64; N],
    k1: &[f64; N],
    h: f64,
    g_start: f64,
    rel_tol: f64,
) -> (f64, [f64; N])
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let (mut lo, mut hi) = (0.0_f64, h);
    let mut g_lo = g_start;
    let mut u_hi = dp_step(rhs, y, u, k1, h).u;
    let tol = (rel_tol * (y + h).abs()).max(4.0 * f64::EPSILON * (y + h).abs().max(1.0));
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let u_mid = dp_step(rhs, y, u, k1, mid).u;
        let g_mid = (ev.func)(y + mid, &u_mid);
        if same_side(g_lo, g_mid) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
            u_hi = u_mid;
        }
    }
    (y + hi, u_hi)
}

fn same_side(a: f64, b: f64) -> bool {
    (a < 0.0 && b < 0.0) || (a > 0.0 && b > 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tight() -> IntegratorConfig {
        IntegratorConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            initial_step: 1e-3,
            max_step: 0.5,
            max_steps: 100_000,
        }
    }

    #[test]
    fn constant_solution_is_exact() {
        let s = SystemState::new(0.0, [1.0]);
        let r = step(|_, _: &[f64; 1]| [0.0], &s, 0.5).unwrap();
        assert_eq!(r.state.u, [1.0]);
        assert_eq!(r.error, [0.0]);
        assert_eq!(r.state.y, 0.5);
    }

    #[test]
    fn single_step_exponential() {
        let s = SystemState::new(0.0, [1.0]);
        let r = step(|_, u: &[f64; 1]| [u[0]], &s, 0.1).unwrap();
        assert!((r.state.u[0] - 0.1f64.exp()).abs() < 1e-6);
        assert!(r.error[0].abs() < 1e-6);
    }

    #[test]
    fn overflow_is_diverged() {
        let s = SystemState::new(0.0, [1e200]);
        let r = step(|_, u: &[f64; 1]| [-u[0] * u[0] * u[0]], &s, 0.1);
        assert!(matches!(r, Err(Error::Diverged { .. })));
    }

    #[test]
    fn oscillator_full_period() {
        let cfg = IntegratorConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            ..tight()
        };
        let s = SystemState::new(0.0, [0.0, 1.0]);
        let two_pi = 2.0 * std::f64::consts::PI;
        let t = integrate(|_, u: &[f64; 2]| [u[1], -u[0]], &s, two_pi, &cfg, &[]).unwrap();
        assert_eq!(t.reason, Termination::ReachedEnd);
        let end = t.last();
        assert_eq!(end.y, two_pi);
        assert!(end.u[0].abs() < 1e-8, "{:?}", end.u);
        assert!((end.u[1] - 1.0).abs() < 1e-8, "{:?}", end.u);
    }

    #[test]
    fn terminal_event_at_ln2() {
        let s = SystemState::new(0.0, [0.5]);
        let ev = EventSpec::new(|_, u: &[f64; 1]| u[0] - 1.0, Direction::Any, true);
        let t = integrate(|_, u: &[f64; 1]| [u[0]], &s, 5.0, &tight(), &[ev]).unwrap();
        assert_eq!(t.reason, Termination::Event(0));
        assert!((t.last().y - std::f64::consts::LN_2).abs() < 1e-8);
        assert_eq!(t.events.len(), 1);
        assert!((t.events[0].u[0] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn empty_span_rejected() {
        let s = SystemState::new(1.0, [0.5]);
        let r = integrate(|_, u: &[f64; 1]| [u[0]], &s, 1.0, &tight(), &[]);
        assert!(matches!(r, Err(Error::EmptySpan { .. })));
    }

    #[test]
    fn invalid_config_rejected() {
        let s = SystemState::new(0.0, [0.5]);
        let mut cfg = tight();
        cfg.initial_step = 10.0;
        cfg.max_step = 1.0;
        assert!(integrate(|_, u: &[f64; 1]| [u[0]], &s, 1.0, &cfg, &[]).is_err());
        cfg = tight();
        cfg.rel_tol = 0.0;
        assert!(integrate(|_, u: &[f64; 1]| [u[0]], &s, 1.0, &cfg, &[]).is_err());
        cfg = tight();
        cfg.max_steps = 0;
        assert!(integrate(|_, u: &[f64; 1]| [u[0]], &s, 1.0, &cfg, &[]).is_err());
    }

    #[test]
    fn divergence_threshold_stops_integration() {
        let s = SystemState::new(0.0, [1.0]);
        let t = integrate(|_, u: &[f64; 1]| [u[0] * u[0]], &s, 2.0, &tight(), &[]).unwrap();
        assert_eq!(t.reason, Termination::Diverged);
        assert!(t.last().y < 1.0);
    }

    #[test]
    fn step_limit_reported() {
        let s = SystemState::new(0.0, [1.0]);
        let mut cfg = tight();
        cfg.max_steps = 3;
        cfg.max_step = 0.01;
        cfg.initial_step = 0.01;
        let t = integrate(|_, u: &[f64; 1]| [u[0]], &s, 1.0, &cfg, &[]).unwrap();
        assert_eq!(t.reason, Termination::StepLimit);
        assert_eq!(t.len(), 4);
    }

    #[test]
    fn non_terminal_events_are_recorded() {
        let s = SystemState::new(0.0, [0.0, 1.0]);
        let ev = EventSpec::new(|_, u: &[f64; 2]| u[0], Direction::Any, false);
        let t = integrate(|_, u: &[f64; 2]| [u[1], -u[0]], &s, 10.0, &tight(), &[ev]).unwrap();
        assert_eq!(t.reason, Termination::ReachedEnd);
        // zeros of sin at pi, 2pi, 3pi
        assert_eq!(t.events.len(), 3);
        for (k, hit) in t.events.iter().enumerate() {
            let want = (k + 1) as f64 * std::f64::consts::PI;
            assert!((hit.y - want).abs() < 1e-8, "{} vs {}", hit.y, want);
        }
        for w in t.samples.windows(2) {
            assert!(w[1].y > w[0].y);
        }
        for hit in &t.events {
            assert!(t.samples.iter().any(|s| s.y <= hit.y));
            assert!(t.samples.iter().any(|s| s.y >= hit.y));
        }
    }

    #[test]
    fn rising_direction_filters_events() {
        let s = SystemState::new(0.0, [0.0, 1.0]);
        let ev = EventSpec::new(|_, u: &[f64; 2]| u[0], Direction::Rising, false);
        let t = integrate(|_, u: &[f64; 2]| [u[1], -u[0]], &s, 10.0, &tight(), &[ev]).unwrap();
        assert_eq!(t.events.len(), 1);
        assert!((t.events[0].y - 2.0 * std::f64::consts::PI).abs() < 1e-8);
    }

    #[test]
    fn hermite_dense_output_is_accurate() {
        let s = SystemState::new(0.0, [1.0]);
        let t = integrate(|_, u: &[f64; 1]| [u[0]], &s, 1.0, &tight(), &[]).unwrap();
        for st in t.resample(101) {
            assert!((st.u[0] - st.y.exp()).abs() < 1e-7);
        }
        assert!(t.interpolate(1.5).is_none());
    }
}
