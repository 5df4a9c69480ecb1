//! End-to-end acceptance run: one line per criterion, nonzero exit if any
//! criterion fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use rand::{rngs::StdRng, Rng, SeedableRng};
use shrinkers::diagnostics::{
    coefficients, energy, equator_discriminant, h_equation_residual, monotonicity_certificate,
    morse_index, MorseGrid,
};
use shrinkers::models::{FlowKind, ModelParams};
use shrinkers::ode::{integrate, integrate_fixed, IntegratorConfig, Sample, SystemState, Termination, Trajectory};
use shrinkers::shooter::{bracket_sweep, find_shrinkers, forward_trajectory, Exit, FindConfig, ShootConfig};

struct Report {
    failures: Vec<usize>,
}

impl Report {
    fn record(&mut self, id: usize, title: &str, failures: Vec<String>, detail: String, started: Instant) {
        let secs = started.elapsed().as_secs_f64();
        if failures.is_empty() {
            println!("criterion {id} PASS  {title}: {detail} ({secs:.1} s)");
        } else {
            println!("criterion {id} FAIL  {title}: {detail} ({secs:.1} s)");
            for f in &failures {
                println!("    - {f}");
            }
            self.failures.push(id);
        }
    }
}

/// `g1 = y^2 / (gamma + delta y^2)` with its parameters written out directly.
fn explicit_g1(d: f64, y: f64) -> (f64, f64, f64) {
    let gamma = 0.5 * (6.0 * d - 12.0 - (d + 2.0) * (2.0 * d - 4.0).sqrt());
    let delta = (d - 2.0).sqrt() / (2.0 * 2f64.sqrt());
    (y * y / (gamma + delta * y * y), gamma, delta)
}

fn criterion_1(report: &mut Report) {
    let t0 = Instant::now();
    let mut fails = Vec::new();
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for d in [5.0, 6.0, 7.0, 8.0, 9.0] {
        let started = Instant::now();
        let p = ModelParams::yang_mills(d).unwrap();
        let sols = find_shrinkers(&p, 1, &FindConfig::default()).unwrap();
        let Some(s) = sols.iter().find(|s| s.n == 1) else {
            fails.push(format!("d={d}: no n=1 solution"));
            continue;
        };
        let (_, gamma, delta) = explicit_g1(d, 1.0);
        let sup = (0..=1200)
            .map(|i| {
                let y = i as f64 * 0.01;
                (s.trajectory.interpolate(y).unwrap()[0] - explicit_g1(d, y).0).abs()
            })
            .fold(0.0, f64::max);
        let (ea, eb) = ((s.a - 2.0 / gamma).abs(), (s.b - 1.0 / delta).abs());
        worst = (worst.0.max(sup), worst.1.max(ea), worst.2.max(eb));
        if !(sup < 1e-6 && ea < 1e-6 && eb < 1e-6) {
            fails.push(format!("d={d}: sup {sup:e}, |a-2/gamma| {ea:e}, |b-1/delta| {eb:e}"));
        }
        if started.elapsed().as_secs_f64() > 10.0 {
            fails.push(format!("d={d}: took {:?}", started.elapsed()));
        }
    }
    let detail = format!("sup error {:.1e}, a error {:.1e}, b error {:.1e} over d=5..9", worst.0, worst.1, worst.2);
    report.record(1, "explicit Yang-Mills shrinker", fails, detail, t0);
}

/// `(d, [(a_n, b_n); 3])` from an independent solve: scipy DOP853 at
/// rtol 1e-13, a tail series derived symbolically, and a two-sided Newton
/// match at a different interior point and far point than the library uses.
const FROZEN: [(f64, [(f64, f64); 3]); 4] = [
    (3.0, [
        (2.7387531258841595, 2.1439374598428724),
        (29.27644268552075, 1.3862770570569594),
        (314.18299268777616, 1.6274106098863013),
    ]),
    (4.0, [
        (2.1834781869757074, 1.8794316331812806),
        (20.4917423162926, 1.5366685629257832),
        (188.99989177623394, 1.574498167458974),
    ]),
    (5.0, [
        (2.235428527034225, 1.7291557130569994),
        (24.903792608322174, 1.5663138914338364),
        (267.79422779063157, 1.5709234960306286),
    ]),
    (6.0, [
        (2.9580879390031103, 1.6303247410803434),
        (71.14830275022202, 1.5706863110902787),
        (1646.570975109311, 1.5707965322313073),
    ]),
];

fn oracle_config() -> FindConfig {
    let mut cfg = FindConfig::default();
    cfg.refine.shoot.integrator = IntegratorConfig::with_tolerances(1e-12, 1e-14);
    cfg.refine.tol_a = 1e-10;
    cfg
}

fn criterion_2(report: &mut Report) {
    let t0 = Instant::now();
    let mut fails = Vec::new();
    let mut worst = 0.0f64;
    let mut worst_tail = 0.0f64;
    for (d, frozen) in FROZEN {
        let started = Instant::now();
        let p = ModelParams::harmonic_map(d).unwrap();
        let cfg = oracle_config();
        let sols = find_shrinkers(&p, 3, &cfg).unwrap();
        let ns: Vec<usize> = sols.iter().map(|s| s.n).collect();
        if ns != [1, 2, 3] {
            fails.push(format!("d={d}: crossing counts {ns:?}"));
            continue;
        }
        for (s, (a, b)) in sols.iter().zip(frozen) {
            let dev = (s.a - a).abs().max((s.b - b).abs());
            worst = worst.max(dev);
            worst_tail = worst_tail.max(s.tail_residual);
            if !(dev < 1e-7) {
                fails.push(format!("d={d} n={}: a={} b={} vs frozen ({a}, {b})", s.n, s.a, s.b));
            }
            if !(s.tail_residual < 1e-6) {
                fails.push(format!("d={d} n={}: tail residual {:e}", s.n, s.tail_residual));
            }
            let cap = cfg.refine.shoot.bound_cap * (d * s.a * s.a).max(1.0);
            match s.max_type1 {
                Some(t) if t.is_finite() && t <= cap => {}
                other => fails.push(format!("d={d} n={}: type-I supremum {other:?}", s.n)),
            }
        }
        if !sols.windows(2).all(|w| w[0].a < w[1].a) {
            fails.push(format!("d={d}: a_n not increasing"));
        }
        if started.elapsed().as_secs_f64() > 60.0 {
            fails.push(format!("d={d}: took {:?}", started.elapsed()));
        }
    }
    let detail = format!("max |(a,b) - frozen| {worst:.1e}, max tail residual {worst_tail:.1e}, d=3..6, n=1..3");
    report.record(2, "harmonic-map shrinker sequence", fails, detail, t0);
}

fn criterion_3(report: &mut Report) {
    let t0 = Instant::now();
    let mut fails = Vec::new();
    let mut min_hp = f64::INFINITY;
    let cases = [
        (FlowKind::HarmonicMap, 7.0),
        (FlowKind::HarmonicMap, 8.0),
        (FlowKind::HarmonicMap, 10.0),
        (FlowKind::HarmonicMap, 12.0),
        (FlowKind::YangMills, 10.0),
        (FlowKind::YangMills, 11.0),
        (FlowKind::YangMills, 13.0),
    ];
    for (kind, d) in cases {
        let started = Instant::now();
        let p = ModelParams::new(kind, d).unwrap();
        let cfg = ShootConfig::default();
        let table = bracket_sweep(&p, 1e-3, 50.0, 500, &cfg).unwrap();
        let matched = table.count(Exit::TailMatched);
        if matched != 0 {
            fails.push(format!("{kind:?} d={d}: {matched} tail-matched rows"));
        }
        for row in &table.rows {
            let r = monotonicity_certificate(&p, row.a, &cfg).unwrap();
            min_hp = min_hp.min(r.min_hp);
            if !(r.min_hp > 0.0) {
                fails.push(format!("{kind:?} d={d} a={}: min h' = {:e} at y = {}", row.a, r.min_hp, r.min_location));
            }
        }
        if started.elapsed().as_secs_f64() > 60.0 {
            fails.push(format!("{kind:?} d={d}: took {:?}", started.elapsed()));
        }
    }
    let detail = format!("7 dimensions x 500 shots, no tail match, smallest min h' {min_hp:.3e}");
    report.record(3, "nonexistence sweeps", fails, detail, t0);
}

fn criterion_4(report: &mut Report) {
    let t0 = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut fails = Vec::new();
    let mut samples = 0usize;
    let mut worst = 0.0f64;
    let mut on_floor = 0usize;
    for kind in [FlowKind::HarmonicMap, FlowKind::YangMills] {
        for _ in 0..20 {
            let d = match kind {
                FlowKind::HarmonicMap => rng.gen_range(2.05..14.0),
                FlowKind::YangMills => rng.gen_range(4.05..14.0),
            };
            let a = 10.0 * (1.0 - rng.gen::<f64>());
            let p = ModelParams::new(kind, d).unwrap();
            let t = forward_trajectory(&p, a, &ShootConfig::default()).unwrap();
            for s in t.samples.iter().filter(|s| s.y > 0.0) {
                samples += 1;
                let r = h_equation_residual(&p, s.y, &s.u);
                worst = worst.max(r.residual / (1.0 + r.h.abs()));
                if r.residual >= 1e-6 * (1.0 + r.h.abs()) {
                    on_floor += 1;
                }
                if !r.within(1e-6) {
                    fails.push(format!("{kind:?} d={d:.3} a={a:.3} y={}: residual {:e}, |h| {:e}", s.y, r.residual, r.h.abs()));
                }
            }
        }
    }
    fails.truncate(10);
    let detail = format!(
        "{samples} samples on 40 trajectories, max residual/(1+|h|) {worst:.1e}, {on_floor} within the rounding floor only"
    );
    report.record(4, "h-equation consistency", fails, detail, t0);
}

fn criterion_5(report: &mut Report) {
    let t0 = Instant::now();
    let mut rng = StdRng::seed_from_u64(5);
    let mut fails = Vec::new();
    for _ in 0..10_000 {
        let d: f64 = rng.gen_range(2.05..20.0);
        let v: f64 = rng.gen_range(-2.0 * PI..2.0 * PI);
        let y: f64 = rng.gen_range(0.0..20.0);
        let hm = ModelParams::harmonic_map(d).unwrap();
        let worst = coefficients(&hm, y, FRAC_PI_2).beta;
        if (worst - (d - 7.0)).abs() > 1e-12 || (worst >= 0.0) != (d >= 7.0) {
            fails.push(format!("HM d={d}: beta(pi/2) = {worst}"));
        }
        if coefficients(&hm, y, v).beta < worst - 1e-12 {
            fails.push(format!("HM d={d} f={v}: beta below the equator value"));
        }
        if d > 4.0 {
            let ym = ModelParams::yang_mills(d).unwrap();
            let worst = coefficients(&ym, y, 1.0).beta;
            if (worst - (d - 10.0)).abs() > 1e-12 || (worst >= 0.0) != (d >= 10.0) {
                fails.push(format!("YM d={d}: beta(1) = {worst}"));
            }
            if coefficients(&ym, y, v).beta < worst {
                fails.push(format!("YM d={d} g={v}: beta below the vacuum value"));
            }
        }
    }
    fails.truncate(10);
    report.record(5, "beta sign structure", fails, "10^4 random (d, value) pairs".into(), t0);
}

fn criterion_6(report: &mut Report) {
    let t0 = Instant::now();
    let mut fails = Vec::new();
    let grid = MorseGrid::default();
    let scan: Vec<(f64, usize)> = (0..=30)
        .map(|i| {
            let d = ((6.5 + 0.05 * i as f64) * 1e12).round() / 1e12;
            (d, morse_index(d, &grid).unwrap().negative_count)
        })
        .collect();
    for &(d, c) in &scan {
        if d > 6.85 && d < 6.95 && c != 2 {
            fails.push(format!("d={d}: count {c}, expected 2"));
        }
        if d >= 7.05 && c != 1 {
            fails.push(format!("d={d}: count {c}, expected 1"));
        }
    }
    if scan.windows(2).any(|w| w[1].1 > w[0].1) {
        fails.push("count increases somewhere in the scan".into());
    }
    let transition = scan.windows(2).find(|w| w[0].1 == 2 && w[1].1 == 1).map(|w| 0.5 * (w[0].0 + w[1].0));
    match transition {
        Some(t) if (t - 7.0).abs() <= 0.1 => {}
        other => fails.push(format!("2 -> 1 transition at {other:?}")),
    }
    let refinements = [(1e-3, 2_000), (1e-4, 200_000), (1e-5, 2_000_000)];
    let counts: Vec<usize> = refinements
        .iter()
        .map(|&(y_min, nodes)| morse_index(6.0, &MorseGrid { nodes, y_min, y_max: 20.0 }).unwrap().negative_count)
        .collect();
    if !counts.windows(2).all(|w| w[1] > w[0]) {
        fails.push(format!("d=6 counts under refinement {counts:?}"));
    }
    let detail = format!("2 -> 1 at d = {:.3}, d=6 counts {counts:?} for y_min 1e-3, 1e-4, 1e-5", transition.unwrap_or(f64::NAN));
    report.record(6, "equator Morse index", fails, detail, t0);
}

fn criterion_7(report: &mut Report) {
    let t0 = Instant::now();
    let mut fails = Vec::new();
    for d in 3..=12 {
        let r = equator_discriminant(d as f64);
        let expected = d * d - 8 * d + 8;
        if r.value != expected as f64 || r.oscillatory != (expected < 0) {
            fails.push(format!("d={d}: {r:?}"));
        }
    }
    if !(equator_discriminant(6.0).oscillatory && !equator_discriminant(7.0).oscillatory) {
        fails.push("flag does not flip between 6 and 7".into());
    }
    report.record(7, "oscillation discriminant", fails, "exact for integer d in [3, 12]".into(), t0);
}

/// `Gamma(k/2)` for positive integers `k`.
fn half_gamma(k: u32) -> f64 {
    match k {
        1 => PI.sqrt(),
        2 => 1.0,
        _ => (k as f64 / 2.0 - 1.0) * half_gamma(k - 2),
    }
}

fn criterion_8(report: &mut Report) {
    let t0 = Instant::now();
    let mut fails = Vec::new();
    let orders = |errs: &[f64]| -> Vec<f64> { errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect() };
    let exp_errs: Vec<f64> = [8, 16, 32, 64]
        .iter()
        .map(|&n| (integrate_fixed(|_, u: &[f64; 1]| [u[0]], &SystemState::new(0.0, [1.0]), 1.0, n).unwrap().u[0] - 1f64.exp()).abs())
        .collect();
    let osc_errs: Vec<f64> = [16, 32, 64, 128]
        .iter()
        .map(|&n| {
            let s = integrate_fixed(|_, u: &[f64; 2]| [u[1], -u[0]], &SystemState::new(0.0, [0.0, 1.0]), 2.0 * PI, n).unwrap();
            s.u[0].abs().max((s.u[1] - 1.0).abs())
        })
        .collect();
    let observed: Vec<f64> = orders(&exp_errs).into_iter().chain(orders(&osc_errs)).collect();
    for p in &observed {
        if !((p - 5.0).abs() < 0.3) {
            fails.push(format!("observed order {p}"));
        }
    }
    let mut last = f64::INFINITY;
    for tol in [1e-6, 1e-8, 1e-10] {
        let cfg = IntegratorConfig { max_step: 2.0, ..IntegratorConfig::with_tolerances(tol, tol) };
        let t = integrate(|_, u: &[f64; 1]| [u[0]], &SystemState::new(0.0, [1.0]), 2.0, &cfg, &[]).unwrap();
        let err = (t.last().u[0] - 2f64.exp()).abs();
        if !(err < last) {
            fails.push(format!("tolerance {tol}: error {err:e} did not decrease"));
        }
        last = err;
    }
    let mut worst = 0.0f64;
    for d in 3..=9u32 {
        let p = ModelParams::harmonic_map(d as f64).unwrap();
        let samples = (0..=120)
            .map(|i| Sample { y: i as f64 * 0.1, u: [FRAC_PI_2, 0.0], du: [0.0, 0.0] })
            .collect();
        let t = Trajectory { samples, events: vec![], reason: Termination::ReachedEnd };
        let e = energy(&t, &p).unwrap().value;
        let exact = (d as f64 - 1.0) * 2f64.powi(d as i32 - 3) * half_gamma(d - 2);
        let rel = (e - exact).abs() / exact;
        worst = worst.max(rel);
        if !(rel < 1e-7) {
            fails.push(format!("d={d}: energy {e} vs {exact}"));
        }
    }
    let detail = format!(
        "orders {}, equator energy relative error {worst:.1e}",
        observed.iter().map(|p| format!("{p:.2}")).collect::<Vec<_>>().join(" ")
    );
    report.record(8, "integrator and quadrature validation", fails, detail, t0);
}

fn criterion_9(report: &mut Report) {
    let t0 = Instant::now();
    let mut rng = StdRng::seed_from_u64(9);
    let mut fails = Vec::new();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let y: f64 = rng.gen_range(0.05..20.0);
        let p: f64 = rng.gen_range(-20.0..20.0);
        let hm = ModelParams::harmonic_map(rng.gen_range(2.05..15.0)).unwrap();
        let f: f64 = rng.gen_range(-PI..2.0 * PI);
        let (x, m) = (hm.field(y, &[f, p])[1], hm.field(y, &[PI - f, -p])[1]);
        let ym = ModelParams::yang_mills(rng.gen_range(4.05..15.0)).unwrap();
        let g: f64 = rng.gen_range(-1.0..3.0);
        let (u, v) = (ym.field(y, &[g, p])[1], ym.field(y, &[2.0 - g, -p])[1]);
        let r = ((x + m).abs() / (1.0 + x.abs())).max((u + v).abs() / (1.0 + u.abs()));
        worst = worst.max(r);
        if !(r <= 1e-12) {
            fails.push(format!("y={y} f={f} g={g}: residual {r:e}"));
        }
    }
    fails.truncate(10);

    let p = ModelParams::harmonic_map(3.0).unwrap();
    let s = &find_shrinkers(&p, 1, &FindConfig::default()).unwrap()[0];
    let reflected = Trajectory {
        samples: s
            .trajectory
            .samples
            .iter()
            .map(|x| Sample { y: x.y, u: [PI - x.u[0], -x.u[1]], du: [-x.du[0], -x.du[1]] })
            .collect(),
        events: vec![],
        reason: s.trajectory.reason,
    };
    let e = energy(&s.trajectory, &p).unwrap();
    let er = energy(&reflected, &p).unwrap();
    let gap = (e.value - er.value).abs();
    let allowed = 2.0 * (e.error + er.error) + 1e-9;
    if gap > allowed {
        fails.push(format!("energy {} vs reflected {} (allowed {allowed:e})", e.value, er.value));
    }
    let detail = format!("max symmetry residual {worst:.1e}, energy reflection gap {gap:.1e}");
    report.record(9, "symmetry suite", fails, detail, t0);
}

fn main() {
    let mut report = Report { failures: Vec::new() };
    criterion_1(&mut report);
    criterion_2(&mut report);
    criterion_3(&mut report);
    criterion_4(&mut report);
    criterion_5(&mut report);
    criterion_6(&mut report);
    criterion_7(&mut report);
    criterion_8(&mut report);
    criterion_9(&mut report);
    if report.failures.is_empty() {
        println!("acceptance: all 9 criteria pass");
    } else {
        println!("acceptance: failing criteria {:?}", report.failures);
        std::process::exit(1);
    }
}
