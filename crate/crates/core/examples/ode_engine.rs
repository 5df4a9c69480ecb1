//! Adaptive Dormand-Prince on a pendulum, with a terminal event at the first
//! return through the bottom.

use shrinkers::ode::{integrate, Direction, EventSpec, IntegratorConfig, SystemState};

fn main() -> shrinkers::Result<()> {
    let pendulum = |_: f64, u: &[f64; 2]| [u[1], -u[0].sin()];
    let bottom = [EventSpec::new(|_, u: &[f64; 2]| u[0], Direction::Falling, true)];
    let cfg = IntegratorConfig::with_tolerances(1e-10, 1e-12);
    let t = integrate(pendulum, &SystemState::new(0.0, [1.0, 0.0]), 100.0, &cfg, &bottom)?;
    let hit = &t.events[0];
    println!("quarter period from amplitude 1: {:.12}", hit.y);
    println!("angular speed at the bottom:   {:.12}", hit.u[1]);
    println!("steps taken: {}", t.len() - 1);
    Ok(())
}
