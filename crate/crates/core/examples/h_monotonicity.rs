use shrinkers::diagnostics::monotonicity_certificate;
use shrinkers::models::ModelParams;
use shrinkers::shooter::ShootConfig;

fn main() -> shrinkers::Result<()> {
    let cfg = ShootConfig::default();
    for (p, a) in [
        (ModelParams::harmonic_map(8.0)?, 1.0),
        (ModelParams::harmonic_map(12.0)?, 20.0),
        (ModelParams::yang_mills(10.0)?, 1.0),
        (ModelParams::harmonic_map(4.0)?, 20.4917423162926),
    ] {
        let r = monotonicity_certificate(&p, a, &cfg)?;
        println!(
            "{} d={} a={a}: min h' = {:.3e} at y = {:.3}, exit {} at {:.2}, {:?}",
            p.kind().name(),
            p.d(),
            r.min_hp,
            r.min_location,
            r.exit,
            r.y_exit,
            r.verdict
        );
    }
    Ok(())
}
