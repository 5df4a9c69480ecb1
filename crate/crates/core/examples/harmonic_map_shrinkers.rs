//! The first three harmonic-map shrinkers in dimensions 3 through 6.

use shrinkers::models::ModelParams;
use shrinkers::shooter::{find_shrinkers, FindConfig};

fn main() -> shrinkers::Result<()> {
    for d in 3..=6 {
        let p = ModelParams::harmonic_map(d as f64)?;
        for s in find_shrinkers(&p, 3, &FindConfig::default())? {
            println!(
                "d={d} n={} a={:<20} b={:<20} energy={:<20} tail residual {:.1e}",
                s.n,
                s.a,
                s.b,
                s.energy.unwrap_or(f64::NAN),
                s.tail_residual
            );
        }
    }
    Ok(())
}
