//! Gaussian-weighted energy of shrinkers compared with the equator map.

use shrinkers::diagnostics::equator_energy;
use shrinkers::models::ModelParams;
use shrinkers::shooter::{find_shrinkers, FindConfig};

fn main() -> shrinkers::Result<()> {
    for d in 3..=6 {
        let d = d as f64;
        let p = ModelParams::harmonic_map(d)?;
        let energies: Vec<String> = find_shrinkers(&p, 2, &FindConfig::default())?
            .iter()
            .map(|s| format!("E{}={:.6}", s.n, s.energy.unwrap_or(f64::NAN)))
            .collect();
        println!("d={d}: {}  equator {:.6}", energies.join(" "), equator_energy(d));
    }
    Ok(())
}
