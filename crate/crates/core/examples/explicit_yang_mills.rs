//! Recovers the closed-form first Yang-Mills shrinker by shooting.

use shrinkers::models::{ym_explicit_g1, ym_g1_parameters, ModelParams};
use shrinkers::shooter::{find_shrinkers, FindConfig};

fn main() -> shrinkers::Result<()> {
    println!("d  a                  2/gamma            b                  1/delta            sup|g-g1|");
    for d in 5..=9 {
        let d = d as f64;
        let p = ModelParams::yang_mills(d)?;
        let s = &find_shrinkers(&p, 1, &FindConfig::default())?[0];
        let (gamma, delta) = ym_g1_parameters(d);
        let mut sup = 0.0f64;
        for i in 0..=1200 {
            let y = 0.01 * i as f64;
            let g = s.trajectory.interpolate(y).expect("inside the profile")[0];
            sup = sup.max((g - ym_explicit_g1(d, y)?.g).abs());
        }
        println!("{d}  {:<18} {:<18} {:<18} {:<18} {sup:.2e}", s.a, 2.0 / gamma, s.b, 1.0 / delta);
    }
    Ok(())
}
