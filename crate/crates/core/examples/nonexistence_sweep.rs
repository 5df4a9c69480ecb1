//! Sweeps the launch slope above the critical dimension and tallies how the
//! shots end. None of them meet the decaying tail.

use std::collections::BTreeMap;

use shrinkers::models::ModelParams;
use shrinkers::shooter::{bracket_sweep, ShootConfig};

fn main() -> shrinkers::Result<()> {
    for p in [ModelParams::harmonic_map(8.0)?, ModelParams::yang_mills(11.0)?] {
        let table = bracket_sweep(&p, 1e-3, 50.0, 500, &ShootConfig::default())?;
        let mut tally = BTreeMap::new();
        for row in &table.rows {
            *tally.entry(row.outcome.exit.as_str()).or_insert(0) += 1;
        }
        println!("{} d={}: {tally:?}, {} brackets", p.kind().name(), p.d(), table.brackets.len());
    }
    Ok(())
}
