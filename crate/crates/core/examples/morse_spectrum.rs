//! Negative eigenvalues of the linearisation about the equator map.

use shrinkers::diagnostics::{equator_discriminant, morse_index, MorseGrid};

fn main() -> shrinkers::Result<()> {
    let grid = MorseGrid::default();
    for k in 0..=8 {
        let d = 6.6 + 0.1 * k as f64;
        let r = morse_index(d, &grid)?;
        let disc = equator_discriminant(d);
        println!("d={d:.1} discriminant {:+.2} negative modes {} lowest {:?}", disc.value, r.negative_count, r.smallest.first());
    }
    println!("\nd=6 as the inner cutoff shrinks:");
    for (y_min, nodes) in [(1e-3, 2_000), (1e-4, 200_000)] {
        let r = morse_index(6.0, &MorseGrid { nodes, y_min, y_max: 20.0 })?;
        println!("  y_min {y_min:e}, {nodes} nodes: {} negative modes", r.negative_count);
    }
    Ok(())
}
