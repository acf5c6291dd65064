//! Path simulation for the four process families.

use bridgelab::pathsim::{sim_bessel, sim_brownian, sim_stable, sim_stable_subordinator, GridSpec, SeedStream};

fn main() -> bridgelab::Result<()> {
    let grid = GridSpec::new(1.0, 1024)?;
    let seed = SeedStream::new(7, 0);
    let b = sim_brownian(&grid, 0.0, seed)?;
    println!("Brownian: X_1 = {:.4}, {} points", b.terminal(), b.len());
    let r = sim_bessel(2.5, &grid, 0.0, seed.with_index(1))?;
    println!("Bessel(2.5): X_1 = {:.4}, min = {:.4}", r.terminal(), r.values.iter().cloned().fold(f64::INFINITY, f64::min));
    let s = sim_stable(1.5, &grid, 0.0, seed.with_index(2))?;
    println!("stable α=1.5: X_1 = {:.4}", s.terminal());
    let sub = sim_stable_subordinator(0.5, 1.0, 1e-6, seed.with_index(3))?;
    let jumps = sub.cadlag_jumps.as_ref().map_or(0, Vec::len);
    println!("subordinator α=0.5: X_1 = {:.4}, {jumps} jumps above the cutoff", sub.terminal());
    // Same stream, same path.
    assert_eq!(b, sim_brownian(&grid, 0.0, seed)?);
    Ok(())
}
