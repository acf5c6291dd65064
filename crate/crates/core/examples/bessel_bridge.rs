//! Bessel bridges by time inversion.

use bridgelab::bridges::bessel_bridge_timeinversion;
use bridgelab::pathsim::{GridSpec, SeedStream};

fn main() -> bridgelab::Result<()> {
    let grid = GridSpec::new(1.0, 64)?;
    for delta in [3.0, 1.5] {
        let mids: Vec<f64> = (0..5000)
            .map(|i| bessel_bridge_timeinversion(delta, 1.0, 1.0, &grid, SeedStream::new(8, i)).map(|p| p.value_at(0.5)))
            .collect::<bridgelab::Result<_>>()?;
        let mean = mids.iter().sum::<f64>() / mids.len() as f64;
        println!("δ={delta}: mean of the bridge from 0 to 1 at u=1/2: {mean:.4}");
    }
    let p = bessel_bridge_timeinversion(3.0, 1.0, 1.0, &grid, SeedStream::new(8, 0))?;
    println!("first values: {:?}", &p.values[..4]);
    Ok(())
}
