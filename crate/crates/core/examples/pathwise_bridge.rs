//! Bridges cut out of a self-similar path at a last passage time.

use bridgelab::bridges::{brownian_bridge_exact, pathwise_selfsim_bridge, rescaled_bridge, BridgeSpec};
use bridgelab::pathsim::{GridSpec, ProcessSpec, SeedStream};
use bridgelab::stats::ks_two_sample;

fn main() -> bridgelab::Result<()> {
    let grid = GridSpec::new(1.0, 1024)?;
    let n = 3000;
    let c = 1.0;
    let mut pathwise = Vec::with_capacity(n);
    let mut exact = Vec::with_capacity(n);
    let spec = BridgeSpec::new(0.0, c, 1.0)?;
    for i in 0..n as u64 {
        pathwise.push(pathwise_selfsim_bridge(&ProcessSpec::Brownian, c, &grid, SeedStream::new(1, i))?.value_at(0.5));
        exact.push(brownian_bridge_exact(&spec, &grid, SeedStream::new(2, i))?.value_at(0.5));
    }
    let ks = ks_two_sample(&pathwise, &exact)?;
    println!("Brownian c=1, s=1/2: D = {:.4} (threshold {:.4})", ks.statistic, ks.threshold);

    // A stable bridge from 0 to 2 of length 3.
    let y = rescaled_bridge(&ProcessSpec::Stable { alpha: 1.5 }, 2.0, 3.0, &grid, SeedStream::new(4, 0))?;
    println!("stable α=1.5 bridge: Y_0 = {}, Y_1.5 = {:.4}, Y_3 = {}", y.values[0], y.value_at(1.5), y.terminal());

    // Levels with g_c = 0 are refused.
    let err = pathwise_selfsim_bridge(&ProcessSpec::Stable { alpha: 0.8 }, 0.0, &grid, SeedStream::new(5, 0));
    println!("stable α=0.8, c=0: {}", err.unwrap_err());
    Ok(())
}
