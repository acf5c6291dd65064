//! Conditioning on a thin terminal window by rejection.

use bridgelab::bridges::{window_conditioned_sampler, BridgeSpec};
use bridgelab::kernels::brownian_p;
use bridgelab::pathsim::{GridSpec, ProcessSpec, SeedStream};
use bridgelab::Error;

fn main() -> bridgelab::Result<()> {
    let spec = BridgeSpec::new(0.0, 1.0, 1.0)?;
    let grid = GridSpec::new(1.0, 64)?;
    for delta in [0.2, 0.1, 0.05] {
        let w = window_conditioned_sampler(&ProcessSpec::Brownian, &spec, delta, 2000, &grid, 10_000_000, SeedStream::new(5, 0))?;
        let mean = w.items.iter().map(|p| p.values[32]).sum::<f64>() / w.items.len() as f64;
        println!(
            "δ={delta}: mean X_1/2 = {mean:.4}, acceptance {:.4} (2δp = {:.4})",
            w.acceptance_rate,
            2.0 * delta * brownian_p(1.0, 0.0, 1.0)?
        );
    }
    match window_conditioned_sampler(&ProcessSpec::Brownian, &spec, 1e-4, 10, &grid, 1000, SeedStream::new(5, 0)) {
        Err(Error::BudgetExceeded { attempts, accepted, .. }) => println!("budget: {accepted} of 10 after {attempts}"),
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
