//! The stable subordinator conditioned to die at b.

use bridgelab::bridges::conditioned_subordinator;
use bridgelab::pathsim::SeedStream;
use bridgelab::stats::ks_one_sample;

fn main() -> bridgelab::Result<()> {
    let n = 5000;
    let mut zeta = Vec::with_capacity(n);
    for i in 0..n as u64 {
        let k = conditioned_subordinator(0.5, 1.0, 1e-6, SeedStream::new(21, i))?;
        assert_eq!(k.left_limit, 1.0);
        zeta.push(k.death_time);
    }
    // For α = 1/2 and b = 1 the death time has density (t/2) e^{-t²/4}.
    let ks = ks_one_sample(&zeta, |t| 1.0 - (-t * t / 4.0).exp())?;
    println!("death time: D = {:.4}, threshold {:.4}, passed {}", ks.statistic, ks.threshold, ks.passed);
    let k = conditioned_subordinator(0.7, 2.0, 1e-6, SeedStream::new(22, 0))?;
    println!(
        "α=0.7, b=2: ζ = {:.4}, {} jumps, value at ζ/2 = {:.4}",
        k.death_time,
        k.path.cadlag_jumps.as_ref().map_or(0, Vec::len),
        k.path.value_at(0.5 * k.death_time)
    );
    Ok(())
}
