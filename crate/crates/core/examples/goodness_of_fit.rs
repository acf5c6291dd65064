//! The statistical tests used by the experiments.

use bridgelab::pathsim::{symmetric_stable_variate, SeedStream};
use bridgelab::stats::{chi_square_binned, bin_counts, ks_one_sample, ks_two_sample, loglog_slope, mean_se};

fn main() -> bridgelab::Result<()> {
    let mut rng = SeedStream::new(1, 0).rng();
    // Symmetric 1-stable is Cauchy with scale 1.
    let xs: Vec<f64> = (0..20_000).map(|_| symmetric_stable_variate(1.0, &mut rng)).collect();
    let ks = ks_one_sample(&xs, |x| 0.5 + x.atan() / std::f64::consts::PI)?;
    println!("Cauchy KS: {:.4} vs {:.4}", ks.statistic, ks.threshold);
    let ys: Vec<f64> = (0..20_000).map(|_| symmetric_stable_variate(1.0, &mut rng)).collect();
    println!("two-sample KS: {:.4}", ks_two_sample(&xs, &ys)?.statistic);

    let edges = [-1e300, -1.0, 0.0, 1.0, 1e300];
    let chi = chi_square_binned(&bin_counts(&xs, &edges), &[0.25; 4])?;
    println!("χ² on quartiles: {:.3} (threshold {:.3})", chi.statistic, chi.threshold);

    let clipped: Vec<f64> = xs.iter().map(|x| x.clamp(-1.0, 1.0)).collect();
    let (m, se) = mean_se(&clipped)?;
    println!("clipped mean {m:.4} ± {se:.4}");
    let t: Vec<f64> = (1..10).map(|i| i as f64).collect();
    let y: Vec<f64> = t.iter().map(|t| 3.0 * t.powf(-0.5)).collect();
    println!("slope of 3 t^-1/2: {}", loglog_slope(&t, &y)?);
    Ok(())
}
