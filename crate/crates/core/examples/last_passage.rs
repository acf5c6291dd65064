//! Last passage times under c·√t and the Lévy arcsine law.

use bridgelab::pathsim::{last_passage_curve, sim_brownian, GridSpec, SeedStream};
use bridgelab::stats::ks_one_sample;

fn main() -> bridgelab::Result<()> {
    let grid = GridSpec::new(1.0, 2048)?;
    let n = 4000;
    let g0: Vec<f64> = (0..n)
        .map(|i| sim_brownian(&grid, 0.0, SeedStream::new(3, i)).map(|p| last_passage_curve(&p, 0.0, 2.0)))
        .collect::<bridgelab::Result<_>>()?;
    let ks = ks_one_sample(&g0, |x| std::f64::consts::FRAC_2_PI * x.clamp(0.0, 1.0).sqrt().asin())?;
    println!("g_0 vs arcsine: D = {:.4}, threshold {:.4}, passed = {}", ks.statistic, ks.threshold, ks.passed);
    let g1: Vec<f64> = (0..n)
        .map(|i| sim_brownian(&grid, 0.0, SeedStream::new(3, i)).map(|p| last_passage_curve(&p, 1.0, 2.0)))
        .collect::<bridgelab::Result<_>>()?;
    println!("mean g_0 = {:.4}, mean g_1 = {:.4}", mean(&g0), mean(&g1));
    Ok(())
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}
