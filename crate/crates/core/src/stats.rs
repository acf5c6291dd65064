//! Goodness-of-fit tests, moment checks and regression helpers.
//!
//! KS thresholds are the asymptotic 0.001-level values (`1.95/√n`), χ²
//! thresholds the 0.999 quantile of the reference distribution.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::parallel::map_indexed;
use crate::pathsim::{brownian_with, last_passage_curve_refined, GridSpec, SeedStream};
use crate::specfun::quadrature::{integrate, QuadratureConfig};
use crate::specfun::{ln_gamma, ln_hermite_h};

pub const KS_COEFFICIENT: f64 = 1.95;
pub const CHI_SQUARE_LEVEL: f64 = 0.999;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub test_name: String,
    pub statistic: f64,
    pub sample_sizes: Vec<usize>,
    pub threshold: f64,
    pub passed: bool,
    pub reference: String,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub details: Map<String, Value>,
}

impl StatReport {
    /// Passes when `statistic ≤ threshold`; NaN never passes.
    pub fn new(test_name: impl Into<String>, statistic: f64, sample_sizes: Vec<usize>, threshold: f64, reference: impl Into<String>) -> Self {
        StatReport {
            test_name: test_name.into(),
            statistic,
            sample_sizes,
            threshold,
            passed: statistic <= threshold,
            reference: reference.into(),
            details: Map::new(),
        }
    }

    pub fn named(mut self, test_name: impl Into<String>, reference: impl Into<String>) -> Self {
        self.test_name = test_name.into();
        self.reference = reference.into();
        self
    }

    pub fn detail(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.details.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    /// The random variable whose `q`-th moment is compared.
    pub subject: String,
    pub c: f64,
    pub q: f64,
    pub empirical: f64,
    pub std_error: f64,
    pub predicted: f64,
    pub allowance: f64,
    pub passed: bool,
}

impl MomentReport {
    /// Passes when `|empirical - predicted| ≤ 3·std_error + allowance`.
    pub fn new(c: f64, q: f64, empirical: f64, std_error: f64, predicted: f64, allowance: f64) -> Self {
        let passed = (empirical - predicted).abs() <= 3.0 * std_error + allowance;
        MomentReport {
            subject: "g_c".to_string(),
            c,
            q,
            empirical,
            std_error,
            predicted,
            allowance,
            passed,
        }
    }
}

/// Sample mean and its standard error.
pub fn mean_se(xs: &[f64]) -> Result<(f64, f64)> {
    if xs.len() < 2 {
        return Err(Error::Sample(format!("need at least 2 values, got {}", xs.len())));
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

fn sorted(sample: &[f64]) -> Result<Vec<f64>> {
    if sample.is_empty() {
        return Err(Error::Sample("empty sample".into()));
    }
    if sample.iter().any(|x| x.is_nan()) {
        return Err(Error::Sample("sample contains NaN".into()));
    }
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

pub fn ks_one_sample(sample: &[f64], cdf: impl Fn(f64) -> f64) -> Result<StatReport> {
    let s = sorted(sample)?;
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < s.len() {
        // Ties move the ECDF in one step.
        let mut j = i;
        while j + 1 < s.len() && s[j + 1] == s[i] {
            j += 1;
        }
        let f = cdf(s[i]);
        d = d.max((f - i as f64 / n).abs()).max(((j + 1) as f64 / n - f).abs());
        i = j + 1;
    }
    Ok(StatReport::new(
        "ks-one-sample",
        d,
        vec![s.len()],
        KS_COEFFICIENT / n.sqrt(),
        "asymptotic Kolmogorov distribution",
    ))
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<StatReport> {
    let (a, b) = (sorted(a)?, sorted(b)?);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(StatReport::new(
        "ks-two-sample",
        d,
        vec![a.len(), b.len()],
        KS_COEFFICIENT * (1.0 / na + 1.0 / nb).sqrt(),
        "asymptotic Kolmogorov distribution",
    ))
}

/// Pearson χ² of bin counts against bin probabilities (which are
/// renormalized to sum to one).
pub fn chi_square_binned(observed: &[u64], probs: &[f64]) -> Result<StatReport> {
    if observed.len() != probs.len() || observed.len() < 2 {
        return Err(Error::Sample("need matching bin counts and probabilities (≥ 2 bins)".into()));
    }
    let total_p: f64 = probs.iter().sum();
    let n: u64 = observed.iter().sum();
    if n == 0 || !(total_p > 0.0) {
        return Err(Error::Sample("no observations or zero total probability".into()));
    }
    let mut stat = 0.0;
    for (&o, &p) in observed.iter().zip(probs) {
        let e = n as f64 * p / total_p;
        if !(e > 0.0) {
            return Err(Error::Sample("bin with zero expected count".into()));
        }
        stat += (o as f64 - e).powi(2) / e;
    }
    let dof = (observed.len() - 1) as f64;
    let threshold = ChiSquared::new(dof)
        .map_err(|e| Error::Sample(e.to_string()))?
        .inverse_cdf(CHI_SQUARE_LEVEL);
    Ok(StatReport::new("chi-square", stat, vec![n as usize], threshold, "Pearson chi-square, 0.999 quantile")
        .detail("bins", observed.len()))
}

/// Counts of `sample` in the bins delimited by `edges` (values outside are
/// folded into the end bins).
pub fn bin_counts(sample: &[f64], edges: &[f64]) -> Vec<u64> {
    let bins = edges.len() - 1;
    let mut counts = vec![0u64; bins];
    for &x in sample {
        let k = edges.partition_point(|&e| e <= x);
        counts[k.clamp(1, bins) - 1] += 1;
    }
    counts
}

/// χ² test that points in the unit square are independent uniforms, on a
/// `bins × bins` grid.
pub fn uniform_square_chi_square(points: &[(f64, f64)], bins: usize) -> Result<StatReport> {
    let mut counts = vec![0u64; bins * bins];
    for &(u, v) in points {
        let i = ((u * bins as f64) as usize).min(bins - 1);
        let j = ((v * bins as f64) as usize).min(bins - 1);
        counts[i * bins + j] += 1;
    }
    chi_square_binned(&counts, &vec![1.0; bins * bins])
}

/// Least-squares slope of `ln ys` on `ln xs`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(Error::Fit(format!("need equal lengths ≥ 3, got {} and {}", xs.len(), ys.len())));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::Fit("all inputs must be positive and finite".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all x values are equal".into()));
    }
    Ok(sxy / sxx)
}

/// CDF obtained by integrating a density panel by panel on `[lo, hi]` and
/// normalizing; linear between nodes.
#[derive(Debug, Clone)]
pub struct TabulatedCdf {
    nodes: Vec<f64>,
    cdf: Vec<f64>,
    /// Integral of the density over `[lo, hi]` before normalization.
    pub mass: f64,
}

impl TabulatedCdf {
    pub fn from_density(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> Result<Self> {
        let h = (hi - lo) / panels as f64;
        let nodes: Vec<f64> = (0..=panels).map(|k| if k == panels { hi } else { lo + k as f64 * h }).collect();
        Self::from_nodes(f, nodes)
    }

    /// Nodes at `lo + (hi - lo)(k/panels)²`, for densities with an
    /// integrable singularity or a power-law onset at `lo`.
    pub fn from_density_clustered(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> Result<Self> {
        let n = panels as f64;
        let nodes: Vec<f64> = (0..=panels)
            .map(|k| if k == panels { hi } else { lo + (hi - lo) * (k as f64 / n).powi(2) })
            .collect();
        Self::from_nodes(f, nodes)
    }

    fn from_nodes(f: impl Fn(f64) -> f64, nodes: Vec<f64>) -> Result<Self> {
        let cfg = QuadratureConfig {
            max_subdivisions: 200,
            abs_tol: 1e-14,
            rel_tol: 1e-10,
        };
        let mut cdf = Vec::with_capacity(nodes.len());
        cdf.push(0.0);
        let mut acc = 0.0;
        for w in nodes.windows(2) {
            acc += integrate(&f, w[0], w[1], &cfg)
                .map_err(|e| e.into_error("TabulatedCdf"))?
                .value;
            cdf.push(acc);
        }
        if !(acc > 0.0) {
            return Err(Error::Sample("density has no mass on the interval".into()));
        }
        cdf.iter_mut().for_each(|v| *v /= acc);
        Ok(TabulatedCdf { nodes, cdf, mass: acc })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.nodes.len();
        if x <= self.nodes[0] {
            return 0.0;
        }
        if x >= self.nodes[n - 1] {
            return 1.0;
        }
        let k = self.nodes.partition_point(|&s| s <= x) - 1;
        let w = (x - self.nodes[k]) / (self.nodes[k + 1] - self.nodes[k]);
        self.cdf[k] + w * (self.cdf[k + 1] - self.cdf[k])
    }
}

/// `E g_c^q = Γ(2q) / (2q H_{2q}(c) H_{2q}(-c))` for Brownian motion.
///
/// `-log g_c` is the hitting time of `c` by the stationary Ornstein-Uhlenbeck
/// process, so this is its Laplace transform at `q`. It equals `E(1 - g_c)^q`
/// only at `c = 0`, where `g_0` is arcsine distributed.
pub fn gc_moment_predicted(c: f64, q: f64) -> Result<f64> {
    Ok(ln_gc_moment_predicted(c, q)?.exp())
}

fn ln_gc_moment_predicted(c: f64, q: f64) -> Result<f64> {
    // even in c; evaluating at |c| makes that hold bit for bit
    let (two_q, a) = (2.0 * q, c.abs());
    Ok(ln_gamma(two_q)? - two_q.ln() - ln_hermite_h(two_q, a)? - ln_hermite_h(two_q, -a)?)
}

/// Large-q equivalent `e^{-c²/2} / √(πq)`.
pub fn gc_moment_asymptotic(c: f64, q: f64) -> f64 {
    (-0.5 * c * c).exp() / (std::f64::consts::PI * q).sqrt()
}

/// Ratio of the exact moment to its large-q equivalent at the largest `q`;
/// the band is ±5% at c = 0 and ±10% otherwise.
pub fn moment_asymptotics_check(c: f64, q_grid: &[f64]) -> Result<StatReport> {
    let q = q_grid.iter().copied().fold(f64::NAN, f64::max);
    if !(q >= 100.0) {
        return Err(Error::Sample(format!("largest q must be ≥ 100, got {q}")));
    }
    let ratio = (ln_gc_moment_predicted(c, q)? - gc_moment_asymptotic(c, q).ln()).exp();
    let band = if c == 0.0 { 0.05 } else { 0.1 };
    let ratios: Vec<Value> = q_grid
        .iter()
        .map(|&qq| {
            let r = (ln_gc_moment_predicted(c, qq).unwrap_or(f64::NAN) - gc_moment_asymptotic(c, qq).ln()).exp();
            serde_json::json!([qq, r])
        })
        .collect();
    Ok(StatReport::new(
        format!("moment-asymptotics c={c}"),
        (ratio - 1.0).abs(),
        vec![],
        band,
        "exact Hermite moment vs e^{-c^2/2}/sqrt(pi q)",
    )
    .detail("q", q)
    .detail("ratio", ratio)
    .detail("ratios", ratios))
}

/// Last passage times `g_c` of Brownian paths under the curves `c √t`, on the
/// full grid and on every second grid point of the same paths.
#[derive(Debug, Clone, PartialEq)]
pub struct GcSamples {
    pub c: Vec<f64>,
    /// `fine[j][i]`: path `i`, level `c[j]`.
    pub fine: Vec<Vec<f64>>,
    pub coarse: Vec<Vec<f64>>,
}

pub fn gc_samples(cs: &[f64], n: usize, grid: &GridSpec, seed: SeedStream, threads: usize) -> Result<GcSamples> {
    grid.validate()?;
    let rows = map_indexed(n, threads, |i| {
        let mut rng = seed.with_index(i as u64).rng();
        let path = brownian_with(grid, 0.0, &mut rng);
        let coarse_path = path.every_other();
        let fine: Vec<f64> = cs.iter().map(|&c| last_passage_curve_refined(&path, c, 2.0, &mut rng)).collect();
        let coarse: Vec<f64> = cs
            .iter()
            .map(|&c| last_passage_curve_refined(&coarse_path, c, 2.0, &mut rng))
            .collect();
        (fine, coarse)
    })?;
    let mut out = GcSamples {
        c: cs.to_vec(),
        fine: vec![Vec::with_capacity(n); cs.len()],
        coarse: vec![Vec::with_capacity(n); cs.len()],
    };
    for (fine, coarse) in rows {
        for j in 0..cs.len() {
            out.fine[j].push(fine[j]);
            out.coarse[j].push(coarse[j]);
        }
    }
    Ok(out)
}

/// Moment report from fine and coarse samples of `g_c`; the discretization
/// allowance is the change of the empirical moment between the two grids.
pub fn moment_report_from_samples(c: f64, q: f64, fine: &[f64], coarse: &[f64]) -> Result<MomentReport> {
    let f: Vec<f64> = fine.iter().map(|g| g.powf(q)).collect();
    let cm: Vec<f64> = coarse.iter().map(|g| g.powf(q)).collect();
    let (mean, se) = mean_se(&f)?;
    let (coarse_mean, _) = mean_se(&cm)?;
    Ok(MomentReport::new(c, q, mean, se, gc_moment_predicted(c, q)?, (mean - coarse_mean).abs()))
}

/// z-score of the paired difference `g^q - (1 - g)^q`, which has mean zero
/// when the law of `g` is symmetric about 1/2.
pub fn reflection_check(c: f64, q: f64, g: &[f64]) -> Result<StatReport> {
    let d: Vec<f64> = g.iter().map(|g| g.powf(q) - (1.0 - g).powf(q)).collect();
    let (mean, se) = mean_se(&d)?;
    let reflected: Vec<f64> = g.iter().map(|g| (1.0 - g).powf(q)).collect();
    Ok(StatReport::new(
        format!("reflection c={c} q={q}"),
        mean.abs() / se,
        vec![g.len()],
        3.0,
        "E g^q = E (1-g)^q",
    )
    .detail("mean_difference", mean)
    .detail("one_minus_g_moment", mean_se(&reflected)?.0))
}

pub fn gc_moment_check(c: f64, q: f64, n: usize, grid: &GridSpec, seed: SeedStream) -> Result<MomentReport> {
    let s = gc_samples(&[c], n, grid, seed, 1)?;
    moment_report_from_samples(c, q, &s.fine[0], &s.coarse[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn rng(i: u64) -> rand_chacha::ChaCha8Rng {
        SeedStream::new(2024, i).rng()
    }

    fn normal_cdf(x: f64) -> f64 {
        0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
    }

    #[test]
    fn ks_trivial_cases() {
        let r = ks_one_sample(&[0.0], normal_cdf).unwrap();
        assert!((r.statistic - 0.5).abs() < 1e-15);
        let r = ks_one_sample(&vec![0.3; 1000], |x| x).unwrap();
        assert!(r.statistic >= 0.5 && !r.passed);
        let a: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(ks_two_sample(&a, &a).unwrap().statistic, 0.0);
        assert!(ks_one_sample(&[], normal_cdf).is_err());
        assert!(ks_two_sample(&[], &[1.0]).is_err());
    }

    #[test]
    fn ks_two_sample_power() {
        let mut r = rng(1);
        let a: Vec<f64> = (0..100_000).map(|_| StandardNormal.sample(&mut r)).collect();
        let b: Vec<f64> = (0..100_000).map(|_| 0.1 + Distribution::<f64>::sample(&StandardNormal, &mut r)).collect();
        assert!(!ks_two_sample(&a, &b).unwrap().passed);
    }

    #[test]
    fn calibration_false_positive_rates() {
        let reps = 200;
        let (mut one, mut two, mut chi) = (0, 0, 0);
        for rep in 0..reps {
            let mut r = rng(100 + rep);
            let u: Vec<f64> = (0..2000).map(|_| r.random::<f64>()).collect();
            let v: Vec<f64> = (0..1500).map(|_| r.random::<f64>()).collect();
            if !ks_one_sample(&u, |x| x.clamp(0.0, 1.0)).unwrap().passed {
                one += 1;
            }
            if !ks_two_sample(&u, &v).unwrap().passed {
                two += 1;
            }
            let edges: Vec<f64> = (0..=20).map(|k| k as f64 / 20.0).collect();
            if !chi_square_binned(&bin_counts(&u, &edges), &[1.0; 20]).unwrap().passed {
                chi += 1;
            }
        }
        for (name, fails) in [("one", one), ("two", two), ("chi", chi)] {
            assert!(fails as f64 / reps as f64 <= 0.01, "{name}: {fails} failures");
        }
    }

    #[test]
    fn chi_square_detects_wrong_probabilities() {
        let mut r = rng(7);
        let u: Vec<f64> = (0..20_000).map(|_| r.random::<f64>().powf(1.2)).collect();
        let edges: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
        assert!(!chi_square_binned(&bin_counts(&u, &edges), &[1.0; 10]).unwrap().passed);
        assert!(chi_square_binned(&[1, 2], &[1.0]).is_err());
    }

    #[test]
    fn slopes() {
        let xs: Vec<f64> = (1..10).map(|i| i as f64 * 0.3).collect();
        let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
        assert!((loglog_slope(&xs, &sq).unwrap() - 2.0).abs() < 1e-12);
        let inv: Vec<f64> = xs.iter().map(|x| 1.0 / x).collect();
        assert!((loglog_slope(&xs, &inv).unwrap() + 1.0).abs() < 1e-12);
        let mut r = rng(3);
        let noisy: Vec<f64> = xs
            .iter()
            .map(|x| 3.0 * x.powf(-0.5) * (1.0 + 1e-6 * (2.0 * r.random::<f64>() - 1.0)))
            .collect();
        assert!((loglog_slope(&xs, &noisy).unwrap() + 0.5).abs() < 1e-4);
        assert!(loglog_slope(&[1.0, 2.0, -1.0], &[1.0, 1.0, 1.0]).is_err());
        assert!(loglog_slope(&[1.0, 2.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn predicted_moments() {
        assert!((gc_moment_predicted(0.0, 1.0).unwrap() - 0.5).abs() < 1e-12);
        assert!((gc_moment_predicted(0.0, 2.0).unwrap() - 0.375).abs() < 1e-12);
        // 1/(2 H_2(1) H_2(-1)), with both H values from mpmath.
        assert!((gc_moment_predicted(1.0, 1.0).unwrap() - 0.324_350_862_518_218_47).abs() < 1e-11);
        assert!((gc_moment_predicted(1.0, 2.0).unwrap() - 0.235_140_699_771_452_19).abs() < 1e-11);
        for &c in &[0.3, 1.0, 2.5] {
            for &q in &[0.5, 1.0, 3.0] {
                assert_eq!(gc_moment_predicted(c, q).unwrap(), gc_moment_predicted(-c, q).unwrap());
            }
        }
    }

    #[test]
    fn asymptotic_ratio() {
        let r0 = moment_asymptotics_check(0.0, &[1.0, 10.0, 100.0, 400.0]).unwrap();
        assert!(r0.passed, "{r0:?}");
        let r1 = moment_asymptotics_check(1.0, &[400.0]).unwrap();
        assert!(r1.passed, "{r1:?}");
        let small = (gc_moment_predicted(0.0, 1.0).unwrap() / gc_moment_asymptotic(0.0, 1.0) - 1.0).abs();
        assert!(small > 0.05);
        assert!(moment_asymptotics_check(0.0, &[10.0]).is_err());
    }

    #[test]
    fn tabulated_cdf_of_a_gaussian() {
        let t = TabulatedCdf::from_density(|x| (-0.5 * x * x).exp(), -10.0, 10.0, 400).unwrap();
        let c = TabulatedCdf::from_density_clustered(|x| x.powf(-0.4), 0.0, 1.0, 400).unwrap();
        assert!((c.mass - 1.0 / 0.6).abs() < 1e-8);
        for &x in &[1e-4, 1e-3, 0.3] {
            assert!((c.eval(x) - x.powf(0.6)).abs() < 1e-4, "{x}");
        }
        assert!((t.mass - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-9);
        for &x in &[-1.3, 0.0, 0.4, 2.2] {
            assert!((t.eval(x) - normal_cdf(x)).abs() < 1e-5);
        }
        assert_eq!(t.eval(-11.0), 0.0);
        assert_eq!(t.eval(11.0), 1.0);
    }

    #[test]
    fn small_gc_moment_run() {
        let grid = GridSpec::new(1.0, 1024).unwrap();
        let r = gc_moment_check(0.0, 1.0, 4000, &grid, SeedStream::new(1, 0)).unwrap();
        assert!(r.passed, "{r:?}");
        assert!((r.predicted - 0.5).abs() < 1e-12);
        let s = gc_samples(&[1.0], 4000, &grid, SeedStream::new(2, 0), 1).unwrap();
        let m = moment_report_from_samples(1.0, 1.0, &s.fine[0], &s.coarse[0]).unwrap();
        assert!(m.passed, "{m:?}");
        // the law of g_1 is far from symmetric
        assert!(!reflection_check(1.0, 1.0, &s.fine[0]).unwrap().passed);
        assert!(reflection_check(0.0, 1.0, &gc_samples(&[0.0], 4000, &grid, SeedStream::new(3, 0), 1).unwrap().fine[0]).unwrap().passed);
    }

    #[test]
    fn moment_report_rule() {
        assert!(MomentReport::new(0.0, 1.0, 0.51, 0.004, 0.5, 0.0).passed);
        assert!(!MomentReport::new(0.0, 1.0, 0.52, 0.004, 0.5, 0.0).passed);
        assert!(MomentReport::new(0.0, 1.0, 0.52, 0.004, 0.5, 0.01).passed);
    }
}
