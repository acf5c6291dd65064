//! Bridge constructions: Lévy's exact Brownian bridge, the pathwise bridge
//! of a self-similar process cut at a last passage time, the Bessel bridge
//! by time inversion, the stable subordinator conditioned to die at a level,
//! and plain rejection on a thin terminal window.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::parallel::{map_indexed, try_map_indexed};
use crate::pathsim::{
    brownian_last_passage_zoom, brownian_with, last_passage_below, last_passage_curve, last_passage_curve_refined, sq_bessel_step, GridSpec,
    JumpRecord, ProcessSpec, SamplePath, SeedStream, Subordinator,
};

/// Cutoff used by the single-path entry points for subordinator families.
pub const DEFAULT_JUMP_CUTOFF: f64 = 1e-6;

/// Consecutive rejections after which a single pathwise bridge gives up.
const MAX_CONSECUTIVE_REJECTIONS: u64 = 100;

/// Largest tolerated fraction of attempts with `g_c = 0` in a batch.
pub const MAX_REJECTION_RATE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BridgeSpec {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl BridgeSpec {
    pub fn new(x: f64, y: f64, t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(domain("BridgeSpec", format!("length must be > 0, got {t}")));
        }
        if !x.is_finite() || !y.is_finite() {
            return Err(domain("BridgeSpec", "end points must be finite"));
        }
        Ok(BridgeSpec { x, y, t })
    }
}

/// A path killed at `death_time`. The last point of `path` sits at the death
/// time and holds the left limit there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KilledPath {
    pub path: SamplePath,
    pub death_time: f64,
    pub left_limit: f64,
}

fn check_grid_horizon(func: &'static str, grid: &GridSpec, horizon: f64) -> Result<()> {
    grid.validate()?;
    if (grid.horizon - horizon).abs() > 1e-12 * horizon.max(1.0) {
        return Err(domain(func, format!("grid horizon {} must equal {horizon}", grid.horizon)));
    }
    Ok(())
}

/// `x + B_s - (s/t) B_t + (y - x) s/t`.
pub fn brownian_bridge_exact(spec: &BridgeSpec, grid: &GridSpec, seed: SeedStream) -> Result<SamplePath> {
    check_grid_horizon("brownian_bridge_exact", grid, spec.t)?;
    Ok(brownian_bridge_with(spec, grid, &mut seed.rng()))
}

pub(crate) fn brownian_bridge_with<R: Rng + ?Sized>(spec: &BridgeSpec, grid: &GridSpec, rng: &mut R) -> SamplePath {
    bridge_from_brownian(spec, brownian_with(grid, 0.0, rng))
}

/// Applies Lévy's transform to a Brownian path started at 0 on `[0, t]`.
pub fn bridge_from_brownian(spec: &BridgeSpec, mut p: SamplePath) -> SamplePath {
    let bt = p.terminal();
    let n = p.len();
    for k in 0..n {
        let r = p.times[k] / spec.t;
        p.values[k] = spec.x + p.values[k] - r * bt + (spec.y - spec.x) * r;
    }
    p.values[0] = spec.x;
    p.values[n - 1] = spec.y;
    p
}

/// Rejects families and levels for which `g_c = 0` with positive probability.
pub fn check_positive_last_passage(family: &ProcessSpec, c: f64) -> Result<()> {
    family.validate()?;
    let bad = |why: &str| Err(Error::Hypothesis(format!("{family:?}, c = {c}: {why}")));
    match *family {
        ProcessSpec::Brownian => Ok(()),
        ProcessSpec::Bessel { .. } if c < 0.0 => bad("a Bessel process never meets a negative curve"),
        ProcessSpec::Bessel { delta } if c == 0.0 && delta >= 2.0 => {
            bad("0 is polar for Bessel processes of dimension ≥ 2")
        }
        ProcessSpec::Bessel { .. } => Ok(()),
        ProcessSpec::Stable { alpha } if alpha > 1.0 => Ok(()),
        ProcessSpec::Stable { alpha } if alpha < 1.0 && c != 0.0 => Ok(()),
        ProcessSpec::Stable { .. } => bad("needs α > 1, or α < 1 with c ≠ 0"),
        ProcessSpec::StableSubordinator { .. } if c > 0.0 => Ok(()),
        ProcessSpec::StableSubordinator { .. } => bad("a subordinator stays above curves with c ≤ 0"),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathwiseBridge {
    pub path: SamplePath,
    pub g: f64,
    pub rejections: u64,
}

/// `g_c` on a simulated path; continuous families also count crossings
/// hidden between grid points.
pub fn last_passage_for<R: Rng + ?Sized>(family: &ProcessSpec, path: &SamplePath, c: f64, rng: &mut R) -> f64 {
    if family.is_continuous() {
        last_passage_curve_refined(path, c, family.index(), rng)
    } else {
        last_passage_curve(path, c, family.index())
    }
}

/// `s ↦ g^{-1/γ} X_{s g}` on the uniform grid of `[0, 1]` with `steps`
/// steps; the terminal value is pinned to `c`.
fn rescale_at_passage(path: &SamplePath, g: f64, gamma: f64, c: f64, steps: usize) -> SamplePath {
    let factor = g.powf(-1.0 / gamma);
    let grid = GridSpec { horizon: 1.0, steps };
    let times = grid.times();
    // s·g increases with s, so one sweep over the path's steps suffices.
    let mut k = 0;
    let last = path.len() - 1;
    let mut values: Vec<f64> = times
        .iter()
        .map(|&s| {
            let u = s * g;
            while k + 1 < last && path.times[k + 1] <= u {
                k += 1;
            }
            let (t0, t1) = (path.times[k], path.times[k + 1]);
            let (v0, v1) = (path.values[k], path.left_limit(k + 1));
            let w = ((u - t0) / (t1 - t0)).clamp(0.0, 1.0);
            factor * (v0 + (v1 - v0) * w)
        })
        .collect();
    values[steps] = c;
    SamplePath {
        times,
        values,
        cadlag_jumps: None,
    }
}

pub(crate) fn pathwise_bridge_with<R: Rng + ?Sized>(
    family: &ProcessSpec,
    c: f64,
    grid: &GridSpec,
    jump_cutoff: f64,
    rng: &mut R,
) -> Result<PathwiseBridge> {
    let mut rejections = 0;
    loop {
        let x = family.simulate(grid, 0.0, jump_cutoff, rng)?;
        let (x, g) = if *family == ProcessSpec::Brownian {
            brownian_last_passage_zoom(x, c, rng)
        } else {
            let g = last_passage_for(family, &x, c, rng);
            (x, g)
        };
        if g > 0.0 {
            return Ok(PathwiseBridge {
                path: rescale_at_passage(&x, g, family.index(), c, grid.steps),
                g,
                rejections,
            });
        }
        rejections += 1;
        if rejections >= MAX_CONSECUTIVE_REJECTIONS {
            return Err(Error::Hypothesis(format!(
                "{family:?}, c = {c}: g_c = 0 on {rejections} consecutive paths"
            )));
        }
    }
}

/// Bridge of length 1 from 0 to `c`: `Y_s = g_c^{-1/γ} X_{s g_c}`.
pub fn pathwise_selfsim_bridge(family: &ProcessSpec, c: f64, grid: &GridSpec, seed: SeedStream) -> Result<SamplePath> {
    check_positive_last_passage(family, c)?;
    check_grid_horizon("pathwise_selfsim_bridge", grid, 1.0)?;
    Ok(pathwise_bridge_with(family, c, grid, DEFAULT_JUMP_CUTOFF, &mut seed.rng())?.path)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Batch<T> {
    pub items: Vec<T>,
    pub attempts: u64,
    pub rejections: u64,
}

/// `n` pathwise bridges (stream `i` for bridge `i`), each reduced by
/// `observe`. Fails if more than 1% of the attempts had `g_c = 0`.
#[allow(clippy::too_many_arguments)]
pub fn pathwise_bridge_batch<T, F>(
    family: &ProcessSpec,
    c: f64,
    n: usize,
    grid: &GridSpec,
    jump_cutoff: f64,
    seed: SeedStream,
    threads: usize,
    observe: F,
) -> Result<Batch<T>>
where
    T: Send,
    F: Fn(&PathwiseBridge) -> T + Sync + Send,
{
    check_positive_last_passage(family, c)?;
    check_grid_horizon("pathwise_bridge_batch", grid, 1.0)?;
    let rows = try_map_indexed(n, threads, |i| {
        let b = pathwise_bridge_with(family, c, grid, jump_cutoff, &mut seed.with_index(i as u64).rng())?;
        Ok((observe(&b), b.rejections))
    })?;
    let rejections: u64 = rows.iter().map(|r| r.1).sum();
    let attempts = n as u64 + rejections;
    if attempts > 0 && rejections as f64 > MAX_REJECTION_RATE * attempts as f64 {
        return Err(Error::Hypothesis(format!(
            "{family:?}, c = {c}: g_c = 0 on {rejections} of {attempts} paths (limit {MAX_REJECTION_RATE})"
        )));
    }
    Ok(Batch {
        items: rows.into_iter().map(|r| r.0).collect(),
        attempts,
        rejections,
    })
}

/// Bridge from 0 to `x` of length `t`: `Y^x_s = t^{1/γ} Y_{s/t}` where `Y`
/// is the pathwise bridge to `c = x t^{-1/γ}`. `grid` is the unit-interval
/// grid on which the underlying process is simulated.
pub fn rescaled_bridge(family: &ProcessSpec, x: f64, t: f64, grid: &GridSpec, seed: SeedStream) -> Result<SamplePath> {
    if !(t > 0.0) {
        return Err(domain("rescaled_bridge", format!("length must be > 0, got {t}")));
    }
    let gamma = family.index();
    let c = x * t.powf(-1.0 / gamma);
    let unit = pathwise_selfsim_bridge(family, c, grid, seed)?;
    Ok(rescale_bridge_path(&unit, t, gamma, x))
}

pub(crate) fn rescale_bridge_path(unit: &SamplePath, t: f64, gamma: f64, x: f64) -> SamplePath {
    let factor = t.powf(1.0 / gamma);
    let n = unit.len();
    let mut values: Vec<f64> = unit.values.iter().map(|v| factor * v).collect();
    values[n - 1] = x;
    let mut times: Vec<f64> = unit.times.iter().map(|s| s * t).collect();
    times[n - 1] = t;
    SamplePath {
        times,
        values,
        cadlag_jumps: None,
    }
}

/// Bessel(δ) bridge from 0 to `y` of length `t` as `u ↦ u X_{1/u - 1/t}`,
/// with `X` a Bessel(δ) process started at `y/t`. The grid is uniform in `u`;
/// `X` is sampled exactly at the matching clock times.
pub fn bessel_bridge_timeinversion(delta: f64, y: f64, t: f64, grid: &GridSpec, seed: SeedStream) -> Result<SamplePath> {
    if !(delta > 0.0) {
        return Err(domain("bessel_bridge_timeinversion", format!("dimension must be > 0, got {delta}")));
    }
    if !(y > 0.0) {
        return Err(domain("bessel_bridge_timeinversion", format!("end point must be > 0, got {y}")));
    }
    check_grid_horizon("bessel_bridge_timeinversion", grid, t)?;
    bessel_bridge_with(delta, y, t, grid, &mut seed.rng())
}

pub(crate) fn bessel_bridge_with<R: Rng + ?Sized>(delta: f64, y: f64, t: f64, grid: &GridSpec, rng: &mut R) -> Result<SamplePath> {
    let times = grid.times();
    let n = grid.steps;
    let mut values = vec![0.0; n + 1];
    values[n] = y;
    let start = y / t;
    let mut z = start * start;
    let mut clock = 0.0;
    for k in (1..n).rev() {
        let u = times[k];
        let next = 1.0 / u - 1.0 / t;
        z = sq_bessel_step(delta, z, next - clock, rng)?;
        clock = next;
        values[k] = u * z.sqrt();
    }
    Ok(SamplePath {
        times,
        values,
        cadlag_jumps: None,
    })
}

/// The α-stable subordinator conditioned to die at `b`:
/// `Y_t = (b/g) X_{t (g/b)^α}` for `t < ζ = L (b/g)^α`.
pub fn conditioned_subordinator(alpha: f64, b: f64, jump_cutoff: f64, seed: SeedStream) -> Result<KilledPath> {
    if !(b > 0.0) {
        return Err(domain("conditioned_subordinator", format!("level must be > 0, got {b}")));
    }
    let sub = Subordinator::new(alpha, jump_cutoff)?;
    conditioned_with(&sub, b, &mut seed.rng())
}

pub(crate) fn conditioned_with<R: Rng + ?Sized>(sub: &Subordinator, b: f64, rng: &mut R) -> Result<KilledPath> {
    let x = sub.run(f64::INFINITY, Some(b), rng);
    let (l, g) = last_passage_below(&x, b)?;
    if !(g > 0.0) {
        return Err(Error::Sample("pre-passage value is 0".into()));
    }
    let space = b / g;
    let time = space.powf(sub.alpha);
    let zeta = l * time;
    let keep = x.times.partition_point(|&s| s < l);
    let mut times: Vec<f64> = x.times[..keep].iter().map(|s| s * time).collect();
    let mut values: Vec<f64> = x.values[..keep].iter().map(|v| v * space).collect();
    times.push(zeta);
    values.push(b);
    let jumps = x.cadlag_jumps.as_ref().map(|js| {
        js.iter()
            .filter(|j| j.time < l)
            .map(|j| JumpRecord {
                time: j.time * time,
                pre: j.pre * space,
                post: j.post * space,
            })
            .collect()
    });
    Ok(KilledPath {
        path: SamplePath {
            times,
            values,
            cadlag_jumps: jumps,
        },
        death_time: zeta,
        left_limit: b,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowOutcome<T> {
    pub items: Vec<T>,
    pub attempts: u64,
    pub acceptance_rate: f64,
}

/// Attempts simulated per deterministic chunk of the window sampler.
const WINDOW_CHUNK: usize = 4096;

/// Rejection sampling of `P_x(· | |X_t - y| < δ)`: attempt `i` uses stream
/// `i`, and the first `n_accept` accepted attempts in index order are kept.
#[allow(clippy::too_many_arguments)]
pub fn window_conditioned_batch<T, F>(
    family: &ProcessSpec,
    spec: &BridgeSpec,
    delta: f64,
    n_accept: usize,
    grid: &GridSpec,
    max_attempts: u64,
    seed: SeedStream,
    threads: usize,
    observe: F,
) -> Result<WindowOutcome<T>>
where
    T: Send,
    F: Fn(&SamplePath) -> T + Sync + Send,
{
    if !(delta > 0.0) {
        return Err(domain("window_conditioned_sampler", format!("window must be > 0, got {delta}")));
    }
    check_grid_horizon("window_conditioned_sampler", grid, spec.t)?;
    if !(family.transition_density(spec.t, spec.x, spec.y)? > 0.0) {
        return Err(Error::Hypothesis(format!("p_t(x, y) = 0 for {family:?}, {spec:?}")));
    }
    let mut items = Vec::with_capacity(n_accept);
    let mut attempts: u64 = 0;
    while items.len() < n_accept {
        if attempts >= max_attempts {
            return Err(Error::BudgetExceeded {
                attempts,
                accepted: items.len() as u64,
                rate: items.len() as f64 / attempts.max(1) as f64,
            });
        }
        let base = attempts;
        let chunk = (WINDOW_CHUNK as u64).min(max_attempts - attempts) as usize;
        let rows = map_indexed(chunk, threads, |i| -> Result<Option<T>> {
            let mut rng = seed.with_index(base + i as u64).rng();
            let p = family.simulate(grid, spec.x, DEFAULT_JUMP_CUTOFF, &mut rng)?;
            Ok(((p.terminal() - spec.y).abs() < delta).then(|| observe(&p)))
        })?;
        for row in rows {
            attempts += 1;
            if let Some(v) = row? {
                items.push(v);
                if items.len() == n_accept {
                    break;
                }
            }
        }
    }
    Ok(WindowOutcome {
        acceptance_rate: items.len() as f64 / attempts as f64,
        items,
        attempts,
    })
}

/// Accepted paths of the window sampler, on a single thread.
pub fn window_conditioned_sampler(
    family: &ProcessSpec,
    spec: &BridgeSpec,
    delta: f64,
    n_accept: usize,
    grid: &GridSpec,
    max_attempts: u64,
    seed: SeedStream,
) -> Result<WindowOutcome<SamplePath>> {
    window_conditioned_batch(family, spec, delta, n_accept, grid, max_attempts, seed, 1, |p| p.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{ks_one_sample, ks_two_sample, mean_se};

    fn normal_cdf(mean: f64, var: f64) -> impl Fn(f64) -> f64 {
        move |x| 0.5 * statrs::function::erf::erfc(-(x - mean) / (2.0 * var).sqrt())
    }

    #[test]
    fn exact_bridge_endpoints_and_marginal() {
        let spec = BridgeSpec::new(0.0, 0.0, 1.0).unwrap();
        let grid = GridSpec::new(1.0, 4).unwrap();
        let mids: Vec<f64> = (0..20_000)
            .map(|i| {
                let p = brownian_bridge_exact(&spec, &grid, SeedStream::new(1, i)).unwrap();
                assert_eq!((p.values[0], p.terminal()), (0.0, 0.0));
                p.values[2]
            })
            .collect();
        assert!(ks_one_sample(&mids, normal_cdf(0.0, 0.25)).unwrap().passed);
    }

    #[test]
    fn exact_bridge_covariance() {
        let spec = BridgeSpec::new(0.0, 0.0, 1.0).unwrap();
        let grid = GridSpec::new(1.0, 4).unwrap();
        let prods: Vec<f64> = (0..40_000)
            .map(|i| {
                let p = brownian_bridge_exact(&spec, &grid, SeedStream::new(2, i)).unwrap();
                p.values[1] * p.values[2]
            })
            .collect();
        let (m, se) = mean_se(&prods).unwrap();
        assert!((m - 0.125).abs() < 3.0 * se, "{m} ± {se}");
    }

    #[test]
    fn zero_noise_bridge_is_the_line() {
        let spec = BridgeSpec::new(2.0, 2.0, 1.0).unwrap();
        let grid = GridSpec::new(1.0, 8).unwrap();
        let flat = SamplePath::new(grid.times(), vec![0.0; 9], None).unwrap();
        let p = bridge_from_brownian(&spec, flat);
        assert!(p.values.iter().all(|&v| v == 2.0));
        let slope = bridge_from_brownian(&BridgeSpec::new(0.0, 1.0, 1.0).unwrap(), SamplePath::new(grid.times(), vec![0.0; 9], None).unwrap());
        assert!((slope.values[4] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn hypotheses_are_enforced() {
        assert!(check_positive_last_passage(&ProcessSpec::Brownian, 0.0).is_ok());
        assert!(check_positive_last_passage(&ProcessSpec::Stable { alpha: 1.5 }, 0.0).is_ok());
        assert!(check_positive_last_passage(&ProcessSpec::Stable { alpha: 0.5 }, 1.0).is_ok());
        for (f, c) in [
            (ProcessSpec::Stable { alpha: 0.5 }, 0.0),
            (ProcessSpec::Stable { alpha: 1.0 }, 1.0),
            (ProcessSpec::Bessel { delta: 3.0 }, 0.0),
            (ProcessSpec::Bessel { delta: 3.0 }, -1.0),
            (ProcessSpec::StableSubordinator { alpha: 0.5 }, 0.0),
        ] {
            assert!(matches!(check_positive_last_passage(&f, c), Err(Error::Hypothesis(_))), "{f:?} {c}");
        }
        let grid = GridSpec::new(1.0, 64).unwrap();
        assert!(pathwise_selfsim_bridge(&ProcessSpec::Stable { alpha: 0.5 }, 0.0, &grid, SeedStream::new(0, 0)).is_err());
    }

    #[test]
    fn pathwise_bridge_pins_its_end_point() {
        let grid = GridSpec::new(1.0, 256).unwrap();
        for &(family, c) in &[
            (ProcessSpec::Brownian, 1.0),
            (ProcessSpec::Bessel { delta: 3.0 }, 0.5),
            (ProcessSpec::Stable { alpha: 1.5 }, -0.5),
            (ProcessSpec::StableSubordinator { alpha: 0.5 }, 1.0),
        ] {
            let p = pathwise_selfsim_bridge(&family, c, &grid, SeedStream::new(4, 0)).unwrap();
            assert_eq!(p.values[0], 0.0);
            assert_eq!(p.terminal(), c);
            // Just before the end the path is close to c (continuous-side crossing).
            let before = p.values[p.len() - 2];
            if family.is_continuous() {
                assert!((before - c).abs() < 0.5, "{family:?}: {before}");
            }
        }
    }

    #[test]
    fn rescaled_bridge_reduces_to_pathwise_at_unit_length() {
        let grid = GridSpec::new(1.0, 128).unwrap();
        let s = SeedStream::new(8, 3);
        let a = rescaled_bridge(&ProcessSpec::Brownian, 0.7, 1.0, &grid, s).unwrap();
        let b = pathwise_selfsim_bridge(&ProcessSpec::Brownian, 0.7, &grid, s).unwrap();
        assert_eq!(a, b);
        let c = rescaled_bridge(&ProcessSpec::Brownian, 0.0, 4.0, &grid, s).unwrap();
        assert_eq!(c.horizon(), 4.0);
        assert_eq!(c.terminal(), 0.0);
    }

    #[test]
    fn pathwise_matches_exact_for_brownian() {
        let grid = GridSpec::new(1.0, 1024).unwrap();
        let n = 4000;
        for c in [0.0, 1.0] {
            let batch = pathwise_bridge_batch(&ProcessSpec::Brownian, c, n, &grid, 1e-6, SeedStream::new(5, 0), 1, |b| {
                b.path.values[512]
            })
            .unwrap();
            assert_eq!(batch.rejections, 0);
            let ks = ks_one_sample(&batch.items, normal_cdf(0.5 * c, 0.25)).unwrap();
            assert!(ks.passed, "c={c}: {ks:?}");
            let spec = BridgeSpec::new(0.0, c, 1.0).unwrap();
            let coarse = GridSpec::new(1.0, 2).unwrap();
            let exact: Vec<f64> = (0..n as u64)
                .map(|i| brownian_bridge_exact(&spec, &coarse, SeedStream::new(6, i)).unwrap().values[1])
                .collect();
            assert!(ks_two_sample(&batch.items, &exact).unwrap().passed);
        }
    }

    #[test]
    fn bessel_bridge_end_points() {
        let grid = GridSpec::new(1.0, 64).unwrap();
        let p = bessel_bridge_timeinversion(3.0, 1.0, 1.0, &grid, SeedStream::new(1, 1)).unwrap();
        assert_eq!(p.values[0], 0.0);
        assert_eq!(p.terminal(), 1.0);
        assert!(p.values.iter().all(|&v| v >= 0.0));
        assert!(bessel_bridge_timeinversion(3.0, 1.0, 2.0, &grid, SeedStream::new(1, 1)).is_err());
        assert!(bessel_bridge_timeinversion(3.0, 0.0, 1.0, &grid, SeedStream::new(1, 1)).is_err());
    }

    #[test]
    fn conditioned_subordinator_dies_at_b() {
        for i in 0..50 {
            let k = conditioned_subordinator(0.5, 1.0, 1e-6, SeedStream::new(3, i)).unwrap();
            assert_eq!(k.left_limit, 1.0);
            assert_eq!(k.path.terminal(), 1.0);
            assert!((k.path.horizon() - k.death_time).abs() < 1e-15);
            assert!(k.path.is_non_decreasing());
            assert!(k.path.values[..k.path.len() - 1].iter().all(|&v| v < 1.0 + 1e-12));
        }
    }

    #[test]
    fn window_sampler_budget_and_rate() {
        let spec = BridgeSpec::new(0.0, 0.0, 1.0).unwrap();
        let grid = GridSpec::new(1.0, 2).unwrap();
        let out = window_conditioned_sampler(&ProcessSpec::Brownian, &spec, 0.05, 400, &grid, 1_000_000, SeedStream::new(1, 0)).unwrap();
        assert_eq!(out.items.len(), 400);
        for p in &out.items {
            assert!(p.terminal().abs() < 0.05);
        }
        let expected = 2.0 * 0.05 * 0.398_942_280_401_432_7;
        let se = (expected / out.attempts as f64).sqrt();
        assert!((out.acceptance_rate - expected).abs() < 4.0 * se, "{}", out.acceptance_rate);
        let err = window_conditioned_sampler(&ProcessSpec::Brownian, &spec, 0.001, 10, &grid, 100, SeedStream::new(1, 0));
        assert!(matches!(err, Err(Error::BudgetExceeded { attempts: 100, .. })));
    }

    #[test]
    fn window_sampler_is_thread_count_invariant() {
        let spec = BridgeSpec::new(0.0, 1.0, 1.0).unwrap();
        let grid = GridSpec::new(1.0, 4).unwrap();
        let run = |threads| {
            window_conditioned_batch(&ProcessSpec::Brownian, &spec, 0.1, 300, &grid, 1 << 20, SeedStream::new(9, 0), threads, |p| p.values[2]).unwrap()
        };
        assert_eq!(run(1), run(3));
    }
}
