//! Seeded sample paths and the random times extracted from them.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::kernels::{bessel_p, brownian_p};
use crate::specfun::{gamma_fn, kanter_a, stable_density, StableKind};

/// Largest drift rate (per unit time) accepted as a stand-in for the jumps
/// below the cutoff.
pub const MAX_SMALL_JUMP_DRIFT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub horizon: f64,
    pub steps: usize,
}

impl GridSpec {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        let g = GridSpec { horizon, steps };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(domain("GridSpec", format!("horizon must be > 0, got {}", self.horizon)));
        }
        if self.steps < 2 {
            return Err(domain("GridSpec", format!("need at least 2 steps, got {}", self.steps)));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn times(&self) -> Vec<f64> {
        let dt = self.dt();
        let mut t: Vec<f64> = (0..=self.steps).map(|k| k as f64 * dt).collect();
        t[self.steps] = self.horizon;
        t
    }
}

/// Names one independent random stream: a master seed plus a stream index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeedStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        SeedStream {
            master_seed,
            stream_index,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }

    /// Same stream index under a different master seed, keyed by `tag`.
    /// Used to give each purpose within an experiment its own family of
    /// streams.
    pub fn fork(&self, tag: u64) -> SeedStream {
        SeedStream {
            master_seed: splitmix64(self.master_seed ^ splitmix64(tag)),
            stream_index: self.stream_index,
        }
    }

    pub fn with_index(&self, stream_index: u64) -> SeedStream {
        SeedStream {
            master_seed: self.master_seed,
            stream_index,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpRecord {
    pub time: f64,
    pub pre: f64,
    pub post: f64,
}

/// One trajectory on a time grid. Between grid points the path is linear
/// from `values[k]` to the left limit at `times[k+1]`; the left limit equals
/// `values[k+1]` unless a jump is recorded at that time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub cadlag_jumps: Option<Vec<JumpRecord>>,
}

impl SamplePath {
    pub fn new(times: Vec<f64>, values: Vec<f64>, cadlag_jumps: Option<Vec<JumpRecord>>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(domain(
                "SamplePath",
                format!("{} times but {} values", times.len(), values.len()),
            ));
        }
        if times.is_empty() {
            return Err(domain("SamplePath", "empty path"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(domain("SamplePath", "times must be strictly increasing"));
        }
        if let Some(j) = &cadlag_jumps {
            if j.windows(2).any(|w| !(w[1].time > w[0].time)) {
                return Err(domain("SamplePath", "jump times must be strictly increasing"));
            }
        }
        Ok(SamplePath {
            times,
            values,
            cadlag_jumps,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn terminal(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    fn jump_at(&self, t: f64) -> Option<&JumpRecord> {
        let jumps = self.cadlag_jumps.as_ref()?;
        jumps
            .binary_search_by(|j| j.time.total_cmp(&t))
            .ok()
            .map(|i| &jumps[i])
    }

    /// `X_{t_k-}`.
    pub fn left_limit(&self, k: usize) -> f64 {
        match self.jump_at(self.times[k]) {
            Some(j) if k > 0 => j.pre,
            _ => self.values[k],
        }
    }

    /// Value at time `t` (right-continuous at recorded jumps).
    pub fn value_at(&self, t: f64) -> f64 {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.values[0];
        }
        if t >= self.times[n - 1] {
            return self.values[n - 1];
        }
        let k = self.times.partition_point(|&s| s <= t) - 1;
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let (v0, v1) = (self.values[k], self.left_limit(k + 1));
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    pub fn is_non_decreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }

    /// Every second grid point (the terminal point is always kept).
    pub fn every_other(&self) -> SamplePath {
        let n = self.times.len();
        let mut idx: Vec<usize> = (0..n).step_by(2).collect();
        if *idx.last().unwrap() != n - 1 {
            idx.push(n - 1);
        }
        SamplePath {
            times: idx.iter().map(|&i| self.times[i]).collect(),
            values: idx.iter().map(|&i| self.values[i]).collect(),
            cadlag_jumps: self.cadlag_jumps.clone(),
        }
    }
}

/// Process families with their self-similarity index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ProcessSpec {
    /// Standard Brownian motion (variance t), γ = 2.
    Brownian,
    /// Bessel process of dimension δ, γ = 2.
    Bessel { delta: f64 },
    /// Symmetric α-stable process, `Ψ(u) = |u|^α`, γ = α.
    Stable { alpha: f64 },
    /// α-stable subordinator, `Φ(q) = q^α`, γ = α.
    StableSubordinator { alpha: f64 },
}

impl ProcessSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ProcessSpec::Brownian => Ok(()),
            ProcessSpec::Bessel { delta } if delta > 0.0 && delta.is_finite() => Ok(()),
            ProcessSpec::Stable { alpha } if alpha > 0.0 && alpha <= 2.0 => Ok(()),
            ProcessSpec::StableSubordinator { alpha } if alpha > 0.0 && alpha < 1.0 => Ok(()),
            other => Err(domain("ProcessSpec", format!("parameter out of range in {other:?}"))),
        }
    }

    pub fn index(&self) -> f64 {
        match *self {
            ProcessSpec::Brownian | ProcessSpec::Bessel { .. } => 2.0,
            ProcessSpec::Stable { alpha } | ProcessSpec::StableSubordinator { alpha } => alpha,
        }
    }

    pub fn is_continuous(&self) -> bool {
        matches!(self, ProcessSpec::Brownian | ProcessSpec::Bessel { .. })
    }

    /// `p_t(x, y)` for the family.
    pub fn transition_density(&self, t: f64, x: f64, y: f64) -> Result<f64> {
        self.validate()?;
        match *self {
            ProcessSpec::Brownian => brownian_p(t, x, y),
            ProcessSpec::Bessel { delta } => bessel_p(delta, t, x, y),
            ProcessSpec::Stable { alpha } => {
                stable_density(alpha, StableKind::SymmetricTwoSided, t, y - x)
            }
            ProcessSpec::StableSubordinator { alpha } => {
                stable_density(alpha, StableKind::OneSidedSubordinator, t, y - x)
            }
        }
    }

    /// Simulates one path on `grid` started at `x0`. Subordinator paths
    /// carry their own jump-time grid and ignore `grid.steps`.
    pub fn simulate<R: Rng + ?Sized>(&self, grid: &GridSpec, x0: f64, jump_cutoff: f64, rng: &mut R) -> Result<SamplePath> {
        self.validate()?;
        grid.validate()?;
        match *self {
            ProcessSpec::Brownian => Ok(brownian_with(grid, x0, rng)),
            ProcessSpec::Bessel { delta } => bessel_with(delta, grid, x0, rng),
            ProcessSpec::Stable { alpha } => Ok(stable_with(alpha, grid, x0, rng)),
            ProcessSpec::StableSubordinator { alpha } => {
                let mut p = Subordinator::new(alpha, jump_cutoff)?.run(grid.horizon, None, rng);
                if x0 != 0.0 {
                    p.values.iter_mut().for_each(|v| *v += x0);
                    for j in p.cadlag_jumps.iter_mut().flatten() {
                        j.pre += x0;
                        j.post += x0;
                    }
                }
                Ok(p)
            }
        }
    }
}

pub fn sim_brownian(grid: &GridSpec, x0: f64, seed: SeedStream) -> Result<SamplePath> {
    grid.validate()?;
    Ok(brownian_with(grid, x0, &mut seed.rng()))
}

pub(crate) fn brownian_with<R: Rng + ?Sized>(grid: &GridSpec, x0: f64, rng: &mut R) -> SamplePath {
    let sd = grid.dt().sqrt();
    let mut values = Vec::with_capacity(grid.steps + 1);
    let mut x = x0;
    values.push(x);
    for _ in 0..grid.steps {
        let z: f64 = StandardNormal.sample(rng);
        x += sd * z;
        values.push(x);
    }
    SamplePath {
        times: grid.times(),
        values,
        cadlag_jumps: None,
    }
}

pub fn sim_bessel(delta: f64, grid: &GridSpec, x0: f64, seed: SeedStream) -> Result<SamplePath> {
    grid.validate()?;
    bessel_with(delta, grid, x0, &mut seed.rng())
}

fn bessel_with<R: Rng + ?Sized>(delta: f64, grid: &GridSpec, x0: f64, rng: &mut R) -> Result<SamplePath> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(domain("sim_bessel", format!("dimension must be > 0, got {delta}")));
    }
    if !(x0 >= 0.0) {
        return Err(domain("sim_bessel", format!("start must be >= 0, got {x0}")));
    }
    let dt = grid.dt();
    let mut values = Vec::with_capacity(grid.steps + 1);
    values.push(x0);
    if delta.fract() == 0.0 && delta <= 16.0 {
        let dim = delta as usize;
        let sd = dt.sqrt();
        let mut coords = vec![0.0; dim];
        coords[0] = x0;
        for _ in 0..grid.steps {
            let mut sq = 0.0;
            for c in coords.iter_mut() {
                let z: f64 = StandardNormal.sample(rng);
                *c += sd * z;
                sq += *c * *c;
            }
            values.push(sq.sqrt());
        }
    } else {
        let mut z = x0 * x0;
        for _ in 0..grid.steps {
            z = sq_bessel_step(delta, z, dt, rng)?;
            values.push(z.sqrt());
        }
    }
    Ok(SamplePath {
        times: grid.times(),
        values,
        cadlag_jumps: None,
    })
}

/// Exact squared-Bessel transition over `dt` from `z`: `2 dt · Gamma(δ/2 + N)`
/// with `N ~ Poisson(z / 2dt)`.
pub(crate) fn sq_bessel_step<R: Rng + ?Sized>(delta: f64, z: f64, dt: f64, rng: &mut R) -> Result<f64> {
    let lambda = z / (2.0 * dt);
    let n = if lambda > 0.0 {
        let pois = Poisson::new(lambda).map_err(|e| Error::Sample(format!("poisson({lambda}): {e}")))?;
        pois.sample(rng)
    } else {
        0.0
    };
    let shape = 0.5 * delta + n;
    let gamma = Gamma::new(shape, 1.0).map_err(|e| Error::Sample(format!("gamma({shape}): {e}")))?;
    Ok(2.0 * dt * gamma.sample(rng))
}

pub fn sim_stable(alpha: f64, grid: &GridSpec, x0: f64, seed: SeedStream) -> Result<SamplePath> {
    grid.validate()?;
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(domain("sim_stable", format!("index must be in (0,2], got {alpha}")));
    }
    Ok(stable_with(alpha, grid, x0, &mut seed.rng()))
}

fn stable_with<R: Rng + ?Sized>(alpha: f64, grid: &GridSpec, x0: f64, rng: &mut R) -> SamplePath {
    let scale = grid.dt().powf(1.0 / alpha);
    let mut values = Vec::with_capacity(grid.steps + 1);
    let mut x = x0;
    values.push(x);
    for _ in 0..grid.steps {
        x += scale * symmetric_stable_variate(alpha, rng);
        values.push(x);
    }
    SamplePath {
        times: grid.times(),
        values,
        cadlag_jumps: None,
    }
}

/// Chambers–Mallows–Stuck draw with `E e^{iuX} = e^{-|u|^α}`.
pub fn symmetric_stable_variate<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let v = PI * (open_unit(rng) - 0.5);
    let w: f64 = Exp1.sample(rng);
    if alpha == 1.0 {
        return v.tan();
    }
    (alpha * v).sin() / v.cos().powf(1.0 / alpha)
        * (((1.0 - alpha) * v).cos() / w).powf((1.0 - alpha) / alpha)
}

/// Kanter's draw with `E e^{-qX} = e^{-q^α}`, α ∈ (0,1).
pub fn one_sided_stable_variate<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let u = PI * open_unit(rng);
    let e: f64 = Exp1.sample(rng);
    (kanter_a(alpha, u) / e).powf((1.0 - alpha) / alpha)
}

fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Drift rate that replaces the jumps below `cutoff`:
/// `∫_0^ε x ν(dx) = α ε^{1-α} / ((1-α) Γ(1-α))`.
pub fn small_jump_drift(alpha: f64, cutoff: f64) -> Result<f64> {
    Ok(alpha * cutoff.powf(1.0 - alpha) / ((1.0 - alpha) * gamma_fn(1.0 - alpha)?))
}

/// Compound-Poisson approximation of the α-stable subordinator: exact jumps
/// above the cutoff, linear drift for the rest.
#[derive(Debug, Clone, Copy)]
pub struct Subordinator {
    pub alpha: f64,
    pub cutoff: f64,
    pub rate: f64,
    pub drift: f64,
}

impl Subordinator {
    pub fn new(alpha: f64, cutoff: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(domain("subordinator", format!("index must be in (0,1), got {alpha}")));
        }
        if !(cutoff > 0.0) || !cutoff.is_finite() {
            return Err(domain("subordinator", format!("jump cutoff must be > 0, got {cutoff}")));
        }
        let drift = small_jump_drift(alpha, cutoff)?;
        if drift > MAX_SMALL_JUMP_DRIFT {
            return Err(Error::CutoffTooLarge(format!(
                "cutoff {cutoff} gives small-jump drift {drift:.4} per unit time (limit {MAX_SMALL_JUMP_DRIFT})"
            )));
        }
        let rate = cutoff.powf(-alpha) / gamma_fn(1.0 - alpha)?;
        Ok(Subordinator {
            alpha,
            cutoff,
            rate,
            drift,
        })
    }

    fn next<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let e: f64 = Exp1.sample(rng);
        let size = self.cutoff * open_unit(rng).powf(-1.0 / self.alpha);
        (e / self.rate, size)
    }

    /// Runs on `[0, horizon]`, or until the first passage above `level` if
    /// given (whichever comes first).
    pub fn run<R: Rng + ?Sized>(&self, horizon: f64, level: Option<f64>, rng: &mut R) -> SamplePath {
        let mut times = vec![0.0];
        let mut values = vec![0.0];
        let mut jumps = Vec::new();
        let (mut t, mut x) = (0.0, 0.0);
        loop {
            let (wait, size) = self.next(rng);
            let pre = x + self.drift * wait;
            if let Some(b) = level {
                if pre >= b {
                    let hit = t + (b - x) / self.drift;
                    if hit <= horizon {
                        times.push(hit);
                        values.push(b);
                        break;
                    }
                }
            }
            if t + wait >= horizon {
                if horizon > t {
                    times.push(horizon);
                    values.push(x + self.drift * (horizon - t));
                }
                break;
            }
            t += wait;
            x = pre + size;
            times.push(t);
            values.push(x);
            jumps.push(JumpRecord { time: t, pre, post: x });
            if level.is_some_and(|b| x >= b) {
                break;
            }
        }
        SamplePath {
            times,
            values,
            cadlag_jumps: Some(jumps),
        }
    }

    /// `(L, g)` for level `b` without storing the path.
    ///
    /// A passage by the drift stands for a passage by a jump below the
    /// cutoff, so `g` is then drawn from the undershoot law of such jumps,
    /// with density proportional to `r^{-α}` for `r = b - g` below
    /// `min(cutoff, b - x)`, rather than set to `b`.
    pub fn passage<R: Rng + ?Sized>(&self, b: f64, rng: &mut R) -> (f64, f64) {
        let (mut t, mut x) = (0.0, 0.0);
        loop {
            let (wait, size) = self.next(rng);
            let pre = x + self.drift * wait;
            if pre >= b {
                let r = self.cutoff.min(b - x) * open_unit(rng).powf(1.0 / (1.0 - self.alpha));
                return (t + (b - x) / self.drift, b - r);
            }
            t += wait;
            if pre + size >= b {
                return (t, pre);
            }
            x = pre + size;
        }
    }
}

pub fn sim_stable_subordinator(alpha: f64, horizon: f64, jump_cutoff: f64, seed: SeedStream) -> Result<SamplePath> {
    if !(horizon > 0.0) {
        return Err(domain("sim_stable_subordinator", format!("horizon must be > 0, got {horizon}")));
    }
    Ok(Subordinator::new(alpha, jump_cutoff)?.run(horizon, None, &mut seed.rng()))
}

/// Subordinator path stopped at its first passage above `level`.
pub fn sim_stable_subordinator_until(alpha: f64, level: f64, jump_cutoff: f64, seed: SeedStream) -> Result<SamplePath> {
    if !(level > 0.0) {
        return Err(domain("sim_stable_subordinator_until", format!("level must be > 0, got {level}")));
    }
    Ok(Subordinator::new(alpha, jump_cutoff)?.run(f64::INFINITY, Some(level), &mut seed.rng()))
}

/// Largest time at which the path meets `c t^{1/γ}`, read off sign changes
/// between grid points; 0 when there is none. A change of sign across a
/// recorded jump is not a meeting.
pub fn last_passage_curve(path: &SamplePath, c: f64, gamma: f64) -> f64 {
    scan_last_passage(path, c, gamma, |_, _, _| false)
}

/// As [`last_passage_curve`], but also catches crossings that happen strictly
/// between two grid points of a continuous path: with both endpoints on the
/// same side at distances `d0, d1`, a Brownian bridge over a step of length
/// `h` meets the boundary with probability `exp(-2 d0 d1 / h)`. Such a
/// crossing is dated at the middle of the step. A path that starts on the
/// curve (`d0 = 0`) therefore always meets it again inside the first step.
pub fn last_passage_curve_refined<R: Rng + ?Sized>(path: &SamplePath, c: f64, gamma: f64, rng: &mut R) -> f64 {
    scan_last_passage(path, c, gamma, |d0, d1, h| {
        // exp(-34.5) < 1e-15: too unlikely to draw for
        let e = 2.0 * d0 * d1 / h;
        e < 34.5 && rng.random::<f64>() < (-e).exp()
    })
}

/// Deepest halving of `[0, T]` tried by [`brownian_last_passage_zoom`].
const MAX_ZOOM_DEPTH: usize = 200;

/// Last passage of a Brownian path from 0 under `c √t`, resolved at every
/// scale. While `[T/2, T]` holds no crossing, the steps of `[0, T/2]` are
/// halved by Brownian-bridge midpoints and the search moves to `[T/4, T/2]`,
/// so `[0, g]` always spans at least half as many steps as the input grid.
/// Returns the refined path (non-uniform times) and `g`, or `g = 0` past
/// the depth limit.
pub fn brownian_last_passage_zoom<R: Rng + ?Sized>(path: SamplePath, c: f64, rng: &mut R) -> (SamplePath, f64) {
    let SamplePath { mut times, mut values, .. } = path;
    let mut tail_t: Vec<f64> = Vec::new();
    let mut tail_v: Vec<f64> = Vec::new();
    let mut g = 0.0;
    for _ in 0..MAX_ZOOM_DEPTH {
        let n = times.len() - 1;
        let half = n / 2;
        let upper = SamplePath {
            times: times[half..].to_vec(),
            values: values[half..].to_vec(),
            cadlag_jumps: None,
        };
        g = last_passage_curve_refined(&upper, c, 2.0, rng);
        if g > 0.0 || half == 0 {
            break;
        }
        let mut t2 = Vec::with_capacity(2 * half + 1);
        let mut v2 = Vec::with_capacity(2 * half + 1);
        for k in 0..half {
            let h = times[k + 1] - times[k];
            let z: f64 = StandardNormal.sample(rng);
            t2.push(times[k]);
            v2.push(values[k]);
            t2.push(times[k] + 0.5 * h);
            v2.push(0.5 * (values[k] + values[k + 1]) + 0.5 * h.sqrt() * z);
        }
        t2.push(times[half]);
        v2.push(values[half]);
        let mut new_tail_t = times.split_off(half + 1);
        let mut new_tail_v = values.split_off(half + 1);
        new_tail_t.append(&mut tail_t);
        new_tail_v.append(&mut tail_v);
        tail_t = new_tail_t;
        tail_v = new_tail_v;
        times = t2;
        values = v2;
    }
    times.append(&mut tail_t);
    values.append(&mut tail_v);
    (
        SamplePath {
            times,
            values,
            cadlag_jumps: None,
        },
        g,
    )
}

fn scan_last_passage<F: FnMut(f64, f64, f64) -> bool>(path: &SamplePath, c: f64, gamma: f64, mut hidden: F) -> f64 {
    let n = path.len();
    let inv = 1.0 / gamma;
    let curve = |t: f64| {
        if c == 0.0 {
            0.0
        } else if gamma == 2.0 {
            c * t.sqrt()
        } else {
            c * t.powf(inv)
        }
    };
    let mut right = path.left_limit(n - 1) - curve(path.times[n - 1]);
    if right == 0.0 && n > 1 {
        return path.times[n - 1];
    }
    for k in (0..n - 1).rev() {
        let (t0, t1) = (path.times[k], path.times[k + 1]);
        let v0 = path.values[k];
        let c0 = curve(t0);
        let left = v0 - c0;
        if left * right < 0.0 {
            let v1 = path.left_limit(k + 1);
            return bisect_crossing(t0, t1, v0, v1, &curve);
        }
        let continuous = path.jump_at(t1).is_none();
        if continuous && right != 0.0 && hidden(left, right, t1 - t0) {
            return 0.5 * (t0 + t1);
        }
        if k > 0 {
            let ll = path.left_limit(k) - c0;
            if ll == 0.0 {
                return t0;
            }
            right = ll;
        }
    }
    0.0
}

fn bisect_crossing(t0: f64, t1: f64, v0: f64, v1: f64, curve: &impl Fn(f64) -> f64) -> f64 {
    let d = |t: f64| v0 + (v1 - v0) * (t - t0) / (t1 - t0) - curve(t);
    let (mut lo, mut hi) = (t0, t1);
    let lo_sign = d(lo) > 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if (d(mid) > 0.0) == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `(L, g)`: the time of the first passage above `b` and the value just
/// before it. A passage by drift gives `g = b`.
pub fn last_passage_below(path: &SamplePath, b: f64) -> Result<(f64, f64)> {
    if !(b > 0.0) {
        return Err(domain("last_passage_below", format!("level must be > 0, got {b}")));
    }
    if path.values[0] >= b {
        return Err(domain("last_passage_below", "path starts at or above the level"));
    }
    for k in 0..path.len() - 1 {
        let (t0, t1) = (path.times[k], path.times[k + 1]);
        let v0 = path.values[k];
        let ll = path.left_limit(k + 1);
        if ll >= b {
            return Ok((t0 + (b - v0) / (ll - v0) * (t1 - t0), b));
        }
        if path.values[k + 1] >= b {
            return Ok((t1, ll));
        }
    }
    Err(Error::HorizonTooShort(format!(
        "path ends at {} below level {b} (horizon {})",
        path.terminal(),
        path.horizon()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::stable_cdf;

    fn grid(steps: usize) -> GridSpec {
        GridSpec::new(1.0, steps).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(1.0, 1).is_err());
        assert!(GridSpec::new(0.0, 4).is_err());
        let g = grid(4);
        assert_eq!(g.times(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn starting_point_and_determinism() {
        let g = GridSpec::new(1.0, 2).unwrap();
        let s = SeedStream::new(7, 3);
        let p = sim_brownian(&g, 5.0, s).unwrap();
        assert_eq!(p.values[0], 5.0);
        assert_eq!(p, sim_brownian(&g, 5.0, s).unwrap());
        assert_ne!(p, sim_brownian(&g, 5.0, s.with_index(4)).unwrap());
        assert_eq!(sim_bessel(2.5, &g, 1.5, s).unwrap().values[0], 1.5);
        assert_eq!(sim_stable(1.3, &g, -2.0, s).unwrap().values[0], -2.0);
        assert_eq!(sim_stable_subordinator(0.5, 1.0, 1e-6, s).unwrap().values[0], 0.0);
    }

    #[test]
    fn streams_are_distinct() {
        let s = SeedStream::new(1, 0);
        let a: u64 = s.rng().random();
        let b: u64 = s.with_index(1).rng().random();
        let c: u64 = s.fork(1).rng().random();
        assert!(a != b && a != c && b != c);
    }

    #[test]
    fn value_at_interpolates_to_left_limits() {
        let p = SamplePath::new(
            vec![0.0, 0.3, 1.0],
            vec![0.0, 2.0, 2.0],
            Some(vec![JumpRecord { time: 0.3, pre: 0.0, post: 2.0 }]),
        )
        .unwrap();
        assert_eq!(p.value_at(0.15), 0.0);
        assert_eq!(p.value_at(0.3), 2.0);
        assert_eq!(p.left_limit(1), 0.0);
        assert_eq!(last_passage_below(&p, 1.0).unwrap(), (0.3, 0.0));
        assert!(matches!(last_passage_below(&p, 3.0), Err(Error::HorizonTooShort(_))));
    }

    #[test]
    fn path_validation() {
        assert!(SamplePath::new(vec![0.0, 1.0], vec![0.0], None).is_err());
        assert!(SamplePath::new(vec![0.0, 0.0], vec![0.0, 1.0], None).is_err());
    }

    #[test]
    fn constant_paths() {
        let p = SamplePath::new(grid(8).times(), vec![0.0; 9], None).unwrap();
        assert_eq!(last_passage_curve(&p, 1.0, 2.0), 0.0);
        assert_eq!(last_passage_curve(&p, 0.0, 2.0), 1.0);
        // Started on the curve: the bridge over the first step returns to it.
        let mut rng = SeedStream::new(0, 0).rng();
        assert_eq!(last_passage_curve_refined(&p, 1.0, 2.0, &mut rng), 0.0625);
        let below = SamplePath::new(grid(8).times(), vec![-1.0; 9], None).unwrap();
        assert_eq!(last_passage_curve_refined(&below, 1.0, 2.0, &mut rng), 0.0);
    }

    #[test]
    fn crossing_is_interpolated() {
        let p = SamplePath::new(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, -1.0], None).unwrap();
        assert!((last_passage_curve(&p, 0.0, 2.0) - 0.75).abs() < 1e-12);
        // curve √t crossed on the way down: 1 - 2(t-½)·2 = √t
        let t = last_passage_curve(&p, 1.0, 2.0);
        assert!((3.0 - 4.0 * t - t.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn crossing_through_a_jump_does_not_count() {
        let p = SamplePath::new(
            vec![0.0, 0.2, 0.6, 1.0],
            vec![0.5, -1.0, 3.0, 3.0],
            Some(vec![JumpRecord { time: 0.6, pre: -1.0, post: 3.0 }]),
        )
        .unwrap();
        // Sign change at the jump is skipped; the continuous fall across 0
        // during [0, 0.2] is found.
        let t = last_passage_curve(&p, 0.0, 2.0);
        assert!((t - 0.2 / 3.0).abs() < 1e-12, "{t}");
    }

    #[test]
    fn refined_catches_hidden_crossings() {
        // Both grid points above zero but very close: the bridge between them
        // crosses with probability exp(-2·1e-4·1e-4/0.5) ≈ 1.
        let p = SamplePath::new(vec![0.0, 0.5, 1.0], vec![-1.0, 1e-4, 1e-4], None).unwrap();
        let mut rng = SeedStream::new(0, 0).rng();
        assert_eq!(last_passage_curve_refined(&p, 0.0, 2.0, &mut rng), 0.75);
        let plain = last_passage_curve(&p, 0.0, 2.0);
        assert!(plain < 0.5);
    }

    #[test]
    fn subordinator_paths_are_monotone_with_jump_records() {
        for i in 0..20 {
            let p = sim_stable_subordinator(0.6, 2.0, 1e-5, SeedStream::new(11, i)).unwrap();
            assert!(p.is_non_decreasing());
            assert_eq!(p.horizon(), 2.0);
            for j in p.cadlag_jumps.as_ref().unwrap() {
                assert!(j.post > j.pre);
            }
        }
    }

    #[test]
    fn until_level_matches_passage() {
        let sub = Subordinator::new(0.5, 1e-6).unwrap();
        for i in 0..50 {
            let s = SeedStream::new(3, i);
            let path = sub.run(f64::INFINITY, Some(1.0), &mut s.rng());
            let (l, g) = last_passage_below(&path, 1.0).unwrap();
            let (l2, g2) = sub.passage(1.0, &mut s.rng());
            assert!((l - l2).abs() <= 1e-12 * l.max(1.0), "{l} {l2}");
            if g == 1.0 {
                assert!(g2 < 1.0 && g2 >= 1.0 - 1e-6, "{g2}");
            } else {
                assert!((g - g2).abs() <= 1e-12, "{g} {g2}");
            }
            assert!(path.terminal() >= 1.0);
        }
    }

    #[test]
    fn drift_passages_leave_no_atom_at_the_level() {
        let sub = Subordinator::new(0.7, 1e-4).unwrap();
        let mut rng = SeedStream::new(8, 0).rng();
        let gs: Vec<f64> = (0..2000).map(|_| sub.passage(1.0, &mut rng).1).collect();
        assert!(gs.iter().all(|&g| g < 1.0));
        let near = gs.iter().filter(|&&g| g > 1.0 - 1e-4).count();
        assert!(near > 0);
    }

    #[test]
    fn zoom_keeps_resolution_on_the_rescaled_segment() {
        let grid = GridSpec::new(1.0, 64).unwrap();
        for i in 0..200 {
            let mut rng = SeedStream::new(9, i).rng();
            let path = brownian_with(&grid, 0.0, &mut rng);
            let (z, g) = brownian_last_passage_zoom(path.clone(), 1.0, &mut rng);
            assert!(g > 0.0 && g <= 1.0);
            assert!(z.times.windows(2).all(|w| w[1] > w[0]));
            assert_eq!(z.times[z.len() - 1], 1.0);
            let inside = z.times.iter().filter(|&&t| t <= g).count();
            assert!(inside >= 32, "{g} {inside}");
            for (t, v) in path.times.iter().zip(&path.values) {
                let k = z.times.iter().position(|s| s == t).unwrap();
                assert_eq!(z.values[k], *v);
            }
        }
    }

    #[test]
    fn cutoff_too_large_is_flagged() {
        assert!(matches!(Subordinator::new(0.5, 0.1), Err(Error::CutoffTooLarge(_))));
        assert!(Subordinator::new(0.5, 1e-6).is_ok());
        let d = small_jump_drift(0.5, 1e-6).unwrap();
        // α ε^{1-α}/((1-α)Γ(1-α)) = 0.5·1e-3/(0.5·√π)
        assert!((d - 1e-3 / PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn kanter_variates_have_the_right_law() {
        let mut rng = SeedStream::new(5, 0).rng();
        let n = 20_000;
        let mut xs: Vec<f64> = (0..n).map(|_| one_sided_stable_variate(0.5, &mut rng)).collect();
        xs.sort_by(f64::total_cmp);
        let mut d: f64 = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            let f = stable_cdf(0.5, StableKind::OneSidedSubordinator, 1.0, x).unwrap();
            d = d.max((f - i as f64 / n as f64).abs()).max((f - (i + 1) as f64 / n as f64).abs());
        }
        assert!(d < 1.95 / (n as f64).sqrt(), "{d}");
    }

    #[test]
    fn squared_bessel_step_has_the_right_mean() {
        // E[Z_{t+h} | Z_t = z] = z + δh
        let mut rng = SeedStream::new(9, 0).rng();
        let (delta, z, h) = (2.5, 0.8, 0.3);
        let n = 40_000;
        let draws: Vec<f64> = (0..n).map(|_| sq_bessel_step(delta, z, h, &mut rng).unwrap()).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - (z + delta * h)).abs() < 4.0 * (var / n as f64).sqrt());
    }
}
