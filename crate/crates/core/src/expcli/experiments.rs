//! The eight experiments. Each returns its reports and sample tables; file
//! output is left to the runner.

use std::f64::consts::{FRAC_2_PI, PI};

use statrs::function::erf::erfc;
use statrs::function::gamma::gamma_lr;

use super::config::{Experiment, ExperimentConfig};
use super::report::{num, CsvTable};
use crate::bridges::{
    bessel_bridge_with, brownian_bridge_with, conditioned_with, pathwise_bridge_batch, window_conditioned_batch,
    BridgeSpec,
};
use crate::error::{Error, Result};
use crate::kernels::{
    bessel_p, bridge_rn_weight, brownian_p, geometric_t_grid, h_transform_h, ou_q, predicted_resolvent_exponent,
    resolvent_exponent_probe, KernelSpec,
};
use crate::parallel::{map_indexed, try_map_indexed};
use crate::pathsim::{GridSpec, ProcessSpec, SeedStream, Subordinator};
use crate::specfun::quadrature::{integrate, integrate_to_infinity, QuadratureConfig};
use crate::specfun::{
    beta_arcsine_cdf, gamma_fn, hermite_h, ln_gamma, ln_hermite_h, stable_cdf, stable_density, StableKind,
};
use crate::stats::{
    bin_counts, chi_square_binned, gc_samples, ks_one_sample, ks_two_sample, mean_se, moment_asymptotics_check,
    moment_report_from_samples, reflection_check, uniform_square_chi_square, MomentReport, StatReport, TabulatedCdf,
};

const ONE_SIDED: StableKind = StableKind::OneSidedSubordinator;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Outcome {
    pub tests: Vec<StatReport>,
    pub moments: Vec<MomentReport>,
    pub tables: Vec<CsvTable>,
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::VerifyBrownianBridge => brownian_bridge(cfg),
        Experiment::VerifyGcMoments => gc_moments(cfg),
        Experiment::VerifyArcsine => arcsine(cfg),
        Experiment::VerifySubordinator => subordinator(cfg),
        Experiment::VerifyBesselBridge => bessel_bridge(cfg),
        Experiment::VerifyWindowConvergence => window_convergence(cfg),
        Experiment::ProbeResolvent => probe_resolvent(cfg),
        Experiment::VerifyDensities => densities(cfg),
    }
}

fn streams(cfg: &ExperimentConfig, tag: u64) -> SeedStream {
    SeedStream::new(cfg.seed, 0).fork(tag)
}

fn normal_cdf(mean: f64, var: f64) -> impl Fn(f64) -> f64 {
    move |x| 0.5 * erfc(-(x - mean) / (2.0 * var).sqrt())
}

/// `|mean - target| / se`, to be compared with 3.
fn z_report(name: String, xs: &[f64], target: f64, reference: &str) -> Result<StatReport> {
    let (mean, se) = mean_se(xs)?;
    Ok(StatReport::new(name, (mean - target).abs() / se, vec![xs.len()], 3.0, reference)
        .detail("mean", mean)
        .detail("std_error", se)
        .detail("target", target))
}

fn quad_cfg() -> QuadratureConfig {
    QuadratureConfig {
        max_subdivisions: 4000,
        abs_tol: 1e-13,
        rel_tol: 1e-10,
    }
}

fn quad(f: impl FnMut(f64) -> f64, a: f64, b: f64, func: &'static str) -> Result<f64> {
    Ok(integrate(f, a, b, &quad_cfg()).map_err(|e| e.into_error(func))?.value)
}

fn quad_inf(f: impl FnMut(f64) -> f64, a: f64, func: &'static str) -> Result<f64> {
    Ok(integrate_to_infinity(f, a, &quad_cfg()).map_err(|e| e.into_error(func))?.value)
}

fn rejection_report(name: String, rejections: u64, attempts: u64) -> StatReport {
    StatReport::new(
        name,
        rejections as f64 / attempts.max(1) as f64,
        vec![attempts as usize],
        0.001,
        "fraction of paths with g_c = 0",
    )
    .detail("rejections", rejections)
}

fn brownian_bridge(cfg: &ExperimentConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let (cs, ss) = (p.list("c"), p.list("s"));
    let n = cfg.n_paths;
    let grid = GridSpec::new(1.0, cfg.grid_steps)?;
    let exact_grid = GridSpec::new(1.0, p.count("exact_steps"))?;
    let mut out = Outcome::default();
    let mut marginals = CsvTable::new(cfg.experiment, "bridge_marginals.csv");
    let mut passages = CsvTable::new(cfg.experiment, "pathwise_passages.csv");
    for (j, &c) in cs.iter().enumerate() {
        let batch = pathwise_bridge_batch(
            &ProcessSpec::Brownian,
            c,
            n,
            &grid,
            cfg.jump_cutoff,
            streams(cfg, 10 + j as u64),
            cfg.parallelism,
            |b| {
                let at: Vec<f64> = ss.iter().map(|&s| b.path.value_at(s)).collect();
                let pin = b.path.values[0].abs() + (b.path.terminal() - c).abs();
                (at, b.g, b.rejections, pin)
            },
        )?;
        let spec = BridgeSpec::new(0.0, c, 1.0)?;
        let exact_seed = streams(cfg, 20 + j as u64);
        let exact = map_indexed(n, cfg.parallelism, |i| {
            let b = brownian_bridge_with(&spec, &exact_grid, &mut exact_seed.with_index(i as u64).rng());
            let pin = b.values[0].abs() + (b.terminal() - c).abs();
            (ss.iter().map(|&s| b.value_at(s)).collect::<Vec<f64>>(), pin)
        })?;
        let pin = batch.items.iter().map(|r| r.3).chain(exact.iter().map(|r| r.1)).fold(0.0, f64::max);
        out.tests.push(StatReport::new(
            format!("endpoints c={c}"),
            pin,
            vec![2 * n],
            0.0,
            "every bridge starts at 0 and ends at c exactly",
        ));
        out.tests.push(
            rejection_report(format!("g-zero-frequency c={c}"), batch.rejections, batch.attempts)
                .detail("mean_g", batch.items.iter().map(|r| r.1).sum::<f64>() / n as f64),
        );
        let pw: Vec<&[f64]> = batch.items.iter().map(|r| r.0.as_slice()).collect();
        let ex: Vec<&[f64]> = exact.iter().map(|r| r.0.as_slice()).collect();
        let column = |rows: &[&[f64]], k: usize| -> Vec<f64> { rows.iter().map(|r| r[k]).collect() };
        for (k, &s) in ss.iter().enumerate() {
            let (a, b) = (column(&pw, k), column(&ex, k));
            let law = normal_cdf(c * s, s * (1.0 - s));
            out.tests.push(ks_two_sample(&a, &b)?.named(
                format!("pathwise-vs-exact c={c} s={s}"),
                "two-sample KS against the exact bridge x + B_s - (s/t)B_t + (y-x)s/t",
            ));
            out.tests.push(
                ks_one_sample(&b, &law)?.named(format!("exact-marginal c={c} s={s}"), "N(cs, s(1-s))"),
            );
            out.tests.push(
                ks_one_sample(&a, &law)?.named(format!("pathwise-marginal c={c} s={s}"), "N(cs, s(1-s))"),
            );
        }
        if ss.len() >= 2 {
            let (s1, s2) = (ss[0].min(ss[1]), ss[0].max(ss[1]));
            let (k1, k2) = if ss[0] <= ss[1] { (0, 1) } else { (1, 0) };
            for (label, rows) in [("pathwise", &pw), ("exact", &ex)] {
                let prod: Vec<f64> = rows.iter().map(|r| (r[k1] - c * s1) * (r[k2] - c * s2)).collect();
                out.tests.push(z_report(
                    format!("{label}-covariance c={c} s={s1},{s2}"),
                    &prod,
                    s1 * (1.0 - s2),
                    "bridge covariance s(1-u) for s ≤ u",
                )?);
            }
        }
        for i in 0..n.min(cfg.csv_limit) {
            for (label, row) in [("pathwise", pw[i]), ("exact", ex[i])] {
                for (k, &s) in ss.iter().enumerate() {
                    marginals.push(vec![i.to_string(), num(c), label.into(), num(s), num(row[k])]);
                }
            }
            passages.push(vec![i.to_string(), num(c), num(batch.items[i].1), batch.items[i].2.to_string()]);
        }
    }
    out.tables = vec![marginals, passages];
    Ok(out)
}

/// `E(1-g_0)^q` under the arcsine law, `Γ(q+1/2) / (√π Γ(q+1))`.
fn arcsine_moment(q: f64) -> Result<f64> {
    Ok((ln_gamma(q + 0.5)? - 0.5 * PI.ln() - ln_gamma(q + 1.0)?).exp())
}

fn gc_moments(cfg: &ExperimentConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let (cs, qs) = (p.list("c"), p.list("q"));
    let grid = GridSpec::new(1.0, cfg.grid_steps)?;
    let samples = gc_samples(cs, cfg.n_paths, &grid, streams(cfg, 1), cfg.parallelism)?;
    let mut out = Outcome::default();
    for (j, &c) in cs.iter().enumerate() {
        let zeros = samples.fine[j].iter().filter(|&&g| g == 0.0).count() as u64;
        out.tests.push(rejection_report(format!("g-zero-frequency c={c}"), zeros, cfg.n_paths as u64));
        for &q in qs {
            let m = moment_report_from_samples(c, q, &samples.fine[j], &samples.coarse[j])?;
            if c == 0.0 {
                let exact = arcsine_moment(q)?;
                out.tests.push(
                    StatReport::new(
                        format!("predicted-closed-form c=0 q={q}"),
                        (m.predicted - exact).abs() / exact,
                        vec![],
                        1e-10,
                        "arcsine moment Γ(q+1/2)/(√π Γ(q+1))",
                    )
                    .detail("predicted", m.predicted)
                    .detail("closed_form", exact),
                );
                out.tests.push(reflection_check(c, q, &samples.fine[j])?);
            }
            out.moments.push(m);
        }
        out.tests.push(moment_asymptotics_check(c, p.list("asymptotic_q"))?);
    }
    let mut t = CsvTable::new(cfg.experiment, "gc_samples.csv");
    for i in 0..cfg.n_paths.min(cfg.csv_limit) {
        for (j, &c) in cs.iter().enumerate() {
            t.push(vec![i.to_string(), num(c), num(samples.fine[j][i]), num(samples.coarse[j][i])]);
        }
    }
    out.tables = vec![t];
    Ok(out)
}

fn passages(cfg: &ExperimentConfig, alpha: f64, b: f64, tag: u64) -> Result<Vec<(f64, f64)>> {
    let sub = Subordinator::new(alpha, cfg.jump_cutoff)?;
    let seed = streams(cfg, tag);
    map_indexed(cfg.n_paths, cfg.parallelism, |i| sub.passage(b, &mut seed.with_index(i as u64).rng()))
}

/// `P(L ≤ l | g = x)` for level 1: `∫_0^l f_s(x) ds / u(x)`.
fn passage_time_cdf(alpha: f64, l: f64, x: f64) -> Result<f64> {
    if alpha == 0.5 {
        return Ok(-(-l * l / (4.0 * x)).exp_m1());
    }
    let u = x.powf(alpha - 1.0) / gamma_fn(alpha)?;
    let f = |s: f64| stable_density(alpha, ONE_SIDED, s, x).unwrap_or(0.0);
    Ok((quad(f, 0.0, l, "passage_time_cdf")? / u).min(1.0))
}

fn arcsine(cfg: &ExperimentConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let b = p.number("b");
    let n = cfg.n_paths;
    let mut out = Outcome::default();
    let mut brownian = CsvTable::new(cfg.experiment, "brownian_g0.csv");
    if p.flag("brownian") {
        let grid = GridSpec::new(1.0, cfg.grid_steps)?;
        let g = gc_samples(&[0.0], n, &grid, streams(cfg, 1), cfg.parallelism)?.fine.remove(0);
        let zeros = g.iter().filter(|&&v| v == 0.0).count() as u64;
        out.tests.push(rejection_report("g-zero-frequency brownian".into(), zeros, n as u64));
        out.tests.push(
            ks_one_sample(&g, |x| FRAC_2_PI * x.clamp(0.0, 1.0).sqrt().asin())?
                .named("brownian-g0-arcsine", "(2/π) arcsin √x"),
        );
        for (i, v) in g.iter().enumerate().take(cfg.csv_limit) {
            brownian.push(vec![i.to_string(), num(*v)]);
        }
    }
    let mut table = CsvTable::new(cfg.experiment, "subordinator_passages.csv");
    let joint_alpha = p.number("joint_alpha");
    let mut joint = None;
    for (j, &alpha) in p.list("alpha").iter().enumerate() {
        let rows = passages(cfg, alpha, b, 100 + j as u64)?;
        let x: Vec<f64> = rows.iter().map(|r| r.1 / b).collect();
        out.tests.push(
            ks_one_sample(&x, |v| beta_arcsine_cdf(alpha, v.clamp(0.0, 1.0)).unwrap_or(f64::NAN))?
                .named(format!("subordinator-g-arcsine alpha={alpha}"), "generalized arcsine law with parameter alpha"),
        );
        for (i, r) in rows.iter().enumerate().take(cfg.csv_limit) {
            table.push(vec![num(alpha), i.to_string(), num(r.0), num(r.1)]);
        }
        if alpha == joint_alpha {
            joint = Some(rows);
        }
    }
    let joint = match joint {
        Some(rows) => rows,
        None => passages(cfg, joint_alpha, b, 200)?,
    };
    // Level b is level 1 rescaled: (L, g) = (b^α L_1, b g_1).
    let time = b.powf(-joint_alpha);
    let pit = try_map_indexed(joint.len(), cfg.parallelism, |i| {
        let (l, g) = joint[i];
        let x = g / b;
        Ok((beta_arcsine_cdf(joint_alpha, x)?, passage_time_cdf(joint_alpha, l * time, x)?))
    })?;
    out.tests.push(
        uniform_square_chi_square(&pit, p.count("joint_bins"))?.named(
            format!("joint-L-g alpha={joint_alpha}"),
            "joint density f_s(x)/(Γ(1-α)(1-x)^α), via the probability integral transform",
        ),
    );
    out.tables = vec![brownian, table];
    Ok(out)
}

/// `P(ζ ≤ t)` for death level `b`: closed form at α = 1/2, else tabulated
/// from `f_t(b)/h(0)`. Also returns the tabulated mass (should be 1).
fn death_time_cdf(alpha: f64, b: f64) -> Result<(Box<dyn Fn(f64) -> f64 + Sync>, f64)> {
    let h0 = h_transform_h(alpha, b, 0.0)?;
    let hi = 50.0 * b.powf(alpha);
    let tab = TabulatedCdf::from_density(
        |t| if t > 0.0 { stable_density(alpha, ONE_SIDED, t, b).unwrap_or(0.0) / h0 } else { 0.0 },
        0.0,
        hi,
        2000,
    )?;
    let mass = tab.mass;
    if alpha == 0.5 {
        Ok((Box::new(move |t: f64| -(-t * t / (4.0 * b)).exp_m1()), mass))
    } else {
        Ok((Box::new(move |t| tab.eval(t)), mass))
    }
}

/// `P(Y_{t/2} ≤ z | ζ = t)`, from the bridge density `∝ f_{t/2}(z) f_{t/2}(b-z)`.
fn bridge_midpoint_cdf(alpha: f64, b: f64, t: f64, z: f64) -> Result<f64> {
    let h = 0.5 * t;
    let ln_f = |x: f64| -> f64 {
        if alpha == 0.5 {
            // ln of h x^{-3/2} e^{-h²/(4x)}, constants dropped
            -1.5 * x.ln() - h * h / (4.0 * x)
        } else {
            stable_density(alpha, ONE_SIDED, h, x).map(f64::ln).unwrap_or(f64::NEG_INFINITY)
        }
    };
    // Normalize by the value at the midpoint to keep the integrand in range.
    let shift = 2.0 * ln_f(0.5 * b);
    let f = |x: f64| {
        if x <= 0.0 || x >= b {
            0.0
        } else {
            (ln_f(x) + ln_f(b - x) - shift).exp()
        }
    };
    let mid = 0.5 * b;
    let left = quad(f, 0.0, mid, "bridge_midpoint_cdf")?;
    let total = left + quad(f, mid, b, "bridge_midpoint_cdf")?;
    let part = if z <= mid {
        quad(f, 0.0, z.max(0.0), "bridge_midpoint_cdf")?
    } else {
        left + quad(f, mid, z.min(b), "bridge_midpoint_cdf")?
    };
    Ok(part / total)
}

fn subordinator(cfg: &ExperimentConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let (alpha, b, b2) = (p.number("alpha"), p.number("b"), p.number("scaled_b"));
    let n = cfg.n_paths;
    let sub = Subordinator::new(alpha, cfg.jump_cutoff)?;
    let seed = streams(cfg, 1);
    let rows = try_map_indexed(n, cfg.parallelism, |i| {
        let k = conditioned_with(&sub, b, &mut seed.with_index(i as u64).rng())?;
        let ok = k.path.terminal() == b && k.left_limit == b && k.path.is_non_decreasing() && k.path.values[0] == 0.0;
        Ok((k.death_time, k.path.value_at(0.5 * k.death_time), ok))
    })?;
    let mut out = Outcome::default();
    let bad = rows.iter().filter(|r| !r.2).count();
    out.tests.push(StatReport::new(
        "killed-path-shape",
        bad as f64,
        vec![n],
        0.0,
        "paths start at 0, are non-decreasing and reach b at the death time",
    ));
    let zeta: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let (cdf, mass) = death_time_cdf(alpha, b)?;
    out.tests.push(
        StatReport::new(
            format!("death-time-normalization alpha={alpha}"),
            (mass - 1.0).abs(),
            vec![],
            1e-4,
            "∫ f_t(b)/h(0) dt = 1",
        )
        .detail("mass", mass),
    );
    let reference = if alpha == 0.5 {
        "1 - exp(-t²/(4b))".to_string()
    } else {
        "tabulated f_t(b)/h(0)".to_string()
    };
    out.tests.push(ks_one_sample(&zeta, &cdf)?.named(format!("death-time alpha={alpha} b={b}"), reference));

    let m = p.count("bridge_samples");
    let pit = try_map_indexed(m, cfg.parallelism, |i| bridge_midpoint_cdf(alpha, b, rows[i].0, rows[i].1))?;
    out.tests.push(ks_one_sample(&pit, |u| u.clamp(0.0, 1.0))?.named(
        "bridge-midpoint",
        "given ζ = t, Y_{t/2} has density ∝ f_{t/2}(z) f_{t/2}(b-z) (probability integral transform)",
    ));

    let seed2 = streams(cfg, 2);
    let zeta2: Vec<f64> = map_indexed(n, cfg.parallelism, |i| {
        let (l, g) = sub.passage(b2, &mut seed2.with_index(i as u64).rng());
        l * (b2 / g).powf(alpha)
    })?;
    let factor = (b2 / b).powf(alpha);
    let scaled: Vec<f64> = zeta.iter().map(|z| z * factor).collect();
    out.tests.push(ks_two_sample(&zeta2, &scaled)?.named(
        format!("death-time-scaling b={b2}"),
        "ζ at level b' has the law of (b'/b)^α ζ at level b",
    ));

    let mut deaths = CsvTable::new(cfg.experiment, "death_times.csv");
    for (i, z) in zeta.iter().enumerate().take(cfg.csv_limit) {
        deaths.push(vec![num(b), i.to_string(), num(*z)]);
    }
    for (i, z) in zeta2.iter().enumerate().take(cfg.csv_limit) {
        deaths.push(vec![num(b2), i.to_string(), num(*z)]);
    }
    let mut mids = CsvTable::new(cfg.experiment, "bridge_midpoints.csv");
    for (i, u) in pit.iter().enumerate().take(cfg.csv_limit) {
        mids.push(vec![i.to_string(), num(rows[i].0), num(rows[i].1), num(*u)]);
    }
    out.tables = vec![deaths, mids];
    Ok(out)
}

fn bessel_bridge(cfg: &ExperimentConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let (y, t) = (p.number("y"), p.number("t"));
    let us = p.list("u");
    let n = cfg.n_paths;
    let grid = GridSpec::new(t, cfg.grid_steps)?;
    let mut out = Outcome::default();
    let mut marg = CsvTable::new(cfg.experiment, "bessel_bridge_marginals.csv");
    for (j, &delta) in p.list("delta").iter().enumerate() {
        let seed = streams(cfg, 10 + j as u64);
        let rows = try_map_indexed(n, cfg.parallelism, |i| {
            let b = bessel_bridge_with(delta, y, t, &grid, &mut seed.with_index(i as u64).rng())?;
            let pin = b.values[0].abs() + (b.terminal() - y).abs();
            let neg = b.values.iter().any(|v| *v < 0.0);
            Ok((us.iter().map(|&u| b.value_at(u * t)).collect::<Vec<f64>>(), pin, neg))
        })?;
        let pin = rows.iter().map(|r| r.1).fold(0.0, f64::max);
        let neg = rows.iter().filter(|r| r.2).count();
        out.tests.push(
            StatReport::new(
                format!("endpoints delta={delta}"),
                pin + neg as f64,
                vec![n],
                0.0,
                "bridge starts at 0, ends at y and stays ≥ 0",
            )
            .detail("negative_paths", neg),
        );
        let zmax = y + 8.0 * (t * (delta + 4.0)).sqrt();
        for (k, &u) in us.iter().enumerate() {
            let s = u * t;
            let density = |z: f64| {
                if z <= 0.0 {
                    return 0.0;
                }
                bessel_p(delta, s, 0.0, z).unwrap_or(0.0) * bessel_p(delta, t - s, z, y).unwrap_or(0.0)
            };
            let tab = TabulatedCdf::from_density_clustered(density, 0.0, zmax, 1000)?;
            let xs: Vec<f64> = rows.iter().map(|r| r.0[k]).collect();
            out.tests.push(ks_one_sample(&xs, |z| tab.eval(z))?.named(
                format!("bridge-marginal delta={delta} u={u}"),
                "density ∝ p_s(0,z) p_{t-s}(z,y) from the Bessel kernel",
            ));
            for (i, v) in xs.iter().enumerate().take(cfg.csv_limit) {
                marg.push(vec![num(delta), i.to_string(), num(u), num(*v)]);
            }
        }
    }
    let mut term = CsvTable::new(cfg.experiment, "bessel_terminal.csv");
    let coarse = GridSpec::new(1.0, 2)?;
    for (j, &delta) in p.list("sim_delta").iter().enumerate() {
        let family = ProcessSpec::Bessel { delta };
        let seed = streams(cfg, 50 + j as u64);
        let x1 = try_map_indexed(n, cfg.parallelism, |i| {
            Ok(family.simulate(&coarse, 0.0, cfg.jump_cutoff, &mut seed.with_index(i as u64).rng())?.terminal())
        })?;
        // X_1² is χ² with δ degrees of freedom.
        out.tests.push(
            ks_one_sample(&x1, |z| if z > 0.0 { gamma_lr(0.5 * delta, 0.5 * z * z) } else { 0.0 })?
                .named(format!("simulator-marginal delta={delta}"), "P(χ²_δ ≤ y²)"),
        );
        if delta == 2.0 {
            out.tests.push(
                ks_one_sample(&x1, |z| -(-0.5 * z.max(0.0) * z.max(0.0)).exp_m1())?
                    .named("simulator-marginal-closed-form delta=2", "1 - exp(-y²/2)"),
            );
        }
        let sq: Vec<f64> = x1.iter().map(|x| x * x).collect();
        out.tests.push(z_report(format!("simulator-second-moment delta={delta}"), &sq, delta, "E X_1² = δ")?);
        for (i, v) in x1.iter().enumerate().take(cfg.csv_limit) {
            term.push(vec![num(delta), i.to_string(), num(*v)]);
        }
    }
    out.tables = vec![marg, term];
    Ok(out)
}

fn window_convergence(cfg: &ExperimentConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let (x, y, t) = (p.number("x"), p.number("y"), p.number("t"));
    let s = p.number("s") * t;
    let spec = BridgeSpec::new(x, y, t)?;
    let grid = GridSpec::new(t, cfg.grid_steps)?;
    let k = (p.number("s") * cfg.grid_steps as f64).round() as usize;
    let family = ProcessSpec::Brownian;
    let budget = p.number("max_attempts") as u64;
    let target = x + (y - x) * s / t;
    let p_t = brownian_p(t, x, y)?;
    let mut out = Outcome::default();
    let mut table = CsvTable::new(cfg.experiment, "window_samples.csv");

    let mut deltas = p.list("deltas").to_vec();
    deltas.sort_by(|a, b| b.total_cmp(a));
    let mut rb_dev = Vec::new();
    for (j, &delta) in deltas.iter().enumerate() {
        let w = window_conditioned_batch(
            &family,
            &spec,
            delta,
            cfg.n_paths,
            &grid,
            budget,
            streams(cfg, 10 + j as u64),
            cfg.parallelism,
            |path| (path.values[k], path.terminal()),
        )?;
        let xs: Vec<f64> = w.items.iter().map(|r| r.0).collect();
        out.tests.push(
            z_report(format!("window-mean delta={delta}"), &xs, target, "bridge mean x + (y-x)s/t")?
                .detail("attempts", w.attempts)
                .detail("acceptance_rate", w.acceptance_rate),
        );
        // E[X_s | X_t] = x + (X_t - x) s/t removes the bridge noise.
        let rb: Vec<f64> = w.items.iter().map(|r| x + (r.1 - x) * s / t).collect();
        let (rb_mean, rb_se) = mean_se(&rb)?;
        rb_dev.push((delta, (rb_mean - target).abs(), rb_se));
        if delta == p.number("rate_delta") {
            let predicted = 2.0 * delta * p_t;
            out.tests.push(
                StatReport::new(
                    format!("acceptance-rate delta={delta}"),
                    (w.acceptance_rate / predicted - 1.0).abs(),
                    vec![w.attempts as usize],
                    0.1,
                    "2δ p_t(x, y)",
                )
                .detail("rate", w.acceptance_rate)
                .detail("predicted", predicted),
            );
        }
        for (i, r) in w.items.iter().enumerate().take(cfg.csv_limit) {
            table.push(vec![num(delta), i.to_string(), num(r.0), num(r.1)]);
        }
    }
    let worst = rb_dev.windows(2).map(|w| w[1].1 - w[0].1).fold(0.0, f64::max);
    let devs: Vec<serde_json::Value> = rb_dev.iter().map(|d| serde_json::json!([d.0, d.1, d.2])).collect();
    out.tests.push(
        StatReport::new(
            "deviation-non-increasing",
            worst,
            vec![cfg.n_paths; rb_dev.len()],
            0.0,
            "|E[x + (X_t - x)s/t] - bridge mean| does not grow as δ shrinks",
        )
        .detail("delta_deviation_se", devs),
    );

    let rn_delta = p.number("rn_delta");
    let rn = window_conditioned_batch(
        &family,
        &spec,
        rn_delta,
        p.count("rn_samples"),
        &grid,
        budget,
        streams(cfg, 2),
        cfg.parallelism,
        |path| path.values[k],
    )?;
    let kernel = KernelSpec::Brownian;
    let density = |z: f64| brownian_p(s, x, z).unwrap_or(0.0) * bridge_rn_weight(&kernel, s, t, x, y, z).unwrap_or(0.0);
    let sd = (s * (t - s) / t).sqrt();
    let bins = p.count("rn_bins");
    let (lo, hi) = (target - 4.0 * sd, target + 4.0 * sd);
    let edges: Vec<f64> = (0..=bins).map(|i| lo + (hi - lo) * i as f64 / bins as f64).collect();
    let mut probs = Vec::with_capacity(bins);
    for i in 0..bins {
        let a = if i == 0 { lo - 20.0 * sd } else { edges[i] };
        let b = if i + 1 == bins { hi + 20.0 * sd } else { edges[i + 1] };
        probs.push(quad(density, a, b, "window_convergence")?);
    }
    out.tests.push(chi_square_binned(&bin_counts(&rn.items, &edges), &probs)?.named(
        format!("rn-weight-histogram delta={rn_delta}"),
        "density p_s(x,z) p_{t-s}(z,y) / p_t(x,y)",
    ));

    let mseed = streams(cfg, 3);
    let rows = try_map_indexed(cfg.n_paths, cfg.parallelism, |i| {
        let path = family.simulate(&grid, x, cfg.jump_cutoff, &mut mseed.with_index(i as u64).rng())?;
        let xs = path.values[k];
        Ok((xs, bridge_rn_weight(&kernel, s, t, x, y, xs)?))
    })?;
    let weights: Vec<f64> = rows.iter().map(|r| r.1).collect();
    out.tests.push(z_report("rn-weight-mean".into(), &weights, 1.0, "E M_s = 1 under the unconditioned law")?);
    let mut mart = CsvTable::new(cfg.experiment, "rn_martingale.csv");
    for (i, r) in rows.iter().enumerate().take(cfg.csv_limit) {
        mart.push(vec![i.to_string(), num(r.0), num(r.1)]);
    }
    out.tables = vec![table, mart];
    Ok(out)
}

fn probe_resolvent(cfg: &ExperimentConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let grid = geometric_t_grid(p.number("t_max"), p.number("t_min"), p.count("points"));
    let tol = p.number("tolerance");
    let mut out = Outcome::default();
    let mut table = CsvTable::new(cfg.experiment, "resolvent_curves.csv");
    for &[alpha, x] in p.pairs("cases") {
        let slope = resolvent_exponent_probe(alpha, x, &grid)?;
        let predicted = predicted_resolvent_exponent(alpha, x);
        out.tests.push(
            StatReport::new(
                format!("resolvent-slope alpha={alpha} x={x}"),
                (slope - predicted).abs(),
                vec![grid.len()],
                tol,
                "small-t exponent of q_t(x, x)",
            )
            .detail("slope", slope)
            .detail("predicted", predicted),
        );
        for &t in &grid {
            table.push(vec![num(alpha), num(x), num(t), num(ou_q(alpha, t, x, x)?)]);
        }
    }
    out.tables = vec![table];
    Ok(out)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn max_report(name: &str, values: &[f64], threshold: f64, reference: &str) -> StatReport {
    let worst = values.iter().copied().fold(0.0, |m: f64, v| if v.is_nan() { f64::NAN } else { m.max(v) });
    StatReport::new(name, worst, vec![values.len()], threshold, reference)
}

fn hermite_suite(out: &mut Outcome, table: &mut CsvTable) -> Result<()> {
    let orders: Vec<f64> = (1..=12).map(|i| 0.5 * i as f64).collect();
    let xs: Vec<f64> = (0..=12).map(|i| -3.0 + 0.5 * i as f64).collect();
    let (mut rec, mut der) = (Vec::new(), Vec::new());
    let h = 1e-4;
    for &q in &orders {
        for &x in &xs {
            let (h0, h1, h2) = (hermite_h(q, x)?, hermite_h(q + 1.0, x)?, hermite_h(q + 2.0, x)?);
            let rhs = q * h0 - x * h1;
            rec.push((h2 - rhs).abs() / (1.0 + h2.abs()));
            table.push(vec!["recurrence".into(), num(q), num(x), num(h2), num(rhs)]);
            let fd = (hermite_h(q, x + h)? - hermite_h(q, x - h)?) / (2.0 * h);
            der.push(rel(fd, -h1));
            table.push(vec!["derivative".into(), num(q), num(x), num(fd), num(-h1)]);
        }
    }
    out.tests.push(max_report("hermite-recurrence", &rec, 1e-8, "H_{q+2} = q H_q - x H_{q+1}"));
    out.tests.push(max_report("hermite-derivative", &der, 1e-6, "H_q' = -H_{q+1}, central difference"));

    let (mut wr, mut printed) = (Vec::new(), Vec::new());
    for &q in &[1.0, 2.0, 4.0] {
        let w0 = 2.0 * hermite_h(q, 0.0)? * hermite_h(q + 1.0, 0.0)?;
        for &c in &[0.5, 1.0, 2.0] {
            let w = hermite_h(q, c)? * hermite_h(q + 1.0, -c)? + hermite_h(q, -c)? * hermite_h(q + 1.0, c)?;
            let expected = w0 * (0.5 * c * c).exp();
            wr.push(rel(w, expected));
            printed.push(serde_json::json!([q, c, w / (w0 * (-0.5 * c * c).exp())]));
            table.push(vec!["wronskian".into(), num(q), num(c), num(w), num(expected)]);
        }
    }
    out.tests.push(
        max_report("hermite-wronskian", &wr, 1e-8, "W(c) = W(0) e^{+c²/2}, W(0) = 2 H_q(0) H_{q+1}(0)")
            .detail("ratio_to_w0_exp_minus_c2_over_2", printed),
    );

    let mut zero = Vec::new();
    for i in 1..=48 {
        let q = 0.25 * i as f64;
        let v = hermite_h(q, 0.0)?;
        let closed = 2f64.powf(0.5 * q - 1.0) * gamma_fn(0.5 * q)?;
        zero.push(rel(v, closed));
        table.push(vec!["value-at-zero".into(), num(q), "0".into(), num(v), num(closed)]);
    }
    out.tests.push(max_report("hermite-at-zero", &zero, 1e-10, "H_q(0) = 2^{q/2-1} Γ(q/2)"));

    let (mut asym, mut printed) = (Vec::new(), Vec::new());
    let q: f64 = 400.0;
    for &x in &[0.0, 1.0] {
        // Laplace's method at z = √q - x/2: √π q^{(q-1)/2} e^{-x√q - q/2 + x²/4}.
        let ln_ref = 0.5 * PI.ln() + 0.5 * (q - 1.0) * q.ln() - x * q.sqrt() - 0.5 * q + 0.25 * x * x;
        let ln_h = ln_hermite_h(q, x)?;
        let ratio = (ln_h - ln_ref).exp();
        asym.push((ratio - 1.0).abs());
        let ln_short = 0.5 * PI.ln() + 0.5 * q * q.ln() - x * q.sqrt() - 0.5 * q;
        printed.push(serde_json::json!([x, (ln_h - ln_short).exp()]));
        table.push(vec!["asymptotic-ratio".into(), num(q), num(x), num(ratio), "1".into()]);
    }
    out.tests.push(
        max_report(
            "hermite-asymptotic",
            &asym,
            0.1,
            "H_q(x) ~ √π q^{(q-1)/2} e^{-x√q - q/2 + x²/4} at q = 400",
        )
        .detail("ratio_to_sqrt_pi_q_half_q_exp", printed),
    );
    Ok(())
}

fn ck_residual(kernel: KernelSpec, t: f64, s: f64, x: f64, y: f64, lower: f64) -> Result<f64> {
    let direct = kernel.density(t, x, y)?;
    let f = |z: f64| kernel.density(t - s, x, z).unwrap_or(0.0) * kernel.density(s, z, y).unwrap_or(0.0);
    let mid = 0.5 * (x + y);
    let composed = quad(f, lower, mid, "chapman_kolmogorov")? + quad_inf(f, mid, "chapman_kolmogorov")?;
    Ok((direct - composed).abs())
}

fn kernel_suite(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let p = &cfg.params;
    let deltas = p.list("bessel_delta");
    let points = [(0.3, 0.0), (1.0, 1.5), (2.5, 0.2)];
    let mut norm = Vec::new();
    for &(t, x) in &points {
        norm.push((quad(|y| brownian_p(t, x, y).unwrap_or(0.0), x - 40.0, x + 40.0, "normalization")? - 1.0).abs());
        for &delta in deltas {
            let f = |y: f64| bessel_p(delta, t, x, y).unwrap_or(0.0);
            let total = quad(f, 0.0, x + 1.0, "normalization")? + quad_inf(f, x + 1.0, "normalization")?;
            norm.push((total - 1.0).abs());
        }
    }
    out.tests.push(max_report("kernel-normalization", &norm, 1e-6, "∫ p_t(x, y) dy = 1, Brownian and Bessel"));

    let mut ck = Vec::new();
    for &t in &[0.5, 1.0, 2.0] {
        for &frac in &[0.25, 0.5, 0.75] {
            for &y in &[0.3, 1.0, 2.2] {
                ck.push(ck_residual(KernelSpec::Brownian, t, frac * t, 0.4, y, -60.0)?);
                for &delta in deltas {
                    ck.push(ck_residual(KernelSpec::Bessel { delta }, t, frac * t, 0.4, y, 0.0)?);
                }
            }
        }
    }
    out.tests.push(max_report("chapman-kolmogorov", &ck, 1e-4, "p_t = ∫ p_{t-s}(x, z) p_s(z, y) dz on a 3×3×3 grid"));

    let mut death = Vec::new();
    for &alpha in p.list("subordinator_alpha") {
        let h0 = h_transform_h(alpha, 1.0, 0.0)?;
        let f = |t: f64| stable_density(alpha, ONE_SIDED, t, 1.0).unwrap_or(0.0) / h0;
        death.push((quad(f, 0.0, 1.0, "death_time")? + quad_inf(f, 1.0, "death_time")? - 1.0).abs());
    }
    out.tests.push(max_report("death-time-normalization", &death, 1e-6, "∫ f_t(b)/h(0) dt = 1"));

    let (mut snorm, mut scaling) = (Vec::new(), Vec::new());
    let kinds = p
        .list("stable_alpha")
        .iter()
        .map(|&a| (a, StableKind::SymmetricTwoSided))
        .chain(p.list("subordinator_alpha").iter().map(|&a| (a, ONE_SIDED)));
    for (alpha, kind) in kinds {
        let f = |x: f64| stable_density(alpha, kind, 1.0, x).unwrap_or(f64::NAN);
        let total = match kind {
            StableKind::SymmetricTwoSided => 2.0 * (quad(f, 0.0, 1.0, "stable")? + quad_inf(f, 1.0, "stable")?),
            StableKind::OneSidedSubordinator => quad(f, 0.0, 1.0, "stable")? + quad_inf(f, 1.0, "stable")?,
        };
        snorm.push((total - 1.0).abs());
        for &(t, x) in &[(0.3, 0.7), (2.0, 1.3), (5.0, 4.0)] {
            let lhs = stable_density(alpha, kind, t, x)? * t.powf(1.0 / alpha);
            scaling.push(rel(lhs, stable_density(alpha, kind, 1.0, x * t.powf(-1.0 / alpha))?));
        }
    }
    out.tests.push(max_report("stable-normalization", &snorm, 1e-6, "∫ f_1 = 1"));
    out.tests.push(max_report("stable-scaling", &scaling, 1e-8, "f_t(x) t^{1/α} = f_1(x t^{-1/α})"));
    Ok(())
}

fn densities(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    let mut identities = CsvTable::new(cfg.experiment, "hermite_identities.csv");
    hermite_suite(&mut out, &mut identities)?;
    kernel_suite(cfg, &mut out)?;

    let p = &cfg.params;
    let (alpha, q) = (p.number("laplace_alpha"), p.number("laplace_q"));
    let sub = Subordinator::new(alpha, cfg.jump_cutoff)?;
    let seed = streams(cfg, 1);
    let x1 = map_indexed(cfg.n_paths, cfg.parallelism, |i| {
        sub.run(1.0, None, &mut seed.with_index(i as u64).rng()).terminal()
    })?;
    let e: Vec<f64> = x1.iter().map(|x| (-q * x).exp()).collect();
    out.tests.push(z_report(
        format!("laplace-transform alpha={alpha} q={q}"),
        &e,
        (-q.powf(alpha)).exp(),
        "E e^{-q X_1} = e^{-q^α}",
    )?);
    out.tests.push(
        ks_one_sample(&x1, |x| if x > 0.0 { stable_cdf(alpha, ONE_SIDED, 1.0, x).unwrap_or(f64::NAN) } else { 0.0 })?
            .named(format!("subordinator-marginal alpha={alpha}"), "one-sided stable distribution function"),
    );
    let mut samples = CsvTable::new(cfg.experiment, "laplace_samples.csv");
    for (i, x) in x1.iter().enumerate().take(cfg.csv_limit) {
        samples.push(vec![i.to_string(), num(*x)]);
    }
    out.tables = vec![identities, samples];
    Ok(out)
}

/// Fails on any internal inconsistency between an outcome and the schema.
pub(crate) fn check_tables(experiment: Experiment, out: &Outcome) -> Result<()> {
    let declared = super::report::csv_schema(experiment);
    for t in &out.tables {
        let Some((_, s)) = declared.iter().find(|(f, _)| *f == t.file) else {
            return Err(Error::Io(format!("{} is not in the csv schema", t.file)));
        };
        if s.columns != t.columns || t.rows.iter().any(|r| r.len() != s.columns.len()) {
            return Err(Error::Io(format!("{} does not match its schema", t.file)));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(e: Experiment) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(e);
        cfg.n_paths = 2000;
        if cfg.grid_steps > 256 {
            cfg.grid_steps = 256;
        }
        cfg.csv_limit = 5;
        cfg
    }

    #[test]
    fn arcsine_moments_are_exact() {
        assert!((arcsine_moment(1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((arcsine_moment(2.0).unwrap() - 0.375).abs() < 1e-15);
    }

    #[test]
    fn half_stable_conditional_cdfs() {
        // Generic quadrature against the α = 1/2 closed form.
        let l = 0.8;
        let x: f64 = 0.6;
        let u = x.powf(-0.5) / gamma_fn(0.5).unwrap();
        let f = |s: f64| stable_density(0.5, ONE_SIDED, s, x).unwrap();
        let generic = quad(f, 0.0, l, "t").unwrap() / u;
        assert!((generic - passage_time_cdf(0.5, l, x).unwrap()).abs() < 1e-9);
        assert!(bridge_midpoint_cdf(0.5, 1.0, 1.0, 0.5).unwrap() - 0.5 < 1e-12);
        let a = bridge_midpoint_cdf(0.5, 1.0, 0.7, 0.3).unwrap();
        let b = bridge_midpoint_cdf(0.7, 1.0, 0.7, 0.3).unwrap();
        assert!(a > 0.0 && a < 0.5 && b > 0.0 && b < 0.5);
    }

    #[test]
    fn small_runs_produce_schema_tables() {
        for e in [
            Experiment::VerifyGcMoments,
            Experiment::VerifyArcsine,
            Experiment::VerifyWindowConvergence,
            Experiment::ProbeResolvent,
        ] {
            let mut cfg = small(e);
            if e == Experiment::VerifyWindowConvergence {
                cfg.n_paths = 300;
                cfg.params.set("rn_samples", super::super::config::ParamValue::Number(300.0));
            }
            let out = run(&cfg).unwrap();
            check_tables(e, &out).unwrap();
            assert!(!out.tests.is_empty());
        }
    }
}
