//! Densities of strictly stable laws.
//!
//! Normalization: the symmetric law has characteristic function
//! `exp(-t|u|^α)`; the one-sided law (α < 1) has Laplace exponent `q^α`, so
//! `E e^{-qX_t} = e^{-t q^α}`. Under this convention α = 2 gives a Gaussian
//! with variance `2t`.
//!
//! Routes for the unit-time density `f_1`:
//! * closed forms: Gaussian (α = 2), Cauchy (α = 1), Lévy (one-sided α = 1/2);
//! * symmetric: Fourier-cosine integral `(1/π)∫_0^U cos(ux) e^{-u^α} du`, with
//!   `U` chosen where the envelope drops below 1e-14, integrated panel by
//!   panel over half periods. Large `|x|` uses the convergent (α < 1) or
//!   asymptotic (α > 1) power series in `|x|^{-α}`;
//! * one-sided: Kanter's integral over `(0, π)` for moderate `x`, the
//!   convergent power series for large `x`.

use std::f64::consts::PI;

use super::ln_gamma;
use super::quadrature::{integrate, QuadratureConfig};
use crate::error::{domain, Result};

const ENVELOPE_FLOOR: f64 = 1e-14;
const MAX_PANELS: f64 = 4000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StableKind {
    /// Symmetric two-sided law, `Ψ(u) = |u|^α`, α ∈ (0, 2].
    SymmetricTwoSided,
    /// Stable subordinator, `Φ(q) = q^α`, α ∈ (0, 1).
    OneSidedSubordinator,
}

fn check(func: &'static str, alpha: f64, kind: StableKind, t: f64, x: f64) -> Result<()> {
    match kind {
        StableKind::SymmetricTwoSided if !(alpha > 0.0 && alpha <= 2.0) => {
            return Err(domain(func, format!("symmetric index must be in (0,2], got {alpha}")))
        }
        StableKind::OneSidedSubordinator if !(alpha > 0.0 && alpha < 1.0) => {
            return Err(domain(func, format!("one-sided index must be in (0,1), got {alpha}")))
        }
        _ => {}
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain(func, format!("time must be > 0, got {t}")));
    }
    if x.is_nan() {
        return Err(domain(func, "x is NaN"));
    }
    Ok(())
}

/// `f_t(x) = f_1(x t^{-1/α}) t^{-1/α}`.
pub fn stable_density(alpha: f64, kind: StableKind, t: f64, x: f64) -> Result<f64> {
    check("stable_density", alpha, kind, t, x)?;
    let scale = t.powf(1.0 / alpha);
    Ok(unit_density(alpha, kind, x / scale)? / scale)
}

/// `f_1(x)`.
pub fn stable_density_unit(alpha: f64, kind: StableKind, x: f64) -> Result<f64> {
    check("stable_density", alpha, kind, 1.0, x)?;
    unit_density(alpha, kind, x)
}

/// Distribution function `P(X_t ≤ x)`.
///
/// Available for the closed-form cases and for every one-sided index; the
/// general symmetric case is not provided.
pub fn stable_cdf(alpha: f64, kind: StableKind, t: f64, x: f64) -> Result<f64> {
    check("stable_cdf", alpha, kind, t, x)?;
    let z = x / t.powf(1.0 / alpha);
    match kind {
        StableKind::SymmetricTwoSided if alpha == 2.0 => Ok(0.5 * statrs::function::erf::erfc(-z / 2.0)),
        StableKind::SymmetricTwoSided if alpha == 1.0 => Ok(0.5 + z.atan() / PI),
        StableKind::SymmetricTwoSided => Err(domain(
            "stable_cdf",
            "symmetric CDF only available for alpha in {1, 2}",
        )),
        StableKind::OneSidedSubordinator => one_sided_cdf(alpha, z),
    }
}

/// Analytic bound on the Fourier truncation error, `(1/π)∫_U^∞ e^{-u^α} du`.
pub fn fourier_truncation_bound(alpha: f64) -> f64 {
    let cut = -ENVELOPE_FLOOR.ln();
    let a = 1.0 / alpha;
    // ∫_U^∞ e^{-u^α} du = Γ(1/α, U^α)/α
    let upper = statrs::function::gamma::gamma_ur(a, cut) * statrs::function::gamma::gamma(a);
    upper / (alpha * PI)
}

fn unit_density(alpha: f64, kind: StableKind, x: f64) -> Result<f64> {
    match kind {
        StableKind::SymmetricTwoSided => symmetric_unit(alpha, x.abs()),
        StableKind::OneSidedSubordinator => one_sided_unit(alpha, x),
    }
}

fn symmetric_unit(alpha: f64, x: f64) -> Result<f64> {
    if alpha == 2.0 {
        return Ok((-x * x / 4.0).exp() / (2.0 * PI.sqrt()));
    }
    if alpha == 1.0 {
        return Ok(1.0 / (PI * (1.0 + x * x)));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    if x == 0.0 {
        // (1/π)∫ e^{-u^α} du = Γ(1 + 1/α)/π
        return Ok(ln_gamma(1.0 + 1.0 / alpha)?.exp() / PI);
    }
    let upper = (-ENVELOPE_FLOOR.ln()).powf(1.0 / alpha);
    if alpha < 1.0 {
        if x.powf(-alpha) <= 4.0 {
            if let Some(v) = power_series(alpha, x, PI * alpha / 2.0, true) {
                return Ok(v);
            }
        }
    } else if x >= 50.0 || x * upper / PI > MAX_PANELS {
        if let Some(v) = power_series(alpha, x, PI * alpha / 2.0, false) {
            return Ok(v);
        }
    }
    fourier_cosine(alpha, x, upper)
}

/// `(1/π) Σ_{k≥1} (-1)^{k+1} Γ(kα+1)/k! sin(kθ) x^{-kα-1}`.
///
/// θ = πα/2 gives the symmetric tail, θ = πα the one-sided one. For α < 1
/// the series converges; for α > 1 it is asymptotic and is truncated at its
/// smallest term (returns `None` if that term is not negligible).
fn power_series(alpha: f64, x: f64, theta: f64, convergent: bool) -> Option<f64> {
    let ln_x = x.ln();
    let mut sum = 0.0;
    let mut prev_mag = f64::INFINITY;
    let mut max_mag = 0.0f64;
    for k in 1..=600 {
        let kf = k as f64;
        let ln_mag = ln_gamma(kf * alpha + 1.0).ok()? - ln_gamma(kf + 1.0).ok()?
            - (kf * alpha + 1.0) * ln_x;
        let mag = ln_mag.exp();
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let term = sign * mag * (kf * theta).sin();
        if !convergent && mag > prev_mag {
            return None;
        }
        sum += term;
        max_mag = max_mag.max(mag);
        if mag < 1e-17 * sum.abs() && k > 2 {
            break;
        }
        prev_mag = mag;
        if k == 600 && !convergent {
            return None;
        }
    }
    // Too much cancellation: more than five digits lost.
    if max_mag > 1e5 * sum.abs() {
        return None;
    }
    Some(sum / PI)
}

fn fourier_cfg() -> QuadratureConfig {
    QuadratureConfig {
        max_subdivisions: 1000,
        abs_tol: 1e-15,
        rel_tol: 1e-12,
    }
}

fn fourier_cosine(alpha: f64, x: f64, upper: f64) -> Result<f64> {
    let cfg = fourier_cfg();
    let f = |u: f64| (u * x).cos() * (-u.powf(alpha)).exp();
    let panels = (x * upper / PI).ceil().max(1.0);
    let width = upper / panels;
    let mut total = 0.0;
    let mut a = 0.0;
    for i in 0..panels as usize {
        let b = if i + 1 == panels as usize {
            upper
        } else {
            a + width
        };
        total += integrate(f, a, b, &cfg)
            .map_err(|e| e.into_error("stable_density"))?
            .value;
        a = b;
    }
    Ok(total / PI)
}

/// Zolotarev's function for the one-sided law, so that
/// `X = (A(U)/E)^{(1-α)/α}` with U ~ Unif(0, π), E ~ Exp(1) (Kanter).
pub(crate) fn kanter_a(alpha: f64, phi: f64) -> f64 {
    let num = (alpha * phi).sin().powf(alpha) * ((1.0 - alpha) * phi).sin().powf(1.0 - alpha);
    (num / phi.sin()).powf(1.0 / (1.0 - alpha))
}

fn kanter_cfg() -> QuadratureConfig {
    QuadratureConfig {
        max_subdivisions: 2000,
        abs_tol: 1e-300,
        rel_tol: 1e-10,
    }
}

fn one_sided_unit(alpha: f64, x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    if alpha == 0.5 {
        return Ok(x.powf(-1.5) * (-0.25 / x).exp() / (2.0 * PI.sqrt()));
    }
    if x.powf(-alpha) <= 0.5 {
        if let Some(v) = power_series(alpha, x, PI * alpha, true) {
            return Ok(v);
        }
    }
    let s = x.powf(-alpha / (1.0 - alpha));
    // A is increasing on (0, π); this is its limit at 0+.
    let a0 = (alpha.powf(alpha) * (1.0 - alpha).powf(1.0 - alpha)).powf(1.0 / (1.0 - alpha));
    let log_pref = (alpha / ((1.0 - alpha) * PI)).ln() - x.ln() / (1.0 - alpha) - a0 * s;
    if log_pref < -745.0 {
        return Ok(0.0);
    }
    let integral = integrate(
        |phi| {
            let a = kanter_a(alpha, phi);
            if a.is_finite() {
                a * (-(a - a0) * s).exp()
            } else {
                0.0
            }
        },
        0.0,
        PI,
        &kanter_cfg(),
    )
    .map_err(|e| e.into_error("stable_density"))?
    .value;
    Ok(integral * log_pref.exp())
}

fn one_sided_cdf(alpha: f64, x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    if alpha == 0.5 {
        return Ok(statrs::function::erf::erfc(0.5 / x.sqrt()));
    }
    if x.powf(-alpha) <= 0.5 {
        // Survival series: (1/π) Σ (-1)^{k+1} Γ(kα)/k! sin(kπα) x^{-kα}.
        let ln_x = x.ln();
        let mut sum = 0.0;
        for k in 1..=600 {
            let kf = k as f64;
            let mag = (ln_gamma(kf * alpha)? - ln_gamma(kf + 1.0)? - kf * alpha * ln_x).exp();
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sum += sign * mag * (kf * PI * alpha).sin();
            if mag < 1e-17 && k > 2 {
                break;
            }
        }
        return Ok(1.0 - sum / PI);
    }
    let s = x.powf(-alpha / (1.0 - alpha));
    let a0 = (alpha.powf(alpha) * (1.0 - alpha).powf(1.0 - alpha)).powf(1.0 / (1.0 - alpha));
    if a0 * s > 745.0 {
        return Ok(0.0);
    }
    let integral = integrate(
        |phi| {
            let a = kanter_a(alpha, phi);
            if a.is_finite() {
                (-a * s).exp()
            } else {
                0.0
            }
        },
        0.0,
        PI,
        &kanter_cfg(),
    )
    .map_err(|e| e.into_error("stable_cdf"))?
    .value;
    Ok(integral / PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::quadrature::{integrate_power_tail, integrate_to_infinity};

    const SYM: StableKind = StableKind::SymmetricTwoSided;
    const ONE: StableKind = StableKind::OneSidedSubordinator;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn closed_form_values() {
        let g = stable_density(2.0, SYM, 1.0, 0.0).unwrap();
        assert!(rel(g, 1.0 / (2.0 * PI.sqrt())) < 1e-14);
        let c = stable_density(1.0, SYM, 2.0, 0.0).unwrap();
        assert!(rel(c, 1.0 / (2.0 * PI)) < 1e-14);
        let l = stable_density(0.5, ONE, 1.0, 1.0).unwrap();
        assert!(rel(l, 0.219_695_644_733_861_2) < 1e-13);
    }

    // Reference values: partial sums of the power series at 50 digits, and
    // an independent quadrature of the characteristic function (mpmath/scipy).
    #[test]
    fn symmetric_reference_values() {
        let cases = [
            (0.5, 0.3, 0.259_731_597_064_457_37),
            (0.5, 2.0, 0.039_142_858_049_651_348),
            (0.5, 20.0, 0.001_859_986_350_693_159_6),
            (0.7, 1.0, 0.117_027_208_207_893_59),
            (1.5, 0.7, 0.240_784_198_492_454_78),
            (1.5, 3.0, 0.031_509_423_616_324_935),
            (1.2, 0.0, 0.299_420_059_179_828_95),
        ];
        for (alpha, x, expected) in cases {
            let v = stable_density_unit(alpha, SYM, x).unwrap();
            assert!(rel(v, expected) < 1e-9, "alpha={alpha} x={x}: {v} vs {expected}");
        }
    }

    #[test]
    fn symmetric_routes_agree_in_overlap() {
        // Fourier against the series where both are usable.
        for &(alpha, x) in &[(0.5, 0.3), (0.7, 1.0), (0.3, 0.05), (1.5, 50.0), (1.8, 60.0)] {
            let upper = (-ENVELOPE_FLOOR.ln()).powf(1.0 / alpha);
            let fourier = fourier_cosine(alpha, x, upper).unwrap();
            let series = power_series(alpha, x, PI * alpha / 2.0, alpha < 1.0).unwrap();
            assert!(
                (fourier - series).abs() < 1e-10 * series.abs() + 1e-14,
                "alpha={alpha} x={x}: {fourier} vs {series}"
            );
        }
    }

    #[test]
    fn one_sided_reference_values() {
        let cases = [
            (0.3, 1.0, 0.117_157_002_565_916_15),
            (0.3, 5.0, 0.019_154_354_837_293_765),
            (0.7, 1.0, 0.387_395_010_146_592_43),
            (0.7, 0.5, 0.965_119_118_469_361_77),
        ];
        for (alpha, x, expected) in cases {
            let v = stable_density_unit(alpha, ONE, x).unwrap();
            assert!(rel(v, expected) < 1e-9, "alpha={alpha} x={x}: {v} vs {expected}");
        }
    }

    #[test]
    fn one_sided_kanter_matches_closed_form_at_half() {
        // Force the Kanter route at α = 1/2 by calling through the integral.
        let alpha = 0.5;
        for &x in &[0.05f64, 0.3, 1.0, 3.0] {
            let s = x.powf(-alpha / (1.0 - alpha));
            let integral = integrate(
                |phi| {
                    let a = kanter_a(alpha, phi);
                    if a.is_finite() {
                        a * (-a * s).exp()
                    } else {
                        0.0
                    }
                },
                0.0,
                PI,
                &kanter_cfg(),
            )
            .unwrap()
            .value;
            let kanter = alpha / ((1.0 - alpha) * PI) * x.powf(-1.0 / (1.0 - alpha)) * integral;
            let closed = stable_density_unit(0.5, ONE, x).unwrap();
            assert!(rel(kanter, closed) < 1e-10, "x={x}");
        }
    }

    #[test]
    fn laplace_transform_of_half_stable() {
        // ∫ e^{-qx} f_1(x) dx = e^{-√q}
        let cfg = QuadratureConfig::default();
        for &q in &[0.5, 1.0, 4.0] {
            let lt = integrate_to_infinity(
                |x| (-q * x).exp() * stable_density_unit(0.5, ONE, x).unwrap(),
                0.0,
                &cfg,
            )
            .unwrap()
            .value;
            assert!((lt - (-(q as f64).sqrt()).exp()).abs() < 1e-10);
        }
    }

    #[test]
    fn laplace_transform_of_one_sided_general() {
        let cfg = QuadratureConfig {
            max_subdivisions: 4000,
            abs_tol: 1e-13,
            rel_tol: 1e-10,
        };
        for &alpha in &[0.3, 0.7] {
            let lt = integrate_to_infinity(
                |x| (-x).exp() * stable_density_unit(alpha, ONE, x).unwrap(),
                0.0,
                &cfg,
            )
            .unwrap()
            .value;
            assert!((lt - (-1.0f64).exp()).abs() < 1e-8, "alpha={alpha}: {lt}");
        }
    }

    #[test]
    fn densities_integrate_to_one() {
        let cfg = QuadratureConfig {
            max_subdivisions: 4000,
            abs_tol: 1e-12,
            rel_tol: 1e-9,
        };
        for &alpha in &[0.5, 0.8, 1.0, 1.5, 2.0] {
            let f = |x: f64| stable_density_unit(alpha, SYM, x).unwrap();
            let core = integrate(f, 0.0, 1.0, &cfg).unwrap().value;
            let tail = integrate_power_tail(f, 1.0, alpha, &cfg).unwrap().value;
            let mass = 2.0 * (core + tail);
            assert!((mass - 1.0).abs() < 1e-4, "alpha={alpha}: {mass}");
        }
        for &alpha in &[0.3, 0.5, 0.7] {
            let f = |x: f64| stable_density_unit(alpha, ONE, x).unwrap();
            let core = integrate(f, 0.0, 1.0, &cfg).unwrap().value;
            let tail = integrate_power_tail(f, 1.0, alpha, &cfg).unwrap().value;
            assert!((core + tail - 1.0).abs() < 1e-4, "alpha={alpha}: {}", core + tail);
        }
    }

    #[test]
    fn one_sided_cdf_is_consistent_with_density() {
        let cfg = QuadratureConfig::default();
        for &alpha in &[0.3, 0.5, 0.7] {
            for &x in &[0.2, 1.0, 4.0, 50.0] {
                let direct = stable_cdf(alpha, ONE, 1.0, x).unwrap();
                let lower = integrate(|y| stable_density_unit(alpha, ONE, y).unwrap(), 0.0, x.min(1.0), &cfg)
                    .unwrap()
                    .value;
                let upper = if x > 1.0 {
                    integrate(|y| stable_density_unit(alpha, ONE, y).unwrap(), 1.0, x, &cfg)
                        .unwrap()
                        .value
                } else {
                    0.0
                };
                assert!((direct - lower - upper).abs() < 1e-8, "alpha={alpha} x={x}");
            }
        }
    }

    #[test]
    fn scaling_identity() {
        for &(alpha, kind) in &[(0.5, SYM), (1.5, SYM), (0.7, ONE)] {
            for &t in &[0.25, 3.0] {
                for &x in &[0.4, 2.0] {
                    let ft = stable_density(alpha, kind, t, x).unwrap();
                    let f1 = stable_density_unit(alpha, kind, x * t.powf(-1.0 / alpha)).unwrap();
                    assert!(rel(ft * t.powf(1.0 / alpha), f1) < 1e-8);
                }
            }
        }
    }

    #[test]
    fn truncation_bound_is_small() {
        for &alpha in &[0.3, 0.5, 1.5, 1.9] {
            assert!(fourier_truncation_bound(alpha) < 1e-10, "alpha={alpha}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(stable_density(0.0, SYM, 1.0, 0.0).is_err());
        assert!(stable_density(2.5, SYM, 1.0, 0.0).is_err());
        assert!(stable_density(1.0, ONE, 1.0, 0.0).is_err());
        assert!(stable_density(0.5, ONE, 0.0, 1.0).is_err());
        assert_eq!(stable_density(0.5, ONE, 1.0, -1.0).unwrap(), 0.0);
    }
}
