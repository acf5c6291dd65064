//! The Hermite-type integral `H_q(x) = ∫_0^∞ e^{-xz - z²/2} z^{q-1} dz`.

use super::quadrature::{integrate, QuadratureConfig};
use crate::error::{domain, Result};

// Integrand is dropped once it falls this far (in log units) below its peak.
const LOG_CUTOFF: f64 = 70.0;

fn hermite_cfg() -> QuadratureConfig {
    QuadratureConfig {
        max_subdivisions: 2000,
        abs_tol: 1e-300,
        rel_tol: 1e-13,
    }
}

/// `H_q(x)` with the default tolerances (relative 1e-13).
pub fn hermite_h(q: f64, x: f64) -> Result<f64> {
    hermite_h_with(q, x, &hermite_cfg())
}

pub fn hermite_h_with(q: f64, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(ln_hermite_h_with(q, x, cfg)?.exp())
}

/// `ln H_q(x)`; finite for every `q > 0` and real `x`, including orders where
/// `H_q` itself overflows.
pub fn ln_hermite_h(q: f64, x: f64) -> Result<f64> {
    ln_hermite_h_with(q, x, &hermite_cfg())
}

pub fn ln_hermite_h_with(q: f64, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(domain("hermite_h", format!("order q must be > 0, got {q}")));
    }
    if !x.is_finite() {
        return Err(domain("hermite_h", format!("x must be finite, got {x}")));
    }
    if q < 1.0 {
        small_order(q, x, cfg)
    } else {
        log_space(q, x, cfg)
    }
}

/// q in (0,1): substitute w = z^q so the z^{q-1} singularity disappears.
fn small_order(q: f64, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    // Peak of -xz - z²/2 over z ≥ 0.
    let z_peak = (-x).max(0.0);
    let peak = -x * z_peak - 0.5 * z_peak * z_peak;
    let z_hi = -x + (x * x + 2.0 * LOG_CUTOFF).sqrt();
    let integrand = |w: f64| {
        let z = w.powf(1.0 / q);
        (-x * z - 0.5 * z * z - peak).exp()
    };
    let w_peak = z_peak.powf(q);
    let w_hi = z_hi.max(z_peak + 1.0).powf(q);
    let mut total = 0.0;
    for (a, b) in [(0.0, w_peak), (w_peak, w_hi)] {
        if b > a {
            total += integrate(integrand, a, b, cfg)
                .map_err(|e| e.into_error("hermite_h"))?
                .value;
        }
    }
    Ok((total / q).ln() + peak)
}

/// q ≥ 1: integrate exp(ℓ(z) - ℓ(z*)) around the mode z* of
/// ℓ(z) = (q-1) ln z - xz - z²/2.
fn log_space(q: f64, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let log_integrand = |z: f64| {
        let power = if q == 1.0 { 0.0 } else { (q - 1.0) * z.ln() };
        power - x * z - 0.5 * z * z
    };
    let mode = 0.5 * (-x + (x * x + 4.0 * (q - 1.0)).sqrt());
    let peak = log_integrand(mode);
    let width = if mode > 0.0 {
        1.0 / ((q - 1.0) / (mode * mode) + 1.0).sqrt()
    } else {
        1.0
    };

    let mut hi = mode + 8.0 * width;
    while log_integrand(hi) - peak > -LOG_CUTOFF {
        hi = mode + 2.0 * (hi - mode);
    }
    let mut lo = (mode - 8.0 * width).max(0.0);
    while lo > 0.0 && log_integrand(lo) - peak > -LOG_CUTOFF {
        lo = (mode - 2.0 * (mode - lo)).max(0.0);
    }

    let integrand = |z: f64| {
        if z <= 0.0 && q > 1.0 {
            0.0
        } else {
            (log_integrand(z) - peak).exp()
        }
    };
    let mut total = 0.0;
    for (a, b) in [(lo, mode), (mode, hi)] {
        if b > a {
            total += integrate(integrand, a, b, cfg)
                .map_err(|e| e.into_error("hermite_h"))?
                .value;
        }
    }
    Ok(total.ln() + peak)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::ln_gamma;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    /// Fine-grid trapezoid oracle on a long truncated range.
    fn trapezoid_oracle(q: f64, x: f64) -> f64 {
        let upper = 40.0;
        let n = 4_000_000;
        let h = upper / n as f64;
        let f = |z: f64| (-x * z - 0.5 * z * z).exp() * z.powf(q - 1.0);
        let mut s = 0.5 * (f(0.0) + f(upper));
        for i in 1..n {
            s += f(i as f64 * h);
        }
        s * h
    }

    #[test]
    fn closed_form_at_zero() {
        assert!(rel(hermite_h(2.0, 0.0).unwrap(), 1.0) < 1e-12);
        assert!(rel(hermite_h(1.0, 0.0).unwrap(), 1.253_314_137_315_500_3) < 1e-12);
    }

    #[test]
    fn matches_trapezoid_oracle_at_one() {
        let oracle = trapezoid_oracle(2.0, 1.0);
        // mpmath at 30 digits: 0.344320457581201528...
        assert!(rel(oracle, 0.344_320_457_581_201_5) < 1e-10);
        assert!(rel(hermite_h(2.0, 1.0).unwrap(), oracle) < 1e-10);
    }

    #[test]
    fn small_order_negative_argument() {
        // q = 1/2 closed form at 0: 2^{-3/4} Γ(1/4)
        let expected = (-0.75 * std::f64::consts::LN_2 + ln_gamma(0.25).unwrap()).exp();
        assert!(rel(hermite_h(0.5, 0.0).unwrap(), expected) < 1e-11);
        let v = hermite_h(0.5, -3.0).unwrap();
        let oracle = trapezoid_oracle(1.5, -3.0);
        // H_{1/2}(-3) via the recurrence H_{2.5} = 0.5 H_{0.5} + 3 H_{1.5}.
        let h25 = hermite_h(2.5, -3.0).unwrap();
        assert!(rel(0.5 * v + 3.0 * oracle, h25) < 1e-8);
    }

    #[test]
    fn large_order_is_finite_in_log_space() {
        let ln = ln_hermite_h(800.0, 1.0).unwrap();
        assert!(ln.is_finite() && ln > 700.0);
        assert!(hermite_h(800.0, 1.0).unwrap().is_infinite());
    }

    #[test]
    fn rejects_bad_order() {
        assert!(hermite_h(0.0, 1.0).is_err());
        assert!(hermite_h(-1.0, 1.0).is_err());
        assert!(hermite_h(1.0, f64::INFINITY).is_err());
    }
}
