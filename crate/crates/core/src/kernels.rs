//! Transition kernels, potential densities and the h-transform used by the
//! bridge constructions.
//!
//! The Brownian kernel has variance `t`. Stable kernels follow the
//! normalization of [`crate::specfun::stable_density`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::specfun::{gamma_fn, ln_bessel_i, ln_gamma, stable_density, StableKind};
use crate::stats::loglog_slope;

// Below this start point the Bessel kernel uses its x = 0 closed form.
const BESSEL_ORIGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum KernelSpec {
    Brownian,
    Bessel { delta: f64 },
    StableOu { alpha: f64 },
    StableSubordinator { alpha: f64 },
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Brownian => Ok(()),
            KernelSpec::Bessel { delta } if delta > 0.0 && delta.is_finite() => Ok(()),
            KernelSpec::Bessel { delta } => {
                Err(domain("KernelSpec", format!("Bessel dimension must be > 0, got {delta}")))
            }
            KernelSpec::StableOu { alpha } if alpha > 0.0 && alpha <= 2.0 => Ok(()),
            KernelSpec::StableOu { alpha } => {
                Err(domain("KernelSpec", format!("stable index must be in (0,2], got {alpha}")))
            }
            KernelSpec::StableSubordinator { alpha } if alpha > 0.0 && alpha < 1.0 => Ok(()),
            KernelSpec::StableSubordinator { alpha } => Err(domain(
                "KernelSpec",
                format!("subordinator index must be in (0,1), got {alpha}"),
            )),
        }
    }

    /// `p_t(x, y)`.
    pub fn density(&self, t: f64, x: f64, y: f64) -> Result<f64> {
        self.validate()?;
        match *self {
            KernelSpec::Brownian => brownian_p(t, x, y),
            KernelSpec::Bessel { delta } => bessel_p(delta, t, x, y),
            KernelSpec::StableOu { alpha } => ou_q(alpha, t, x, y),
            KernelSpec::StableSubordinator { alpha } => {
                stable_density(alpha, StableKind::OneSidedSubordinator, t, y - x)
            }
        }
    }

    /// `ln p_t(x, y)`; `-inf` where the density vanishes.
    pub fn ln_density(&self, t: f64, x: f64, y: f64) -> Result<f64> {
        self.validate()?;
        match *self {
            KernelSpec::Brownian => ln_brownian_p(t, x, y),
            KernelSpec::Bessel { delta } => ln_bessel_p(delta, t, x, y),
            _ => self.density(t, x, y).map(f64::ln),
        }
    }
}

fn check_time(func: &'static str, t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(domain(func, format!("time must be > 0, got {t}")))
    }
}

pub fn brownian_p(t: f64, x: f64, y: f64) -> Result<f64> {
    ln_brownian_p(t, x, y).map(f64::exp)
}

fn ln_brownian_p(t: f64, x: f64, y: f64) -> Result<f64> {
    check_time("brownian_p", t)?;
    let d = y - x;
    Ok(-0.5 * (2.0 * PI * t).ln() - d * d / (2.0 * t))
}

/// Bessel(δ) transition density with respect to Lebesgue measure on [0, ∞).
pub fn bessel_p(delta: f64, t: f64, x: f64, y: f64) -> Result<f64> {
    ln_bessel_p(delta, t, x, y).map(f64::exp)
}

fn ln_bessel_p(delta: f64, t: f64, x: f64, y: f64) -> Result<f64> {
    check_time("bessel_p", t)?;
    if !(delta > 0.0) {
        return Err(domain("bessel_p", format!("dimension must be > 0, got {delta}")));
    }
    if !(x >= 0.0) || !(y >= 0.0) {
        return Err(domain("bessel_p", format!("arguments must be >= 0, got x={x}, y={y}")));
    }
    let nu = delta / 2.0 - 1.0;
    if x < BESSEL_ORIGIN || y == 0.0 {
        // y^{2ν+1} e^{-(x²+y²)/2t} / (2^ν t^{ν+1} Γ(ν+1)); at y = 0 this is
        // also the x > 0 limit.
        let power = 2.0 * nu + 1.0;
        let ln_y_term = if y == 0.0 {
            if power > 0.0 {
                return Ok(f64::NEG_INFINITY);
            } else if power < 0.0 {
                return Err(Error::Infinite { func: "bessel_p", at: 0.0 });
            }
            0.0
        } else {
            power * y.ln()
        };
        let x_sq = if x < BESSEL_ORIGIN { 0.0 } else { x * x };
        return Ok(ln_y_term - (x_sq + y * y) / (2.0 * t)
            - nu * std::f64::consts::LN_2
            - (nu + 1.0) * t.ln()
            - ln_gamma(nu + 1.0)?);
    }
    let z = x * y / t;
    // Fold e^{-xy/t} into the exponent so large arguments stay finite.
    Ok(-t.ln() + nu * (y / x).ln() + y.ln() - (y - x) * (y - x) / (2.0 * t) - z
        + ln_bessel_i(nu, z)?)
}

/// Transition density of the Ornstein–Uhlenbeck transform `e^{-t/α} X_{e^t}`
/// of the symmetric α-stable process: `f_{e^t-1}(e^{t/α}y - x) e^{t/α}`.
pub fn ou_q(alpha: f64, t: f64, x: f64, y: f64) -> Result<f64> {
    check_time("ou_q", t)?;
    let clock = t.exp_m1();
    let growth = (t / alpha).exp();
    // e^{t/α}y - x without cancellation when x ≈ y and t is small.
    let arg = (y - x) + y * (t / alpha).exp_m1();
    Ok(stable_density(alpha, StableKind::SymmetricTwoSided, clock, arg)? * growth)
}

/// Potential density of the α-stable subordinator, `a^{α-1}/Γ(α)` for a > 0.
pub fn potential_u(alpha: f64, a: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain("potential_u", format!("alpha must be in (0,1), got {alpha}")));
    }
    if a <= 0.0 {
        return Ok(0.0);
    }
    Ok(a.powf(alpha - 1.0) / gamma_fn(alpha)?)
}

/// `h_α(a) = u_α(b - a)` for a < b and 0 for a > b. At a = b the value is
/// infinite and reported as [`Error::Infinite`].
pub fn h_transform_h(alpha: f64, b: f64, a: f64) -> Result<f64> {
    if !(b > 0.0) {
        return Err(domain("h_transform_h", format!("b must be > 0, got {b}")));
    }
    if a == b {
        return Err(Error::Infinite { func: "h_transform_h", at: a });
    }
    potential_u(alpha, b - a)
}

/// `M^s_{x,y} = p_{t-s}(x_s, y) / p_t(x, y)`.
pub fn bridge_rn_weight(kernel: &KernelSpec, s: f64, t: f64, x: f64, y: f64, xs: f64) -> Result<f64> {
    if !(s > 0.0 && s < t) {
        return Err(domain("bridge_rn_weight", format!("need 0 < s < t, got s={s}, t={t}")));
    }
    let denom = kernel.ln_density(t, x, y)?;
    if denom == f64::NEG_INFINITY {
        return Err(Error::ZeroDenominator {
            func: "bridge_rn_weight",
            msg: format!("p_{t}({x}, {y}) = 0"),
        });
    }
    Ok((kernel.ln_density(t - s, xs, y)? - denom).exp())
}

/// Small-t exponent of `q_t(x, x)` predicted by the OU asymptotics.
pub fn predicted_resolvent_exponent(alpha: f64, x: f64) -> f64 {
    if x == 0.0 || alpha > 1.0 {
        -1.0 / alpha
    } else if alpha == 1.0 {
        -1.0
    } else {
        -alpha
    }
}

/// `n` points from `hi` down to `lo`, geometrically spaced.
pub fn geometric_t_grid(hi: f64, lo: f64, n: usize) -> Vec<f64> {
    let ratio = (lo / hi).powf(1.0 / (n as f64 - 1.0));
    (0..n).map(|i| hi * ratio.powi(i as i32)).collect()
}

/// Least-squares slope of `ln q_t(x, x)` against `ln t` over `t_grid`.
pub fn resolvent_exponent_probe(alpha: f64, x: f64, t_grid: &[f64]) -> Result<f64> {
    if t_grid.len() < 8 {
        return Err(Error::Fit(format!("need at least 8 grid points, got {}", t_grid.len())));
    }
    if t_grid.windows(2).any(|w| !(w[1] < w[0])) || !(t_grid[t_grid.len() - 1] > 0.0) {
        return Err(Error::Fit("t grid must be positive and strictly decreasing".into()));
    }
    if t_grid[0] > 0.1 {
        return Err(Error::Fit(format!("t grid must lie in (0, 0.1], starts at {}", t_grid[0])));
    }
    let mut values = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let q = ou_q(alpha, t, x, x).map_err(|e| Error::Fit(format!("q_{t}({x},{x}): {e}")))?;
        if !(q > 0.0) || !q.is_finite() {
            return Err(Error::Fit(format!("q_{t}({x},{x}) = {q} is not positive and finite")));
        }
        values.push(q);
    }
    loglog_slope(t_grid, &values)
}
