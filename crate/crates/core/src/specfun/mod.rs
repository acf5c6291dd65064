//! Scalar special functions and quadrature primitives.
//!
//! Everything here is a pure function of its arguments. Values that can
//! overflow `f64` (Hermite integrals of large order, Bessel functions of large
//! argument) also come with a log-space companion.

mod arcsine;
mod bessel;
mod hermite;
pub mod quadrature;
mod stable;

pub use arcsine::{beta_arcsine_cdf, beta_arcsine_density};
pub use bessel::{bessel_i, ln_bessel_i};
pub use hermite::{hermite_h, hermite_h_with, ln_hermite_h, ln_hermite_h_with};
pub use quadrature::{Estimate, QuadratureConfig};
pub(crate) use stable::kanter_a;
pub use stable::{
    fourier_truncation_bound, stable_cdf, stable_density, stable_density_unit, StableKind,
};

use crate::error::{domain, Result};

/// Γ(x) for x > 0.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("gamma_fn", format!("x must be finite and > 0, got {x}")));
    }
    Ok(statrs::function::gamma::gamma(x))
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("ln_gamma", format!("x must be finite and > 0, got {x}")));
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_reference_values() {
        assert!(rel(gamma_fn(1.0).unwrap(), 1.0) < 1e-14);
        assert!(rel(gamma_fn(4.0).unwrap(), 6.0) < 1e-13);
        // √π
        assert!(rel(gamma_fn(0.5).unwrap(), 1.772_453_850_905_516) < 1e-13);
        // Γ(0.3), mpmath at 30 digits
        assert!(rel(gamma_fn(0.3).unwrap(), 2.991_568_987_687_590_9) < 1e-12);
    }

    #[test]
    fn gamma_rejects_non_positive() {
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-1.5).is_err());
        assert!(gamma_fn(f64::NAN).is_err());
    }
}
