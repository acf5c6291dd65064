//! Modified Bessel function of the first kind, `I_ν(x)` for ν > -1, x ≥ 0.

use super::ln_gamma;
use crate::error::{domain, Error, Result};

// Above this argument the power series is replaced by the Hankel expansion in
// the log-space companion (the series itself would overflow near x ≈ 713).
const ASYMPTOTIC_FROM: f64 = 500.0;

fn check(nu: f64, x: f64) -> Result<()> {
    if !(nu > -1.0) || !nu.is_finite() {
        return Err(domain("bessel_i", format!("order must be > -1, got {nu}")));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(domain("bessel_i", format!("argument must be >= 0, got {x}")));
    }
    Ok(())
}

/// Power series Σ (x/2)^{ν+2k} / (k! Γ(1+ν+k)), summed until the next term is
/// below 1e-16 of the partial sum.
pub fn bessel_i(nu: f64, x: f64) -> Result<f64> {
    check(nu, x)?;
    if x == 0.0 {
        return if nu == 0.0 {
            Ok(1.0)
        } else if nu > 0.0 {
            Ok(0.0)
        } else {
            Err(Error::Infinite {
                func: "bessel_i",
                at: 0.0,
            })
        };
    }
    let (ln_first, sum) = series_scaled(nu, x)?;
    Ok(ln_first.exp() * sum)
}

/// ln I_ν(x); switches to the large-argument expansion for x ≥ 500.
pub fn ln_bessel_i(nu: f64, x: f64) -> Result<f64> {
    check(nu, x)?;
    if x == 0.0 {
        return bessel_i(nu, x).map(f64::ln);
    }
    if x >= ASYMPTOTIC_FROM {
        return Ok(hankel_ln(nu, x));
    }
    let (ln_first, sum) = series_scaled(nu, x)?;
    Ok(ln_first + sum.ln())
}

/// Returns (ln of the k = 0 term, series divided by that term).
fn series_scaled(nu: f64, x: f64) -> Result<(f64, f64)> {
    let half = 0.5 * x;
    let ln_first = nu * half.ln() - ln_gamma(1.0 + nu)?;
    let quarter_sq = half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= quarter_sq / (k * (nu + k));
        sum += term;
        if term < 1e-16 * sum {
            break;
        }
        k += 1.0;
    }
    Ok((ln_first, sum))
}

fn hankel_ln(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..30 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= -(mu - odd * odd) / (kf * 8.0 * x);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    x - 0.5 * (2.0 * std::f64::consts::PI * x).ln() + sum.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_argument_convention() {
        assert_eq!(bessel_i(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(1.0, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_i(0.5, 0.0).unwrap(), 0.0);
        assert!(matches!(bessel_i(-0.5, 0.0), Err(Error::Infinite { .. })));
    }

    #[test]
    fn half_order_closed_forms() {
        for &x in &[0.01, 1.0, 3.7, 25.0, 120.0] {
            let sinh_form = (2.0 / (PI * x)).sqrt() * x.sinh();
            let v = bessel_i(0.5, x).unwrap();
            assert!(((v - sinh_form) / sinh_form).abs() < 1e-13, "x={x}");
            let cosh_form = (2.0 / (PI * x)).sqrt() * x.cosh();
            let w = bessel_i(-0.5, x).unwrap();
            assert!(((w - cosh_form) / cosh_form).abs() < 1e-13, "x={x}");
        }
    }

    #[test]
    fn log_companion_is_continuous_across_the_switch() {
        for &nu in &[0.0, 0.5, 1.3] {
            let below = series_scaled(nu, ASYMPTOTIC_FROM).unwrap();
            let series = below.0 + below.1.ln();
            let asym = hankel_ln(nu, ASYMPTOTIC_FROM);
            assert!((series - asym).abs() < 1e-12, "nu={nu}: {series} vs {asym}");
        }
        // ln I_{1/2}(x) = x + ln((1 - e^{-2x}) / 2) - ln(√(πx/2)) ... for large x ≈ x - ½ ln(2πx)
        let x = 2000.0;
        let expected = x - 0.5 * (2.0 * PI * x).ln();
        assert!((ln_bessel_i(0.5, x).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn rejects_negative_argument() {
        assert!(bessel_i(0.0, -1.0).is_err());
        assert!(bessel_i(-1.0, 1.0).is_err());
    }
}
