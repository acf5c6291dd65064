//! Adaptive Gauss–Kronrod (7/15) quadrature with global bisection of the
//! worst interval, plus two substitutions for semi-infinite ranges.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{domain, Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and subdivision budget for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub max_subdivisions: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl QuadratureConfig {
    pub fn new(max_subdivisions: usize, abs_tol: f64, rel_tol: f64) -> Result<Self> {
        if max_subdivisions < 1 {
            return Err(domain("QuadratureConfig", "max_subdivisions must be >= 1"));
        }
        if !(abs_tol >= 0.0 && rel_tol >= 0.0) {
            return Err(domain("QuadratureConfig", "tolerances must be non-negative"));
        }
        if abs_tol == 0.0 && rel_tol == 0.0 {
            return Err(domain(
                "QuadratureConfig",
                "at least one of abs_tol, rel_tol must be positive",
            ));
        }
        Ok(Self {
            max_subdivisions,
            abs_tol,
            rel_tol,
        })
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            max_subdivisions: 4000,
            abs_tol: 1e-15,
            rel_tol: 1e-12,
        }
    }
}

/// Result of a converged integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
}

/// Integration stopped short of the tolerance; carries the best estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unconverged {
    pub estimate: f64,
    pub error: f64,
    pub subdivisions: usize,
}

impl Unconverged {
    pub fn into_error(self, func: &'static str) -> Error {
        Error::Quadrature {
            func,
            estimate: self.estimate,
            error: self.error,
            subdivisions: self.subdivisions,
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = fc.abs() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let mut err = ((kronrod - gauss) * half).abs();
    // QUADPACK-style sharpening of the raw Kronrod–Gauss difference.
    let scale = abs_sum * half.abs();
    if scale != 0.0 && err != 0.0 {
        err = scale * (200.0 * err / scale).powf(1.5).min(1.0);
    }
    if scale > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * scale);
    }
    (value, err)
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> std::result::Result<Estimate, Unconverged> {
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            subdivisions: 0,
        });
    }
    let (v0, e0) = gk15(&mut f, a, b);
    let mut total = v0;
    let mut total_err = e0;
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        a,
        b,
        value: v0,
        error: e0,
    });
    let mut subdivisions = 1;
    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Unconverged {
                estimate: total,
                error: total_err,
                subdivisions,
            });
        }
        if total_err <= cfg.abs_tol.max(cfg.rel_tol * total.abs()) {
            return Ok(Estimate {
                value: total,
                error: total_err,
                subdivisions,
            });
        }
        if subdivisions >= cfg.max_subdivisions {
            return Err(Unconverged {
                estimate: total,
                error: total_err,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // Interval exhausted at machine resolution; accept what we have.
            heap.push(Segment { error: 0.0, ..worst });
            total_err -= worst.error;
            continue;
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        subdivisions += 1;
        if subdivisions % 64 == 0 {
            // Re-sum to keep cancellation drift out of the running totals.
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
        }
    }
}

/// `∫_a^∞ f`, via the map `x = a + (1-s)/s` onto `(0, 1]`.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    cfg: &QuadratureConfig,
) -> std::result::Result<Estimate, Unconverged> {
    integrate(
        |s| {
            let x = a + (1.0 - s) / s;
            let v = f(x) / (s * s);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        cfg,
    )
}

/// `∫_a^∞ f` for `a > 0` and an integrand whose tail behaves like `x^{-1-p}`.
///
/// Uses `x = a·w^{-1/p}`, which turns such a tail into a bounded integrand on `(0, 1]`.
pub fn integrate_power_tail<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    p: f64,
    cfg: &QuadratureConfig,
) -> std::result::Result<Estimate, Unconverged> {
    debug_assert!(a > 0.0 && p > 0.0);
    integrate(
        |w| {
            let x = a * w.powf(-1.0 / p);
            let v = f(x) * (a / p) * w.powf(-1.0 / p - 1.0);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        cfg,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let cfg = QuadratureConfig::default();
        let est = integrate(|x| x.powi(5) - 2.0 * x, 0.0, 2.0, &cfg).unwrap();
        assert!((est.value - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity_converges() {
        let cfg = QuadratureConfig::default();
        let est = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, &cfg).unwrap();
        assert!((est.value - 2.0).abs() < 1e-10, "{}", est.value);
    }

    #[test]
    fn gaussian_tail_to_infinity() {
        let cfg = QuadratureConfig::default();
        let est = integrate_to_infinity(|x| (-x * x / 2.0).exp(), 0.0, &cfg).unwrap();
        let exact = (std::f64::consts::PI / 2.0).sqrt();
        assert!((est.value - exact).abs() < 1e-11);
    }

    #[test]
    fn power_tail_substitution() {
        let cfg = QuadratureConfig::default();
        // ∫_1^∞ x^{-1.3} dx = 1/0.3
        let est = integrate_power_tail(|x| x.powf(-1.3), 1.0, 0.3, &cfg).unwrap();
        assert!((est.value - 1.0 / 0.3).abs() < 1e-10);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let cfg = QuadratureConfig::new(3, 0.0, 1e-15).unwrap();
        let err = integrate(|x| (50.0 * x).sin() / x.sqrt(), 0.0, 10.0, &cfg).unwrap_err();
        assert!(err.subdivisions <= 3);
    }

    #[test]
    fn config_rejects_zero_tolerances() {
        assert!(QuadratureConfig::new(10, 0.0, 0.0).is_err());
        assert!(QuadratureConfig::new(0, 1e-8, 0.0).is_err());
    }
}
