//! Transition kernels, the subordinator potential and bridge weights.

use bridgelab::kernels::{bessel_p, bridge_rn_weight, brownian_p, h_transform_h, ou_q, potential_u, KernelSpec};
use bridgelab::specfun::quadrature::{integrate, QuadratureConfig};

fn main() -> bridgelab::Result<()> {
    println!("p_1(0, 1) Brownian       = {}", brownian_p(1.0, 0.0, 1.0)?);
    println!("p_1(0, 1) Bessel(3)      = {}", bessel_p(3.0, 1.0, 0.0, 1.0)?);
    println!("q_1(1, 1) stable OU α=0.5 = {}", ou_q(0.5, 1.0, 1.0, 1.0)?);
    println!("u(1) α=0.5 = {}, h(a=0; b=1) = {}", potential_u(0.5, 1.0)?, h_transform_h(0.5, 1.0, 0.0)?);

    // Chapman-Kolmogorov for the Bessel(3) kernel at one point.
    let k = KernelSpec::Bessel { delta: 3.0 };
    let cfg = QuadratureConfig::default();
    let composed = integrate(|z| k.density(0.5, 0.4, z).unwrap_or(0.0) * k.density(0.5, z, 1.0).unwrap_or(0.0), 0.0, 12.0, &cfg)
        .map_err(|e| e.into_error("example"))?
        .value;
    println!("p_1(0.4, 1) = {}, ∫ p_0.5 p_0.5 = {composed}", k.density(1.0, 0.4, 1.0)?);

    let w = bridge_rn_weight(&KernelSpec::Brownian, 0.5, 1.0, 0.0, 0.0, 0.0)?;
    println!("bridge weight at s=1/2, X_s=0: {w}");
    Ok(())
}
