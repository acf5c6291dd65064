//! Hermite functions, modified Bessel functions and stable densities.

use bridgelab::specfun::{
    beta_arcsine_cdf, bessel_i, gamma_fn, hermite_h, ln_hermite_h, stable_cdf, stable_density, StableKind,
};

fn main() -> bridgelab::Result<()> {
    println!("Γ(0.3)           = {}", gamma_fn(0.3)?);
    for q in [1.0, 2.0, 3.5] {
        println!("H_{q}(0), H_{q}(1) = {}, {}", hermite_h(q, 0.0)?, hermite_h(q, 1.0)?);
    }
    // Large orders only fit in log space.
    println!("ln H_400(1)      = {}", ln_hermite_h(400.0, 1.0)?);
    println!("I_0.5(2)         = {}", bessel_i(0.5, 2.0)?);

    for alpha in [0.5, 1.5] {
        let f = stable_density(alpha, StableKind::SymmetricTwoSided, 1.0, 0.7)?;
        println!("symmetric α={alpha}: f_1(0.7) = {f}");
    }
    let f = stable_density(0.7, StableKind::OneSidedSubordinator, 1.0, 1.0)?;
    let c = stable_cdf(0.7, StableKind::OneSidedSubordinator, 1.0, 1.0)?;
    println!("one-sided α=0.7: f_1(1) = {f}, P(X_1 ≤ 1) = {c}");
    println!("generalized arcsine α=0.3 at 1/2: {}", beta_arcsine_cdf(0.3, 0.5)?);
    Ok(())
}
