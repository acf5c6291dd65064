//! Small-time exponents of the stable OU kernel on the diagonal.

use bridgelab::kernels::{geometric_t_grid, predicted_resolvent_exponent, resolvent_exponent_probe};

fn main() -> bridgelab::Result<()> {
    let grid = geometric_t_grid(1e-2, 1e-6, 12);
    for (alpha, x) in [(2.0, 0.0), (1.5, 0.0), (1.0, 0.0), (0.5, 0.0), (1.0, 0.5), (0.5, 1.0), (1.5, 1.0)] {
        let slope = resolvent_exponent_probe(alpha, x, &grid)?;
        println!("α={alpha} x={x}: slope {slope:+.4}, predicted {:+.4}", predicted_resolvent_exponent(alpha, x));
    }
    Ok(())
}
