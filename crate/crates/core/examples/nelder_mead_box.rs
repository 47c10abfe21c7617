//! Box-constrained Nelder–Mead on a black-box function whose maximum lies
//! on the boundary.

use pricebounds::nelder_mead::{nm_maximize, NmConfig};

fn main() -> pricebounds::Result<()> {
    // Peak at (1.5, -0.2) lies outside the box in x, so the answer is x = 1.
    let f = |x: &[f64]| -(x[0] - 1.5).powi(2) - 3.0 * (x[1] + 0.2).powi(2);
    let out = nm_maximize(
        f,
        &[0.0, -1.0],
        &[1.0, 1.0],
        &[0.5, 0.5],
        &NmConfig::default(),
        0,
    )?;
    println!(
        "argmax {:.5?}, value {:.6}, {} evaluations, converged {}",
        out.point, out.value, out.evaluations, out.converged
    );
    Ok(())
}
