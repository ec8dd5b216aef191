//! The power-law root-of-time factor h^(1/alpha) against the Gaussian
//! sqrt(h): for any finite-variance fat tail (alpha > 2) the Gaussian
//! factor is strictly larger at every multi-period horizon.
//!
//! Run with: cargo run --example horizon_scaling

use tailrisk::risk::scaling_factor;

fn main() -> tailrisk::Result<()> {
    let alpha = 3.5;
    println!("scaling factors for tail index alpha = {alpha}");
    println!("{:>4}{:>12}{:>12}{:>10}", "h", "h^(1/a)", "sqrt(h)", "ratio");
    for h in [1usize, 2, 4, 5, 10, 20] {
        let q = scaling_factor(h, alpha)?.q;
        let root = (h as f64).sqrt();
        println!("{h:>4}{q:>12.4}{root:>12.4}{:>10.4}", root / q);
    }

    // the gate: an infinite-variance tail has no valid scaling law
    match scaling_factor(5, 1.9) {
        Err(e) => println!("\nalpha = 1.9 refused as expected: {e}"),
        Ok(_) => unreachable!("scaling must be refused for alpha <= 2"),
    }
    Ok(())
}
