//! Hole-filling constant and a recursion that saturates the hypothesis.

use plap::verify::{giusti_constant, giusti_iteration_check};

fn main() -> plap::Result<()> {
    for p in [1.5, 2.0, 3.0] {
        let theta = 2f64.powf(p) / (1.0 + 2f64.powf(p));
        println!("p = {p}: theta = {theta:.4} c = {:.4}", giusti_constant(theta, p)?);
    }

    // phi(rho) = (1 - rho) / 2 sampled on [0, 1).
    let (p, theta, a, b) = (2.0, 0.5, 1.0, 0.1);
    let phi: Vec<(f64, f64)> = (0..40)
        .map(|i| {
            let rho = i as f64 / 40.0;
            (rho, (1.0 - rho) * 0.5)
        })
        .collect();
    let report = giusti_iteration_check(&phi, theta, a, b, p)?;
    println!(
        "holds = {} lhs = {:.4} rhs = {:.4} margin = {:.3e}",
        report.holds, report.lhs, report.rhs, report.hypothesis_margin
    );
    Ok(())
}
