//! Minimize the energy on a 5x5 grid with dipole boundary data.

use plap::energy::{ProblemSpec, ReactionParams};
use plap::generate::{grid, Profile};
use plap::solver::{minimize, SolverOptions};
use plap::space::build_space;

fn main() -> plap::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(5);
    let h = 1.0 / (n as f64 - 1.0).max(1.0);
    let space = build_space(&grid(n, h, Profile::Dipole { amplitude: 1.0 }, false)?)?;
    let reaction = ReactionParams { c: 1.0, gamma: 1.5 };
    let spec = ProblemSpec::with_space_data(&space, 2.0, reaction, 2.0)?;
    let t = std::time::Instant::now();
    let result = minimize(&space, &spec, &SolverOptions::default())?;
    println!(
        "n = {n}: J = {:.12}, iterations = {}, converged = {}, |u|_inf = {:.6}, {:?}",
        result.value,
        result.iterations,
        result.converged,
        result.u.sup_norm(),
        t.elapsed()
    );
    println!("J(0) = {:.12}", -reaction.c * space.domain_measure());
    Ok(())
}
