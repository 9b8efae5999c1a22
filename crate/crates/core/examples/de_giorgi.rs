//! De Giorgi ratios at the boundary for a computed minimizer.

use plap::energy::{ProblemSpec, ReactionParams};
use plap::generate::{grid, Profile};
use plap::solver::{minimize, SolverOptions};
use plap::space::build_space;
use plap::verify::{de_giorgi_check, default_boundary_samples, summarize};

fn main() -> plap::Result<()> {
    for n in [5, 9] {
        let h = 1.0 / (n as f64 - 1.0);
        let space = build_space(&grid(n, h, Profile::Dipole { amplitude: 1.0 }, false)?)?;
        let spec = ProblemSpec::with_space_data(&space, 2.0, ReactionParams { c: 1.0, gamma: 1.5 }, 2.0)?;
        let result = minimize(&space, &spec, &SolverOptions::default())?;
        for relax in [false, true] {
            let samples = default_boundary_samples(&space, &result.u, relax);
            let rows = de_giorgi_check(&space, &result.u, &spec, &samples, relax)?;
            let summary = summarize(&rows);
            println!(
                "{n}x{n} relax={relax}: {} samples, K_max_p = {:.6}, K_max_1 = {:.6}, {:?}",
                rows.len(),
                summary.k_max_p,
                summary.k_max_1,
                summary.pass_counts
            );
        }
    }
    Ok(())
}
