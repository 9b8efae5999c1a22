//! Sup of the minimizer near the boundary under mesh refinement.

use plap::energy::{ProblemSpec, ReactionParams};
use plap::generate::{grid, Profile};
use plap::solver::{minimize, SolverOptions};
use plap::space::build_space;
use plap::verify::boundedness_report;

fn main() -> plap::Result<()> {
    let big_r = 0.6;
    let mut previous: Option<f64> = None;
    for n in [5, 9, 17] {
        let space = build_space(&grid(n, 1.0 / (n - 1) as f64, Profile::Dipole { amplitude: 1.0 }, false)?)?;
        let spec = ProblemSpec::with_space_data(&space, 2.0, ReactionParams { c: 1.0, gamma: 1.5 }, 2.0)?;
        let u = minimize(&space, &spec, &SolverOptions::default())?.require_converged()?.u;
        let report = boundedness_report(&space, &u, big_r, true, Some(&format!("{n}x{n}")))?;
        let ratio = previous.map(|s| report.sup_interior / s);
        println!(
            "{n:>2}x{n:<2} |Omega_R| = {:>3}  sup_Omega_R = {:.5}  sup_trace = {:.5}  ratio = {}",
            report.omega_r.len(),
            report.sup_interior,
            report.sup_trace,
            ratio.map_or("-".into(), |r| format!("{r:.3}"))
        );
        previous = Some(report.sup_interior);
    }
    Ok(())
}
