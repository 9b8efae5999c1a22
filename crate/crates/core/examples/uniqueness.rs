//! Compare minimizers reached from independent random starts.

use plap::energy::{ProblemSpec, ReactionParams};
use plap::generate::{grid, Profile};
use plap::solver::{multi_start_analysis, Direction, SolverOptions};
use plap::space::build_space;

fn main() -> plap::Result<()> {
    let space = build_space(&grid(5, 0.25, Profile::Dipole { amplitude: 1.0 }, false)?)?;
    let spec = ProblemSpec::with_space_data(&space, 2.0, ReactionParams { c: 1.0, gamma: 1.5 }, 2.0)?;
    for direction in [Direction::Newton, Direction::Steepest] {
        let opts = SolverOptions {
            direction,
            ..SolverOptions::default()
        };
        let t = std::time::Instant::now();
        let report = multi_start_analysis(&space, &spec, &opts)?;
        println!("{direction:?} ({:?})", t.elapsed());
        println!("  values          {:?}", report.values);
        println!("  converged       {:?}", report.converged);
        println!("  value gap       {:.3e}", report.max_value_gap);
        println!("  gradient gap    {:.3e}", report.max_gradient_gap);
        println!("  non-gradient    {:.3e}", report.max_non_gradient_gap);
        println!("  field gap (dom) {:.3e}", report.max_field_gap_domain);
        println!("  field gap (all) {:.3e}", report.max_field_gap_closure);
        println!("  midpoint excess {:.3e}", report.max_midpoint_excess);
    }
    Ok(())
}
