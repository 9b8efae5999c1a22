//! Jensen and Clarkson probes on the energy.

use plap::energy::{ProblemSpec, ReactionParams};
use plap::generate::{grid, path, Profile};
use plap::solver::convexity_suite;
use plap::space::build_space;

fn main() -> plap::Result<()> {
    let fixtures = [
        ("path 4", path(4, 1.0, Profile::Dipole { amplitude: 1.0 })?),
        ("grid 3x3", grid(3, 0.5, Profile::Dipole { amplitude: 1.0 }, false)?),
        ("grid 5x5", grid(5, 0.25, Profile::Dipole { amplitude: 1.0 }, false)?),
    ];
    for (name, file) in fixtures {
        let space = build_space(&file)?;
        for p in [1.5, 2.0, 3.0] {
            let spec = ProblemSpec::with_space_data(&space, p, ReactionParams { c: 1.0, gamma: 1.5 }, 2.0)?;
            let r = convexity_suite(&space, &spec, 1000, 7)?;
            println!(
                "{name:<9} p = {p}: jensen {}/{} worst {:+.2e}  clarkson {}/{} worst {:+.2e}",
                r.jensen_violations,
                r.jensen_probes,
                r.jensen_worst_margin,
                r.clarkson_violations,
                r.clarkson_probes,
                r.clarkson_worst_margin
            );
        }
    }
    Ok(())
}
