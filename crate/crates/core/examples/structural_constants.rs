//! Doubling, codimension-one and Poincaré constants of generated spaces.

use plap::generate::{annulus, grid, path, Profile};
use plap::space::{build_space, structural_constants, PoincareOptions};

fn main() -> plap::Result<()> {
    let spaces = [
        ("path 5", path(5, 1.0, Profile::Zero)?),
        ("grid 5x5", grid(5, 0.25, Profile::Zero, false)?),
        ("grid 5x5 + corners", grid(5, 0.25, Profile::Zero, true)?),
        ("annulus 3x12", annulus(3, 12, 1.0, 2.0, Profile::Zero)?),
    ];
    println!("{:<20} {:>8} {:>8} {:>8} {:>8} {:>8}", "space", "K_D", "s", "K_H1", "K_H2", "K_P");
    for (name, file) in spaces {
        let space = build_space(&file)?;
        let d = space.domain_diameter();
        let report = structural_constants(&space, &[d / 8.0, d / 4.0, d / 2.0], 2.0, &PoincareOptions::default())?;
        println!(
            "{name:<20} {:>8.3} {:>8.3} {:>8.3} {:>8.3} {:>8.3}",
            report.k_d, report.s, report.k_h1, report.k_h2, report.k_p
        );
        if report.poincare_skipped > 0 {
            println!("  {} balls with disconnected interior skipped", report.poincare_skipped);
        }
    }
    Ok(())
}
