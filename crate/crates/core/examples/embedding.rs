//! Sobolev and trace embedding constants, and the energy floor they imply.

use plap::calculus::{embedding_constants, RatioSearch};
use plap::energy::{lower_bounds, ProblemSpec, ReactionParams};
use plap::generate::{grid, Profile};
use plap::space::{build_space, structural_constants, PoincareOptions};

fn main() -> plap::Result<()> {
    for n in [3, 5, 9] {
        let h = 1.0 / (n - 1) as f64;
        let space = build_space(&grid(n, h, Profile::Dipole { amplitude: 1.0 }, false)?)?;
        let d = space.domain_diameter();
        let hyp = structural_constants(&space, &[d / 8.0, d / 4.0, d / 2.0], 2.0, &PoincareOptions::default())?;
        let emb = embedding_constants(&space, 2.0, hyp.s, 2.0, &RatioSearch::default())?;
        let spec = ProblemSpec::with_space_data(&space, 2.0, ReactionParams { c: 1.0, gamma: 1.5 }, 2.0)?;
        spec.check_gamma(emb.p_star)?;
        let bounds = lower_bounds(&space, &spec, emb.k_t);
        println!(
            "{n}x{n}: s = {:.3} p* = {:.3} K_S = {:.4} K_T = {:.4} floor = {:.4}",
            hyp.s, emb.p_star, emb.k_s, emb.k_t, bounds.explicit_floor
        );
    }
    Ok(())
}
