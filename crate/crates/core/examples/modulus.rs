//! p-modulus of path families.

use plap::calculus::{p_modulus, PathFamily};
use plap::generate::{grid, Profile};
use plap::space::{build_space, EdgeSpec, Role, SpaceFile, VertexSpec};

fn main() -> plap::Result<()> {
    // One edge of length L between two vertices of measure m: Mod_p = 2 m / L^p.
    let (m, len) = (0.5, 2.0);
    let v = |id: &str, role| VertexSpec {
        id: id.into(),
        mu: m,
        role,
        perimeter: None,
        f: None,
    };
    let edge = build_space(&SpaceFile {
        vertices: vec![v("a", Role::Interior), v("b", Role::Boundary)],
        edges: vec![EdgeSpec {
            a: "a".into(),
            b: "b".into(),
            length: len,
        }],
    })?;
    let family = PathFamily::new(&edge, vec![vec![0, 1]])?;
    for p in [1.0, 2.0, 3.0] {
        println!("edge p = {p}: {:.10} (closed form {:.10})", p_modulus(&edge, &family, p)?, 2.0 * m / len.powf(p));
    }

    // Paths from the left side to the right side of a grid; longer caps give more paths.
    let space = build_space(&grid(3, 0.5, Profile::Zero, false)?)?;
    let left: Vec<_> = ["l0", "l1", "l2"].iter().map(|id| space.vertex(id)).collect::<plap::Result<_>>()?;
    let right: Vec<_> = ["r0", "r1", "r2"].iter().map(|id| space.vertex(id)).collect::<plap::Result<_>>()?;
    for cap in [4, 5, 6] {
        let family = PathFamily::connecting(&space, &left, &right, cap);
        println!("left-right cap {cap}: {} paths, Mod_2 = {:.6}", family.len(), p_modulus(&space, &family, 2.0)?);
    }
    Ok(())
}
