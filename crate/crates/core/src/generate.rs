//! Generators for standard test spaces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{EdgeSpec, Role, SpaceFile, VertexSpec};

/// Boundary data profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase", tag = "name")]
pub enum Profile {
    #[default]
    Zero,
    /// `+a` on one side and `-a` on the opposite side (for annuli: `a cos(theta)` on the outer ring).
    Dipole { amplitude: f64 },
}

impl Profile {
    fn amplitude(self) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::Dipole { amplitude } => amplitude,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", deny_unknown_fields)]
pub enum Generator {
    /// `n x n` domain lattice with spacing `h` and a boundary ring.
    Grid {
        n: usize,
        h: f64,
        #[serde(default)]
        profile: Profile,
        #[serde(default)]
        corners: bool,
    },
    /// `n` domain vertices on a line with a boundary vertex at each end.
    Path {
        n: usize,
        #[serde(default = "unit")]
        h: f64,
        #[serde(default)]
        profile: Profile,
    },
    /// Polar lattice with `rings` domain rings between two boundary rings.
    Annulus {
        rings: usize,
        sectors: usize,
        r_inner: f64,
        r_outer: f64,
        #[serde(default)]
        profile: Profile,
    },
}

fn unit() -> f64 {
    1.0
}

impl Generator {
    pub fn build(&self) -> Result<SpaceFile> {
        match *self {
            Generator::Grid {
                n,
                h,
                profile,
                corners,
            } => grid(n, h, profile, corners),
            Generator::Path { n, h, profile } => path(n, h, profile),
            Generator::Annulus {
                rings,
                sectors,
                r_inner,
                r_outer,
                profile,
            } => annulus(rings, sectors, r_inner, r_outer, profile),
        }
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::BadParams(format!("{name} must be positive, got {x}")))
    }
}

fn check_profile(profile: Profile) -> Result<()> {
    if profile.amplitude().is_finite() {
        Ok(())
    } else {
        Err(Error::BadParams("profile amplitude must be finite".into()))
    }
}

struct Builder {
    file: SpaceFile,
}

impl Builder {
    fn new() -> Self {
        Self {
            file: SpaceFile {
                vertices: Vec::new(),
                edges: Vec::new(),
            },
        }
    }

    fn vertex(&mut self, id: String, mu: f64, role: Role, boundary: Option<(f64, f64)>) {
        let (perimeter, f) = match boundary {
            Some((p, f)) => (Some(p), Some(f)),
            None => (None, None),
        };
        self.file.vertices.push(VertexSpec {
            id,
            mu,
            role,
            perimeter,
            f,
        });
    }

    fn edge(&mut self, a: &str, b: &str, length: f64) {
        self.file.edges.push(EdgeSpec {
            a: a.into(),
            b: b.into(),
            length,
        });
    }
}

fn interior_id(i: usize, j: usize) -> String {
    format!("x{i}_{j}")
}

/// Square lattice: domain vertices `x{i}_{j}` for `0 <= i, j < n` and boundary
/// sides `l{j}`, `r{j}`, `s{i}` (south), `t{i}` (north). Every vertex has
/// measure `h^2`, edges have length `h` and boundary vertices carry perimeter
/// `h`. With `corners`, the four ring corners are added with diagonal edges
/// to the domain corners.
pub fn grid(n: usize, h: f64, profile: Profile, corners: bool) -> Result<SpaceFile> {
    if n == 0 {
        return Err(Error::BadParams("grid size must be positive".into()));
    }
    positive("spacing", h)?;
    check_profile(profile)?;
    let a = profile.amplitude();
    let mu = h * h;
    let mut b = Builder::new();
    for i in 0..n {
        for j in 0..n {
            b.vertex(interior_id(i, j), mu, Role::Interior, None);
        }
    }
    let sides: [(&str, f64); 4] = [("l", a), ("r", -a), ("s", 0.0), ("t", 0.0)];
    for (side, f) in sides {
        for k in 0..n {
            b.vertex(format!("{side}{k}"), mu, Role::Boundary, Some((h, f)));
        }
    }
    if corners {
        for c in ["c_sw", "c_se", "c_nw", "c_ne"] {
            b.vertex(c.into(), mu, Role::Boundary, Some((h, 0.0)));
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i + 1 < n {
                b.edge(&interior_id(i, j), &interior_id(i + 1, j), h);
            }
            if j + 1 < n {
                b.edge(&interior_id(i, j), &interior_id(i, j + 1), h);
            }
        }
    }
    for k in 0..n {
        b.edge(&format!("l{k}"), &interior_id(0, k), h);
        b.edge(&format!("r{k}"), &interior_id(n - 1, k), h);
        b.edge(&format!("s{k}"), &interior_id(k, 0), h);
        b.edge(&format!("t{k}"), &interior_id(k, n - 1), h);
        if k + 1 < n {
            for side in ["l", "r", "s", "t"] {
                b.edge(&format!("{side}{k}"), &format!("{side}{}", k + 1), h);
            }
        }
    }
    if corners {
        let last = n - 1;
        let diag = h * std::f64::consts::SQRT_2;
        for (c, i, j, x, y) in [
            ("c_sw", 0, 0, "l0".to_string(), "s0".to_string()),
            ("c_se", last, 0, "r0".to_string(), format!("s{last}")),
            ("c_nw", 0, last, format!("l{last}"), "t0".to_string()),
            ("c_ne", last, last, format!("r{last}"), format!("t{last}")),
        ] {
            b.edge(c, &interior_id(i, j), diag);
            b.edge(c, &x, h);
            b.edge(c, &y, h);
        }
    }
    Ok(b.file)
}

/// Line `b0 - x1 - ... - xn - b1` with spacing `h`, measure `h` and unit perimeter at the ends.
pub fn path(n: usize, h: f64, profile: Profile) -> Result<SpaceFile> {
    if n == 0 {
        return Err(Error::BadParams("path needs at least one domain vertex".into()));
    }
    positive("spacing", h)?;
    check_profile(profile)?;
    let a = profile.amplitude();
    let mut b = Builder::new();
    b.vertex("b0".into(), h, Role::Boundary, Some((1.0, a)));
    for k in 1..=n {
        b.vertex(format!("x{k}"), h, Role::Interior, None);
    }
    b.vertex("b1".into(), h, Role::Boundary, Some((1.0, -a)));
    let mut prev = "b0".to_string();
    for k in 1..=n {
        let id = format!("x{k}");
        b.edge(&prev, &id, h);
        prev = id;
    }
    b.edge(&prev, "b1", h);
    Ok(b.file)
}

/// Polar lattice with domain rings at radii strictly between `r_inner` and
/// `r_outer` and boundary rings at both radii. Measures are polar area
/// elements `r dr dtheta`; perimeters are arc lengths `r dtheta`.
pub fn annulus(rings: usize, sectors: usize, r_inner: f64, r_outer: f64, profile: Profile) -> Result<SpaceFile> {
    if rings == 0 || sectors < 3 {
        return Err(Error::BadParams("annulus needs rings >= 1 and sectors >= 3".into()));
    }
    positive("inner radius", r_inner)?;
    if !(r_outer > r_inner && r_outer.is_finite()) {
        return Err(Error::BadParams("outer radius must exceed the inner radius".into()));
    }
    check_profile(profile)?;
    let a = profile.amplitude();
    let dr = (r_outer - r_inner) / (rings + 1) as f64;
    let dtheta = std::f64::consts::TAU / sectors as f64;
    let id = |k: usize, j: usize| format!("r{k}_{j}");
    let mut b = Builder::new();
    for k in 0..rings + 2 {
        let r = r_inner + k as f64 * dr;
        for j in 0..sectors {
            let theta = j as f64 * dtheta;
            if k == 0 {
                b.vertex(id(k, j), r * dr * dtheta, Role::Boundary, Some((r * dtheta, 0.0)));
            } else if k == rings + 1 {
                let f = a * theta.cos();
                b.vertex(id(k, j), r * dr * dtheta, Role::Boundary, Some((r * dtheta, f)));
            } else {
                b.vertex(id(k, j), r * dr * dtheta, Role::Interior, None);
            }
        }
    }
    for k in 0..rings + 2 {
        let r = r_inner + k as f64 * dr;
        let chord = 2.0 * r * (dtheta / 2.0).sin();
        for j in 0..sectors {
            b.edge(&id(k, j), &id(k, (j + 1) % sectors), chord);
            if k + 1 < rings + 2 {
                b.edge(&id(k, j), &id(k + 1, j), dr);
            }
        }
    }
    let mut file = b.file;
    // cos(theta) sums to zero only up to rounding; remove the residual on the outer ring.
    let outer: Vec<usize> = (0..file.vertices.len())
        .filter(|&v| file.vertices[v].id.starts_with(&format!("r{}_", rings + 1)))
        .collect();
    let residual: f64 = outer.iter().map(|&v| file.vertices[v].f.unwrap_or(0.0)).sum::<f64>() / outer.len() as f64;
    for &v in &outer {
        if let Some(f) = file.vertices[v].f.as_mut() {
            *f -= residual;
        }
    }
    Ok(file)
}
