#![allow(dead_code)]

use plap::energy::{ProblemSpec, ReactionParams};
use plap::generate::{annulus, grid, path, Profile};
use plap::space::{build_space, MetricMeasureSpace};

pub const REACTION: ReactionParams = ReactionParams { c: 1.0, gamma: 1.5 };

pub fn dipole() -> Profile {
    Profile::Dipole { amplitude: 1.0 }
}

pub fn unit_grid(n: usize, profile: Profile) -> MetricMeasureSpace {
    build_space(&grid(n, 1.0 / (n - 1).max(1) as f64, profile, false).unwrap()).unwrap()
}

/// The fixture set used by the "all fixtures" checks.
pub fn fixtures(profile: Profile) -> Vec<(&'static str, MetricMeasureSpace)> {
    vec![
        ("path1", build_space(&path(1, 1.0, profile).unwrap()).unwrap()),
        ("path3", build_space(&path(3, 0.5, profile).unwrap()).unwrap()),
        ("grid1", build_space(&grid(1, 1.0, profile, false).unwrap()).unwrap()),
        ("grid3", unit_grid(3, profile)),
        ("grid3c", build_space(&grid(3, 0.5, profile, true).unwrap()).unwrap()),
        ("grid5", unit_grid(5, profile)),
        ("annulus", build_space(&annulus(2, 8, 1.0, 2.0, profile).unwrap()).unwrap()),
    ]
}

pub fn spec(space: &MetricMeasureSpace, p: f64) -> ProblemSpec {
    ProblemSpec::with_space_data(space, p, REACTION, 2.0).unwrap()
}

/// All-pairs shortest paths by Floyd-Warshall over the edge list.
pub fn floyd_warshall(space: &MetricMeasureSpace) -> Vec<Vec<f64>> {
    let n = space.len();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0.0;
    }
    for e in space.edges() {
        d[e.a][e.b] = d[e.a][e.b].min(e.length);
        d[e.b][e.a] = d[e.b][e.a].min(e.length);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}
