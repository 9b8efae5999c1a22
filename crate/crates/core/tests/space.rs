#![allow(clippy::needless_range_loop)]

mod common;

use plap::generate::{grid, path, Profile};
use plap::space::{build_space, doubling_constant, EdgeSpec, Role, SpaceFile, VertexSpec};
use plap::Error;
use proptest::prelude::*;

use common::floyd_warshall;

#[test]
fn grid_distances_match_floyd_warshall() {
    for corners in [false, true] {
        let space = build_space(&grid(3, 0.25, Profile::Zero, corners).unwrap()).unwrap();
        let oracle = floyd_warshall(&space);
        for a in 0..space.len() {
            for b in 0..space.len() {
                assert!((space.dist(a, b) - oracle[a][b]).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn opposite_ring_vertices_are_a_lattice_path_apart() {
    // l0 sits west of x0_0 and r2 east of x2_2: 2 + 2 lattice steps plus one step in and out.
    let space = build_space(&grid(3, 0.25, Profile::Zero, false).unwrap()).unwrap();
    let (a, b) = (space.vertex("l0").unwrap(), space.vertex("r2").unwrap());
    assert!((space.dist(a, b) - 6.0 * 0.25).abs() < 1e-12);
}

#[test]
fn left_half_perimeter_matches_cut_enumeration() {
    let h = 0.5;
    let file = grid(4, h, Profile::Zero, false).unwrap();
    let space = build_space(&file).unwrap();
    let in_e = |id: &str| {
        id.strip_prefix('x')
            .and_then(|rest| rest.split('_').next())
            .and_then(|i| i.parse::<usize>().ok())
            .is_some_and(|i| i < 2)
    };
    let mu = |id: &str| file.vertices.iter().find(|v| v.id == id).unwrap().mu;
    let oracle: f64 = file
        .edges
        .iter()
        .filter(|e| in_e(&e.a) != in_e(&e.b))
        .map(|e| mu(&e.a).min(mu(&e.b)) / e.length)
        .sum();
    let e: Vec<_> = (0..space.len()).filter(|&v| in_e(space.id(v))).collect();
    let all: Vec<_> = (0..space.len()).collect();
    assert_eq!(e.len(), 8);
    assert!((space.perimeter(&e, &all) - oracle).abs() < 1e-12);
    assert!(space.perimeter(&[], &all).abs() == 0.0);
}

#[test]
fn doubling_constant_on_five_vertex_path() {
    let space = build_space(&path(3, 1.0, Profile::Zero).unwrap()).unwrap();
    let grid = [0.5, 1.0, 2.0];
    let n = space.len() as i64;
    let mass = |c: i64, r: f64| (0..n).filter(|&j| ((j - c).abs() as f64) <= r).count() as f64;
    let oracle = (0..n)
        .flat_map(|c| grid.iter().map(move |&r| (c, r)))
        .map(|(c, r)| mass(c, 2.0 * r) / mass(c, r))
        .fold(0.0, f64::max);
    assert_eq!(oracle, 3.0);
    assert!((doubling_constant(&space, &grid) - oracle).abs() < 1e-12);
}

#[test]
fn saturated_ball_gives_unit_doubling() {
    let space = build_space(&path(3, 1.0, Profile::Zero).unwrap()).unwrap();
    assert_eq!(doubling_constant(&space, &[10.0]), 1.0);
}

fn vertex(id: &str, role: Role) -> VertexSpec {
    VertexSpec {
        id: id.into(),
        mu: 1.0,
        role,
        perimeter: None,
        f: None,
    }
}

fn edge(a: &str, b: &str, length: f64) -> EdgeSpec {
    EdgeSpec {
        a: a.into(),
        b: b.into(),
        length,
    }
}

#[test]
fn zero_length_edge_is_rejected() {
    let file = SpaceFile {
        vertices: vec![vertex("a", Role::Interior), vertex("b", Role::Boundary)],
        edges: vec![edge("a", "b", 0.0)],
    };
    assert!(matches!(build_space(&file), Err(Error::NonpositiveWeight { .. })));
}

#[test]
fn disconnected_graph_is_rejected() {
    let file = SpaceFile {
        vertices: vec![
            vertex("a", Role::Interior),
            vertex("b", Role::Boundary),
            vertex("c", Role::Interior),
            vertex("d", Role::Boundary),
        ],
        edges: vec![edge("a", "b", 1.0), edge("c", "d", 1.0)],
    };
    assert!(matches!(build_space(&file), Err(Error::DisconnectedGraph(_))));
}

#[test]
fn file_round_trip_preserves_space() {
    let space = build_space(&grid(3, 0.5, Profile::Dipole { amplitude: 2.0 }, true).unwrap()).unwrap();
    let again = build_space(&SpaceFile::from_json(&serde_json::to_string(&space.to_file()).unwrap()).unwrap()).unwrap();
    assert_eq!(space.len(), again.len());
    for v in 0..space.len() {
        assert_eq!(space.perimeter_weight(v), again.perimeter_weight(v));
        assert_eq!(space.boundary_data()[v], again.boundary_data()[v]);
    }
}

fn random_space() -> impl Strategy<Value = SpaceFile> {
    (2usize..8, proptest::collection::vec((0.1f64..3.0, 0.1f64..2.0), 16), proptest::collection::vec((0usize..8, 0usize..8, 0.1f64..2.0), 0..10))
        .prop_map(|(n, weights, extra)| {
            let mut vertices: Vec<VertexSpec> = (0..n)
                .map(|i| VertexSpec {
                    mu: weights[i].0,
                    ..vertex(&format!("v{i}"), Role::Interior)
                })
                .collect();
            vertices.push(VertexSpec {
                perimeter: Some(1.0),
                f: Some(0.0),
                ..vertex("b", Role::Boundary)
            });
            let mut edges: Vec<EdgeSpec> = (1..n).map(|i| edge(&format!("v{}", i - 1), &format!("v{i}"), weights[i].1)).collect();
            edges.push(edge("v0", "b", weights[0].1));
            for (a, b, len) in extra {
                let (a, b) = (a % n, b % n);
                if a != b && !edges.iter().any(|e| (e.a == format!("v{a}") && e.b == format!("v{b}")) || (e.a == format!("v{b}") && e.b == format!("v{a}"))) {
                    edges.push(edge(&format!("v{a}"), &format!("v{b}"), len));
                }
            }
            SpaceFile { vertices, edges }
        })
}

proptest! {
    #[test]
    fn metric_properties(file in random_space()) {
        let space = build_space(&file).unwrap();
        let oracle = floyd_warshall(&space);
        let n = space.len();
        for a in 0..n {
            for b in 0..n {
                prop_assert!((space.dist(a, b) - oracle[a][b]).abs() < 1e-9);
                prop_assert_eq!(space.dist(a, b), space.dist(b, a));
                for c in 0..n {
                    prop_assert!(space.dist(a, c) <= space.dist(a, b) + space.dist(b, c) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn balls_are_nested(file in random_space(), r in 0.0f64..4.0) {
        let space = build_space(&file).unwrap();
        for y in 0..space.len() {
            let small = space.ball(y, r).members;
            let big = space.ball(y, 2.0 * r).members;
            prop_assert!(small.contains(&y));
            prop_assert!(small.iter().all(|v| big.contains(v)));
        }
    }
}
