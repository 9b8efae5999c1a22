mod common;

use plap::calculus::{
    embedding_constants, is_upper_gradient, max_slope_gradient, minimal_weak_gradient, p_modulus, weighted_norm,
    PathFamily, RatioSearch, ScalarField, Support, DEFAULT_PATH_CAP,
};
use plap::calculus::EmbeddingConstants;
use plap::generate::{grid, path, Profile};
use plap::space::{build_space, EdgeSpec, Role, SpaceFile, VertexSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn two_vertex(m: f64, len: f64) -> plap::space::MetricMeasureSpace {
    let v = |id: &str, role| VertexSpec {
        id: id.into(),
        mu: m,
        role,
        perimeter: None,
        f: None,
    };
    build_space(&SpaceFile {
        vertices: vec![v("a", Role::Interior), v("b", Role::Boundary)],
        edges: vec![EdgeSpec {
            a: "a".into(),
            b: "b".into(),
            length: len,
        }],
    })
    .unwrap()
}

#[test]
fn minimal_gradient_on_unit_edge() {
    let space = two_vertex(1.0, 1.0);
    let u = ScalarField::new(&space, vec![0.0, 1.0], Support::All).unwrap();
    let g = minimal_weak_gradient(&space, &u, 2.0).unwrap();
    // Dense grid oracle for min g1^2 + g2^2 subject to g1 + g2 >= 2.
    let mut best = f64::INFINITY;
    for i in 0..=400 {
        let g1 = i as f64 / 200.0;
        let g2 = (2.0 - g1).max(0.0);
        best = best.min(g1 * g1 + g2 * g2);
    }
    let objective: f64 = g.values().iter().map(|x| x * x).sum();
    assert!((objective - best).abs() < 1e-6);
    assert!((g.get(0) - 1.0).abs() < 1e-4 && (g.get(1) - 1.0).abs() < 1e-4);
}

#[test]
fn single_edge_modulus_closed_form() {
    for m in [0.5, 1.0, 2.0] {
        for len in [0.5, 1.0, 2.0] {
            let space = two_vertex(m, len);
            let family = PathFamily::new(&space, vec![vec![0, 1]]).unwrap();
            for p in [1.0, 2.0] {
                // Grid oracle over phi(a), with phi(b) = 2 / len - phi(a) on the active constraint.
                let mut best = f64::INFINITY;
                for i in 0..=2000 {
                    let a = 2.0 / len * i as f64 / 2000.0;
                    let b = 2.0 / len - a;
                    best = best.min(m * (a.powf(p) + b.powf(p)));
                }
                let value = p_modulus(&space, &family, p).unwrap();
                assert!((value - best).abs() < 1e-5 * best.max(1.0), "m={m} L={len} p={p}");
                assert!((value - 2.0 * m / len.powf(p)).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn trace_constant_matches_dense_scan() {
    // b0 - x1 - x2 - b1 with unit weights; mean zero forces u(x2) = -u(x1).
    let space = build_space(&path(2, 1.0, Profile::Zero).unwrap()).unwrap();
    let (p, q) = (2.0, 2.0);
    let ratio = |a: f64, t: f64, b: f64| {
        let g1 = (t - a).abs().max(2.0 * t.abs());
        let g2 = (2.0 * t.abs()).max((t + b).abs());
        (a * a + b * b).sqrt() / (g1 * g1 + g2 * g2).sqrt()
    };
    let steps = 200;
    let mut scan: f64 = 0.0;
    for i in 0..=steps {
        for j in 0..=steps {
            for k in 0..=steps {
                let s = |n: usize| -1.0 + 2.0 * n as f64 / steps as f64;
                let r = ratio(s(i), s(j), s(k));
                if r.is_finite() {
                    scan = scan.max(r);
                }
            }
        }
    }
    let constants = embedding_constants(&space, p, 2.0, q, &RatioSearch::default()).unwrap();
    assert!(constants.k_t >= scan * (1.0 - 1e-4), "K_T {} below scan {scan}", constants.k_t);
    assert!(constants.k_t <= scan * 1.01, "K_T {} above scan {scan}", constants.k_t);
    let a = [0.3, 0.1, -0.1, 0.7];
    let u = vec![a[0], a[1], -a[1], a[3]];
    assert!((EmbeddingConstants::trace_ratio(&space, &u, p, q) - ratio(a[0], a[1], a[3])).abs() < 1e-12);
}

#[test]
fn embedding_samples_respect_constants() {
    let space = common::unit_grid(3, Profile::Zero);
    let c = embedding_constants(&space, 2.0, 2.0, 2.0, &RatioSearch { starts: 16, iterations: 100, seed: 3 }).unwrap();
    assert!(!c.samples.is_empty());
    for s in &c.samples {
        assert!(s.sobolev_ratio <= c.k_s && s.trace_ratio <= c.k_t);
    }
}

#[test]
fn trace_constant_dominates_linear_field_on_fine_grid() {
    let n = 17;
    let space = common::unit_grid(n, Profile::Zero);
    let centre = (n - 1) as f64 / 2.0;
    let column = |id: &str| -> f64 {
        let rest = &id[1..];
        match &id[..1] {
            "x" => rest.split('_').next().unwrap().parse().unwrap(),
            "l" => -1.0,
            "r" => n as f64,
            _ => rest.parse().unwrap(),
        }
    };
    let u: Vec<f64> = space.ids().iter().map(|id| column(id) - centre).collect();
    let linear = EmbeddingConstants::trace_ratio(&space, &u, 2.0, 2.0);
    let c = embedding_constants(&space, 2.0, 2.0, 2.0, &RatioSearch::default()).unwrap();
    assert!(c.k_t >= linear, "K_T {} below linear-field ratio {}", c.k_t, linear);
}

#[test]
fn modulus_is_monotone_under_inclusion() {
    let space = build_space(&grid(2, 1.0, Profile::Zero, false).unwrap()).unwrap();
    let all = PathFamily::connecting(&space, space.boundary(), space.boundary(), 4);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let mut chosen: Vec<_> = all.paths.iter().filter(|_| rng.gen_bool(0.3)).cloned().collect();
        if chosen.is_empty() {
            chosen.push(all.paths[0].clone());
        }
        let small = PathFamily::new(&space, chosen.clone()).unwrap();
        chosen.extend(all.paths.iter().filter(|_| rng.gen_bool(0.3)).cloned());
        let big = PathFamily::new(&space, chosen).unwrap();
        for p in [1.0, 2.0] {
            let (a, b) = (p_modulus(&space, &small, p).unwrap(), p_modulus(&space, &big, p).unwrap());
            assert!(a <= b + 1e-9, "p={p} small={a} big={b} sizes {} {}", small.len(), big.len());
        }
    }
}

fn small_graph() -> impl Strategy<Value = (SpaceFile, Vec<f64>)> {
    (2usize..10, proptest::collection::vec(0.2f64..2.0, 40), proptest::collection::vec(-3.0f64..3.0, 12))
        .prop_map(|(n, w, u)| {
            let mut vertices: Vec<VertexSpec> = (0..n)
                .map(|i| VertexSpec {
                    id: format!("v{i}"),
                    mu: w[i],
                    role: Role::Interior,
                    perimeter: None,
                    f: None,
                })
                .collect();
            vertices.push(VertexSpec {
                id: "b".into(),
                mu: w[n],
                role: Role::Boundary,
                perimeter: Some(1.0),
                f: Some(0.0),
            });
            let mut edges = vec![EdgeSpec { a: "v0".into(), b: "b".into(), length: w[n + 1] }];
            for i in 1..n {
                edges.push(EdgeSpec { a: format!("v{}", i - 1), b: format!("v{i}"), length: w[n + 1 + i] });
            }
            if n > 2 {
                edges.push(EdgeSpec { a: format!("v{}", n - 1), b: "b".into(), length: w[2 * n + 2] });
            }
            let values = u[..=n].to_vec();
            (SpaceFile { vertices, edges }, values)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn max_slope_is_an_upper_gradient((file, values) in small_graph()) {
        let space = build_space(&file).unwrap();
        prop_assert!(space.len() <= 12);
        let u = ScalarField::new(&space, values, Support::All).unwrap();
        let g = max_slope_gradient(&space, &u).unwrap();
        prop_assert!(is_upper_gradient(&space, &u, &g, DEFAULT_PATH_CAP));
        let all: Vec<_> = (0..space.len()).collect();
        for p in [1.5, 2.0, 3.0] {
            let weak = minimal_weak_gradient(&space, &u, p).unwrap();
            let lhs = weighted_norm(weak.values(), space.measures(), &all, p);
            let rhs = weighted_norm(g.values(), space.measures(), &all, p);
            prop_assert!(lhs <= rhs * (1.0 + 1e-9) + 1e-12);
        }
    }
}
