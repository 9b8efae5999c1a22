mod common;

use plap::calculus::{ScalarField, Support};
use plap::energy::{energy_j, ProblemSpec, ReactionParams, Variant};
use plap::generate::{grid, path, Profile};
use plap::solver::{
    brute_force_oracle, clarkson_margin, minimize, multi_start_analysis, OracleGrid, SolverOptions,
};
use plap::space::build_space;

use common::{dipole, fixtures, REACTION};

fn line_spec(space: &plap::space::MetricMeasureSpace) -> ProblemSpec {
    ProblemSpec::with_space_data(space, 2.0, ReactionParams { c: 1.0, gamma: 2.0 }, 2.0).unwrap()
}

#[test]
fn two_vertex_line_matches_oracle() {
    let space = build_space(&path(2, 1.0, dipole()).unwrap()).unwrap();
    let spec = line_spec(&space);
    let result = minimize(&space, &spec, &SolverOptions::default()).unwrap();
    assert!(result.converged);
    let oracle = brute_force_oracle(&space, &spec, &OracleGrid { lo: -1.0, hi: 1.0, step: 0.01 }).unwrap();
    let allowed = oracle.resolution_bound.max(1e-6);
    assert!(result.value <= oracle.value + 1e-12);
    assert!(oracle.value - result.value <= allowed, "{} vs {}", result.value, oracle.value);
}

#[test]
fn oracle_refinement_is_monotone() {
    let space = build_space(&path(2, 1.0, dipole()).unwrap()).unwrap();
    let spec = line_spec(&space);
    let exact = minimize(&space, &spec, &SolverOptions::default()).unwrap().value;
    let mut previous = f64::INFINITY;
    for step in [0.08, 0.04, 0.02, 0.01] {
        let value = brute_force_oracle(&space, &spec, &OracleGrid { lo: -1.0, hi: 1.0, step }).unwrap().value;
        assert!(value <= previous + 1e-12);
        assert!(value >= exact - 1e-12);
        previous = value;
    }
}

#[test]
fn zero_data_gives_zero_minimizer() {
    for (name, space) in fixtures(Profile::Zero) {
        for p in [1.5, 2.0, 3.0] {
            let spec = common::spec(&space, p);
            let result = minimize(&space, &spec, &SolverOptions::default()).unwrap();
            assert!(result.u.sup_norm() <= 1e-6, "{name} p={p}");
            assert!((result.value + REACTION.c * space.domain_measure()).abs() <= 1e-8, "{name} p={p}");
        }
    }
}

#[test]
fn single_interior_vertex_is_pinned() {
    let space = build_space(&grid(1, 1.0, Profile::Zero, false).unwrap()).unwrap();
    let oracle = brute_force_oracle(&space, &common::spec(&space, 2.0), &OracleGrid { lo: -1.0, hi: 1.0, step: 0.25 }).unwrap();
    assert_eq!(oracle.argmin[space.interior()[0]], 0.0);
    assert_eq!(oracle.value, -REACTION.c * space.domain_measure());
}

#[test]
fn minimizer_beats_zero_and_random_fields() {
    let space = common::unit_grid(3, dipole());
    let spec = common::spec(&space, 2.0);
    let result = minimize(&space, &spec, &SolverOptions::default()).unwrap();
    assert!(result.converged);
    for k in 0..50 {
        let u = plap::solver::random_start(&space, &spec, 5, k);
        assert!(energy_j(&space, &u, &spec, Variant::J).unwrap() >= result.value - 1e-12);
    }
}

#[test]
fn midpoint_of_minimizers_is_a_minimizer() {
    let space = common::unit_grid(3, dipole());
    let spec = common::spec(&space, 2.0);
    let opts = SolverOptions { starts: 4, seed: 1, ..SolverOptions::default() };
    let report = multi_start_analysis(&space, &spec, &opts).unwrap();
    assert!(report.converged.iter().all(|&c| c));
    let a = &report.results[0].u;
    let b = &report.results[report.results.len() - 1].u;
    let mid = ScalarField::new(&space, a.combine(0.5, b, 0.5).into_values(), Support::Closure).unwrap();
    let j = energy_j(&space, &mid, &spec, Variant::J).unwrap();
    assert!(j - report.best_value <= 2.0 * opts.tol * report.best_value.abs().max(1.0));
}

#[test]
fn clarkson_is_sharp_at_p2() {
    // a = 0, b = delta: both sides equal delta^2 / 4.
    for delta in [0.5, 1.0, 3.0] {
        assert!(clarkson_margin(0.0, delta, delta, 2.0).abs() < 1e-14);
        assert!(clarkson_margin(1.0, 1.0, 0.0, 2.0).abs() < 1e-14);
    }
}

#[test]
fn rough_start_converges_on_fine_grid() {
    let space = build_space(&grid(17, 0.0625, dipole(), false).unwrap()).unwrap();
    let spec = ProblemSpec::with_space_data(&space, 2.0, REACTION, 2.0).unwrap();
    let opts = SolverOptions::default();
    let zero = minimize(&space, &spec, &opts).unwrap();
    let start = plap::solver::random_start(&space, &spec, 0, 1);
    let rough = plap::solver::minimize_from(&space, &spec, &opts, &start).unwrap();
    assert!(zero.converged && rough.converged);
    assert!((rough.value - zero.value).abs() <= 1e-8 * zero.value.abs());
}
