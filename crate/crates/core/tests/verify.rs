mod common;

use plap::calculus::{ScalarField, Support};
use plap::generate::Profile;
use plap::solver::{minimize, SolverOptions};
use plap::verify::{
    boundedness_report, de_giorgi_check, default_boundary_samples, dg_class_check, giusti_constant,
    giusti_iteration_check, Sample,
};
use plap::Error;

use common::dipole;

#[test]
fn giusti_constant_matches_optimal_chain() {
    // The best chain rho_{i+1} - rho_i proportional to theta^{i/(p+1)} gives
    // sum theta^i / d_i^p = (1 - theta^{1/(p+1)})^{-(p+1)} / (R0 - rho0)^p.
    for p in [1.0, 1.5, 2.0, 3.0] {
        for theta in [0.1, 0.5, 0.9] {
            let chain = (1.0 - f64::powf(theta, 1.0 / (p + 1.0))).powf(-(p + 1.0));
            let c = giusti_constant(theta, p).unwrap();
            assert!((c - chain).abs() <= 1e-9 * chain, "theta={theta} p={p}: {c} vs {chain}");
        }
    }
}

/// Iterate `phi_i = theta phi_{i+1} + 1 / (rho_{i+1} - rho_i)^p` backward from
/// `phi_n = 0` along `rho_{i+1} = rho_i + (1 - lambda) lambda^i`, carried as
/// `theta^i phi_i` so that late terms do not overflow.
fn recursion(theta: f64, p: f64, lambda: f64, n: usize) -> f64 {
    let log_ratio = theta.ln() - p * lambda.ln();
    (0..n)
        .rev()
        .fold(0.0, |scaled, i| scaled + ((i as f64) * log_ratio).exp() * (1.0 - lambda).powf(-p))
}

#[test]
fn giusti_constant_matches_recursion() {
    for p in [1.5, 2.0, 3.0] {
        let theta = 2f64.powf(p) / (1.0 + 2f64.powf(p));
        let c = giusti_constant(theta, p).unwrap();
        let lo = theta.powf(1.0 / p);
        let best = (1..4000)
            .map(|k| recursion(theta, p, lo + (1.0 - lo) * k as f64 / 4000.0, 5000))
            .fold(f64::INFINITY, f64::min);
        assert!(best >= c * (1.0 - 1e-12) && best <= c * (1.0 + 1e-4), "p={p}: {best} vs {c}");
    }
}

#[test]
fn giusti_check_on_pole_profile() {
    let (p, a) = (2.0, 1.0);
    let theta = 2f64.powf(p) / (1.0 + 2f64.powf(p));
    let pole: Vec<(f64, f64)> = (0..50)
        .map(|i| 1.0 - 0.5f64.powi(i))
        .map(|r| (r, a / (1.0 - r).powf(p)))
        .collect();
    let report = giusti_iteration_check(&pole, theta, a, 0.0, p).unwrap();
    assert!(report.holds && report.hypothesis_margin <= 0.0);
}

#[test]
fn trivial_de_giorgi_samples() {
    let space = common::unit_grid(5, dipole());
    let spec = common::spec(&space, 2.0);
    let u = minimize(&space, &spec, &SolverOptions::default()).unwrap().u;
    let y = space.vertex("l2").unwrap();
    let high = Sample { y, rho: 0.25, big_r: 0.5, alpha: u.sup_norm() + 1.0 };
    let low = Sample { y, rho: 0.25, big_r: 0.5, alpha: -u.sup_norm() - 1.0 };
    let rows = de_giorgi_check(&space, &u, &spec, &[high, low], true).unwrap();
    assert_eq!(rows[0].lhs, 0.0);
    assert!(rows[0].passes());
    assert!(rows[1].lhs > 0.0);
    assert!(rows[1].k_required_p.is_some_and(f64::is_finite));
}

#[test]
fn default_samples_pass_on_dipole_grids() {
    for n in [5, 9] {
        let space = common::unit_grid(n, dipole());
        let spec = common::spec(&space, 2.0);
        let u = minimize(&space, &spec, &SolverOptions::default()).unwrap().u;
        for relax in [false, true] {
            let samples = default_boundary_samples(&space, &u, relax);
            let rows = de_giorgi_check(&space, &u, &spec, &samples, relax).unwrap();
            assert!(rows.iter().all(|r| r.passes()), "n={n} relax={relax}");
        }
    }
}

#[test]
fn dg_class_of_constant_field_is_zero() {
    let space = common::unit_grid(5, Profile::Zero);
    let u = ScalarField::from_fn(&space, Support::Closure, |_| 0.0);
    let y = space.vertex("x2_2").unwrap();
    let samples: Vec<Sample> = [-1.0, 0.0, 1.0].iter().map(|&alpha| Sample { y, rho: 0.25, big_r: 0.5, alpha }).collect();
    let report = dg_class_check(&space, &u, 2.0, &samples).unwrap();
    assert!(report.pass);
    assert!(report.samples.iter().all(|s| s.lhs == 0.0));
    let outside = Sample { y, rho: 0.25, big_r: 1.0, alpha: 0.0 };
    assert!(matches!(dg_class_check(&space, &u, 2.0, &[outside]), Err(Error::BallNotInterior { .. })));
}

#[test]
fn boundedness_is_monotone_and_even() {
    let space = common::unit_grid(9, dipole());
    let spec = common::spec(&space, 2.0);
    let u = minimize(&space, &spec, &SolverOptions::default()).unwrap().u;
    let neg = u.scaled(-1.0);
    let mut previous = 0.0;
    for r in [0.1, 0.2, 0.3, 0.45, 0.8, 1.6, 4.0] {
        let report = boundedness_report(&space, &u, r, true, None).unwrap();
        let mirrored = boundedness_report(&space, &neg, r, true, None).unwrap();
        assert_eq!(report.sup_interior, mirrored.sup_interior);
        assert_eq!(report.sup_trace, mirrored.sup_trace);
        assert!(report.sup_interior >= previous);
        assert!(report.sup_interior <= report.sup_domain);
        previous = report.sup_interior;
    }
    let saturated = boundedness_report(&space, &u, 4.0, true, None).unwrap();
    assert_eq!(saturated.omega_r.len(), space.interior().len());
    assert!(matches!(boundedness_report(&space, &u, 0.6, false, None), Err(Error::BadRadius { .. })));
    let zero = ScalarField::zeros(&space, Support::Closure);
    let z = boundedness_report(&space, &zero, 0.3, false, None).unwrap();
    assert_eq!((z.sup_interior, z.sup_trace), (0.0, 0.0));
}
