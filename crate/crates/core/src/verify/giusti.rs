//! Hole-filling iteration: if `phi(rho) <= theta phi(R) + A / (R - rho)^p + B`
//! for all `rho0 <= rho < R <= R0` with `theta < 1`, then
//! `phi(rho0) <= c(theta, p) (A / (R0 - rho0)^p + B)`.
//!
//! Iterating along `rho_{i+1} = rho_i + (1 - lambda) lambda^i (R0 - rho0)` gives
//! `phi(rho0) <= sum_i theta^i (A / ((1 - lambda) lambda^i (R0 - rho0))^p + B)`,
//! and for `theta^{1/p} < lambda < 1` the series sums to at most
//! `(1 - lambda)^{-p} / (1 - theta lambda^{-p})` times the bracket.

use serde::Serialize;

use crate::error::{Error, Result};

fn series_constant(theta: f64, p: f64, lambda: f64) -> f64 {
    (1.0 - lambda).powf(-p) / (1.0 - theta * lambda.powf(-p))
}

/// `min_lambda (1 - lambda)^{-p} / (1 - theta lambda^{-p})` over `(theta^{1/p}, 1)`; 1 when `theta = 0`.
pub fn giusti_constant(theta: f64, p: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::BadParams(format!("theta = {theta} must lie in [0, 1)")));
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(p));
    }
    if theta == 0.0 {
        return Ok(1.0);
    }
    // The objective is unimodal on the interval: it blows up at both ends.
    let (mut lo, mut hi) = (theta.powf(1.0 / p), 1.0);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let (mut fa, mut fb) = (series_constant(theta, p, a), series_constant(theta, p, b));
    for _ in 0..200 {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = series_constant(theta, p, a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = series_constant(theta, p, b);
        }
    }
    Ok(fa.min(fb))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GiustiReport {
    pub holds: bool,
    pub constant: f64,
    /// `phi(rho0)`.
    pub lhs: f64,
    /// `c (A / (R0 - rho0)^p + B)`.
    pub rhs: f64,
    /// Largest hypothesis excess over sample pairs (nonpositive when it holds).
    pub hypothesis_margin: f64,
}

/// Check the hypothesis on every sample pair, then the conclusion.
/// `phi` holds `(rho, phi(rho))` samples covering `[rho0, R0]`.
pub fn giusti_iteration_check(phi: &[(f64, f64)], theta: f64, a: f64, b: f64, p: f64) -> Result<GiustiReport> {
    if phi.len() < 2 {
        return Err(Error::BadParams("need at least two samples".into()));
    }
    if !(a >= 0.0 && b >= 0.0) {
        return Err(Error::BadParams("A and B must be nonnegative".into()));
    }
    let mut samples = phi.to_vec();
    samples.sort_by(|x, y| x.0.total_cmp(&y.0));
    if samples.iter().any(|s| !(s.1 >= 0.0 && s.1.is_finite())) {
        return Err(Error::BadParams("phi must be nonnegative and finite".into()));
    }
    if samples.windows(2).any(|w| w[1].0 == w[0].0) {
        return Err(Error::BadParams("phi samples must be at distinct radii".into()));
    }
    let c = giusti_constant(theta, p)?;
    let mut margin = f64::NEG_INFINITY;
    for i in 0..samples.len() {
        for j in i + 1..samples.len() {
            let (rho, f_rho) = samples[i];
            let (big_r, f_big) = samples[j];
            let bound = theta * f_big + a / (big_r - rho).powf(p) + b;
            let excess = f_rho - bound;
            margin = margin.max(excess);
            if excess > 1e-12 * bound.max(1.0) {
                return Err(Error::HypothesisFails { rho, big_r, excess });
            }
        }
    }
    let (rho0, lhs) = samples[0];
    let r0 = samples[samples.len() - 1].0;
    let rhs = c * (a / (r0 - rho0).powf(p) + b);
    Ok(GiustiReport {
        holds: lhs <= rhs * (1.0 + 1e-12),
        constant: c,
        lhs,
        rhs,
        hypothesis_margin: margin,
    })
}
