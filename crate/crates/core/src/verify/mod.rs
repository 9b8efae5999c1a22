//! Checks on computed minimizers: De Giorgi inequalities at the boundary,
//! De Giorgi class membership in the interior, boundedness near the
//! boundary, and the hole-filling iteration.

mod giusti;

pub use giusti::{giusti_constant, giusti_iteration_check, GiustiReport};

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::calculus::{ScalarField, SlopeStencil};
use crate::energy::{check_radii, ProblemSpec};
use crate::error::{Error, Result};
use crate::space::{MetricMeasureSpace, Role, VertexId};

/// One boundary sample `(y, rho, R, alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub y: VertexId,
    pub rho: f64,
    pub big_r: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeGiorgiSample {
    pub y: String,
    pub rho: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub alpha: f64,
    pub lhs: f64,
    pub volume_term: f64,
    pub boundary_term_p: f64,
    pub boundary_term_1: f64,
    #[serde(rename = "K_required_p")]
    pub k_required_p: Option<f64>,
    #[serde(rename = "K_required_1")]
    pub k_required_1: Option<f64>,
}

impl DeGiorgiSample {
    /// Finite constant, or vanishing left side when no constant is defined.
    pub fn passes(&self) -> bool {
        match self.k_required_p {
            Some(k) => k.is_finite(),
            None => self.lhs == 0.0,
        }
    }
}

fn required(lhs: f64, denom: f64) -> Option<f64> {
    (denom > 0.0).then(|| lhs / denom)
}

/// Positive part `(u - alpha)_+` on the closure.
fn truncate(space: &MetricMeasureSpace, u: &[f64], alpha: f64) -> Vec<f64> {
    (0..space.len())
        .map(|v| {
            if space.role(v) == Role::Exterior {
                0.0
            } else {
                (u[v] - alpha).max(0.0)
            }
        })
        .collect()
}

pub fn de_giorgi_check(
    space: &MetricMeasureSpace,
    u: &ScalarField,
    spec: &ProblemSpec,
    samples: &[Sample],
    relax: bool,
) -> Result<Vec<DeGiorgiSample>> {
    let p = spec.p;
    for s in samples {
        check_radii(space, s.rho, s.big_r, relax)?;
        if !space.is_boundary(s.y) {
            return Err(Error::BadParams(format!(
                "De Giorgi center `{}` is not a boundary vertex",
                space.id(s.y)
            )));
        }
    }
    let stencil = SlopeStencil::energy(space);
    let out = samples
        .par_iter()
        .map(|s| {
            let v = truncate(space, u.values(), s.alpha);
            let g = stencil.slope_field(&v, space.len());
            let inner = space.ball(s.y, s.rho).members;
            let outer = space.ball(s.y, s.big_r).members;
            let lhs: f64 = inner
                .iter()
                .filter(|&&x| space.is_interior(x))
                .map(|&x| g[x].powf(p) * space.mu(x))
                .sum();
            let volume_term: f64 = outer
                .iter()
                .filter(|&&x| space.is_interior(x))
                .map(|&x| v[x].powf(p) * space.mu(x))
                .sum();
            let width = s.big_r - s.rho;
            let (mut boundary_term_p, mut boundary_term_1) = (0.0, 0.0);
            for &z in outer.iter().filter(|&&z| space.is_boundary(z)) {
                let weight = spec.f.get(z).abs() * space.perimeter_weight(z);
                let tau = (1.0 - space.dist_to_set(z, &inner) / width).max(0.0);
                boundary_term_p += weight * v[z].powf(p);
                boundary_term_1 += weight * tau * v[z];
            }
            let volume = volume_term / width.powf(p);
            DeGiorgiSample {
                y: space.id(s.y).to_string(),
                rho: s.rho,
                big_r: s.big_r,
                alpha: s.alpha,
                lhs,
                volume_term,
                boundary_term_p,
                boundary_term_1,
                k_required_p: required(lhs, volume + boundary_term_p),
                k_required_1: required(lhs, volume + boundary_term_1),
            }
        })
        .collect();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub struct PassCounts {
    pub finite: usize,
    pub not_applicable: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeGiorgiSummary {
    #[serde(rename = "K_max_p")]
    pub k_max_p: f64,
    #[serde(rename = "K_max_1")]
    pub k_max_1: f64,
    pub pass_counts: PassCounts,
}

pub fn summarize(samples: &[DeGiorgiSample]) -> DeGiorgiSummary {
    let mut counts = PassCounts::default();
    let (mut k_p, mut k_1) = (0.0f64, 0.0f64);
    for s in samples {
        match (s.k_required_p, s.passes()) {
            (_, false) => counts.failed += 1,
            (Some(_), true) => counts.finite += 1,
            (None, true) => counts.not_applicable += 1,
        }
        k_p = k_p.max(s.k_required_p.unwrap_or(0.0));
        k_1 = k_1.max(s.k_required_1.unwrap_or(0.0));
    }
    DeGiorgiSummary {
        k_max_p: k_p,
        k_max_1: k_1,
        pass_counts: counts,
    }
}

/// Level quantiles used by the default sample grids.
pub const LEVEL_QUANTILES: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
/// Outer radii as fractions of `diam(Ω) / 10` (or of `diam(Ω)` when relaxed).
pub const RADIUS_FRACTIONS: [f64; 3] = [0.2, 0.35, 0.5];

fn levels(space: &MetricMeasureSpace, u: &[f64]) -> Vec<f64> {
    let (lo, hi) = space
        .closure()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(u[v]), b.max(u[v])));
    LEVEL_QUANTILES.iter().map(|q| lo + q * (hi - lo)).collect()
}

fn outer_radii(space: &MetricMeasureSpace, relax: bool) -> Vec<f64> {
    let base = space.domain_diameter() / if relax { 1.0 } else { 10.0 };
    // A one-vertex domain has diameter zero and no admissible radii.
    RADIUS_FRACTIONS.iter().map(|f| f * base).filter(|&r| r > 0.0).collect()
}

/// Boundary samples: every boundary vertex, the three default outer radii
/// with `rho = R / 2`, and five levels across the range of `u`.
pub fn default_boundary_samples(space: &MetricMeasureSpace, u: &ScalarField, relax: bool) -> Vec<Sample> {
    let alphas = levels(space, u.values());
    let radii = outer_radii(space, relax);
    let mut out = Vec::new();
    for &y in space.boundary() {
        for &big_r in &radii {
            for &alpha in &alphas {
                out.push(Sample {
                    y,
                    rho: big_r / 2.0,
                    big_r,
                    alpha,
                });
            }
        }
    }
    out
}

/// Interior samples: domain centers whose default balls stay inside the domain.
pub fn default_interior_samples(space: &MetricMeasureSpace, u: &ScalarField, relax: bool) -> Vec<Sample> {
    let alphas = levels(space, u.values());
    let radii = outer_radii(space, relax);
    let mut out = Vec::new();
    for &y in space.interior() {
        for &big_r in &radii {
            if !ball_in_domain(space, y, big_r) {
                continue;
            }
            for &alpha in &alphas {
                out.push(Sample {
                    y,
                    rho: big_r / 2.0,
                    big_r,
                    alpha,
                });
            }
        }
    }
    out
}

fn ball_in_domain(space: &MetricMeasureSpace, y: VertexId, r: f64) -> bool {
    space.ball(y, r).members.iter().all(|&v| space.is_interior(v))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DgSample {
    pub y: String,
    pub rho: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub alpha: f64,
    pub lhs: f64,
    pub rhs_core: f64,
    #[serde(rename = "K")]
    pub k: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DgClassReport {
    #[serde(rename = "K")]
    pub k: f64,
    pub pass: bool,
    pub pass_counts: PassCounts,
    pub samples: Vec<DgSample>,
}

/// Caccioppoli-type ratios `sum_{B(y,rho)} g_v^p mu / (sum_{B(y,R)} v^p mu / (R - rho)^p)`
/// for `v = (u - alpha)_+` on balls inside the domain.
pub fn dg_class_check(space: &MetricMeasureSpace, u: &ScalarField, p: f64, samples: &[Sample]) -> Result<DgClassReport> {
    for s in samples {
        if !(s.rho > 0.0 && s.rho < s.big_r) {
            return Err(Error::BadRadii {
                rho: s.rho,
                big_r: s.big_r,
                bound: String::new(),
            });
        }
        if !ball_in_domain(space, s.y, s.big_r) {
            return Err(Error::BallNotInterior {
                center: space.id(s.y).to_string(),
                radius: s.big_r,
            });
        }
    }
    let stencil = SlopeStencil::energy(space);
    let rows: Vec<DgSample> = samples
        .par_iter()
        .map(|s| {
            let v = truncate(space, u.values(), s.alpha);
            let g = stencil.slope_field(&v, space.len());
            let lhs: f64 = space
                .ball(s.y, s.rho)
                .members
                .iter()
                .map(|&x| g[x].powf(p) * space.mu(x))
                .sum();
            let rhs_core: f64 = space
                .ball(s.y, s.big_r)
                .members
                .iter()
                .map(|&x| v[x].powf(p) * space.mu(x))
                .sum::<f64>()
                / (s.big_r - s.rho).powf(p);
            DgSample {
                y: space.id(s.y).to_string(),
                rho: s.rho,
                big_r: s.big_r,
                alpha: s.alpha,
                lhs,
                rhs_core,
                k: required(lhs, rhs_core),
            }
        })
        .collect();
    let mut counts = PassCounts::default();
    let mut k: f64 = 0.0;
    for r in &rows {
        match r.k {
            Some(x) if x.is_finite() => {
                counts.finite += 1;
                k = k.max(x);
            }
            Some(_) => counts.failed += 1,
            None if r.lhs == 0.0 => counts.not_applicable += 1,
            None => counts.failed += 1,
        }
    }
    Ok(DgClassReport {
        k,
        pass: counts.failed == 0,
        pass_counts: counts,
        samples: rows,
    })
}

/// [`dg_class_check`] for `u` and `-u` on the same samples.
pub fn dg_class_both(
    space: &MetricMeasureSpace,
    u: &ScalarField,
    p: f64,
    samples: &[Sample],
) -> Result<(DgClassReport, DgClassReport)> {
    let neg = -u;
    let mirrored: Vec<Sample> = samples.iter().map(|s| Sample { alpha: -s.alpha, ..*s }).collect();
    Ok((dg_class_check(space, u, p, samples)?, dg_class_check(space, &neg, p, &mirrored)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundednessReport {
    #[serde(rename = "R")]
    pub big_r: f64,
    pub mesh: Option<String>,
    /// Domain vertices within distance `R / 2` of the boundary.
    pub omega_r: Vec<String>,
    pub sup_interior: f64,
    pub sup_trace: f64,
    pub sup_domain: f64,
}

pub fn boundedness_report(
    space: &MetricMeasureSpace,
    u: &ScalarField,
    big_r: f64,
    relax: bool,
    mesh: Option<&str>,
) -> Result<BoundednessReport> {
    let limit = space.domain_diameter() / 4.0;
    if !(big_r > 0.0 && big_r.is_finite()) || (!relax && big_r >= limit) {
        return Err(Error::BadRadius {
            radius: big_r,
            limit: if relax { f64::INFINITY } else { limit },
        });
    }
    let values = u.values();
    let omega: Vec<VertexId> = space
        .interior()
        .iter()
        .copied()
        .filter(|&y| space.dist_to_set(y, space.boundary()) < big_r / 2.0)
        .collect();
    let sup = |set: &[VertexId]| set.iter().fold(0.0f64, |m, &v| m.max(values[v].abs()));
    Ok(BoundednessReport {
        big_r,
        mesh: mesh.map(str::to_string),
        omega_r: omega.iter().map(|&v| space.id(v).to_string()).collect(),
        sup_interior: sup(&omega),
        sup_trace: sup(space.boundary()),
        sup_domain: sup(space.interior()),
    })
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:e}")).unwrap_or_default()
}

/// CSV with columns `y, rho, R, alpha, lhs, volume_term, boundary_term_p,
/// boundary_term_1, K_required_p, K_required_1`; undefined constants are empty.
pub fn write_de_giorgi_csv<W: Write>(out: W, samples: &[DeGiorgiSample]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "y",
        "rho",
        "R",
        "alpha",
        "lhs",
        "volume_term",
        "boundary_term_p",
        "boundary_term_1",
        "K_required_p",
        "K_required_1",
    ])?;
    for s in samples {
        w.write_record([
            s.y.clone(),
            format!("{:e}", s.rho),
            format!("{:e}", s.big_r),
            format!("{:e}", s.alpha),
            format!("{:e}", s.lhs),
            format!("{:e}", s.volume_term),
            format!("{:e}", s.boundary_term_p),
            format!("{:e}", s.boundary_term_1),
            opt(s.k_required_p),
            opt(s.k_required_1),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// CSV with columns `field, y, rho, R, alpha, lhs, rhs_core, K`.
pub fn write_dg_class_csv<W: Write>(out: W, reports: &[(&str, &DgClassReport)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["field", "y", "rho", "R", "alpha", "lhs", "rhs_core", "K"])?;
    for (name, report) in reports {
        for s in &report.samples {
            w.write_record([
                name.to_string(),
                s.y.clone(),
                format!("{:e}", s.rho),
                format!("{:e}", s.big_r),
                format!("{:e}", s.alpha),
                format!("{:e}", s.lhs),
                format!("{:e}", s.rhs_core),
                opt(s.k),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
