//! Empirical structural constants on a radius grid.
//!
//! Every constant is a maximum over the scanned (center, radius) pairs and
//! therefore a lower bound on the corresponding constant of the space.

use rayon::prelude::*;
use serde::Serialize;

use super::{MetricMeasureSpace, VertexId};
use crate::calculus::ratio::{ascend, ratio, slope_norm_and_gradient, RatioObjective};
use crate::calculus::{embedding::random_ball_start, RatioSearch, Region, SlopeStencil};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoincareOptions {
    pub search: RatioSearch,
}

impl Default for PoincareOptions {
    fn default() -> Self {
        Self {
            search: RatioSearch {
                starts: 8,
                iterations: 100,
                seed: 0,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusPair {
    pub center: String,
    pub radius: f64,
}

/// Best field found for one domain ball.
#[derive(Debug, Clone, Serialize)]
pub struct PoincareSample {
    pub center: String,
    pub radius: f64,
    pub ratio: f64,
    #[serde(skip)]
    pub members: Vec<VertexId>,
    #[serde(skip)]
    pub field: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    pub p: f64,
    pub k_d: f64,
    pub s: f64,
    /// True when no admissible tuple gave a positive exponent and `s` was clamped.
    pub s_clamped: bool,
    /// Measure density constant over centers in the domain.
    pub k_h1: f64,
    /// Same scan over centers in the closure of the domain.
    pub k_h1_closure: f64,
    pub k_h2: f64,
    pub k_p: f64,
    /// Diameter of the domain.
    pub diam: f64,
    pub diam_space: f64,
    pub radius_grid: Vec<f64>,
    /// Domain balls whose induced subgraph is disconnected; left out of `k_p`.
    pub poincare_skipped: usize,
    pub sample_grid: Vec<RadiusPair>,
    pub poincare: Vec<PoincareSample>,
}

fn validate_grid(space: &MetricMeasureSpace, grid: &[f64]) -> Result<Vec<f64>> {
    if grid.is_empty() {
        return Err(Error::DegenerateGrid("radius grid is empty".into()));
    }
    let diam = space.diameter();
    for &r in grid {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::DegenerateGrid(format!("radius {r} is not positive")));
        }
        if r > diam * (1.0 + 1e-12) {
            return Err(Error::DegenerateGrid(format!(
                "radius {r} exceeds the diameter {diam}"
            )));
        }
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    Ok(sorted)
}

fn ball_mass(space: &MetricMeasureSpace, center: VertexId, radius: f64) -> f64 {
    let n = space.len();
    (0..n)
        .filter(|&v| space.dist(center, v) <= radius)
        .map(|v| space.mu(v))
        .sum()
}

fn par_max(values: impl ParallelIterator<Item = f64>) -> f64 {
    values.reduce(|| f64::NEG_INFINITY, f64::max)
}

pub fn doubling_constant(space: &MetricMeasureSpace, grid: &[f64]) -> f64 {
    par_max((0..space.len()).into_par_iter().map(|y| {
        grid.iter()
            .map(|&r| ball_mass(space, y, 2.0 * r) / ball_mass(space, y, r))
            .fold(f64::NEG_INFINITY, f64::max)
    }))
}

/// Smallest exponent with `mu(B(y, rho)) / mu(B(x, R)) >= (rho / R)^s` on
/// every grid tuple with `y` in `B(x, R)` and `rho < R`.
fn mass_exponent(space: &MetricMeasureSpace, grid: &[f64]) -> f64 {
    let n = space.len();
    let masses: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|v| grid.iter().map(|&r| ball_mass(space, v, r)).collect())
        .collect();
    par_max((0..n).into_par_iter().map(|x| {
        let mut best = f64::NEG_INFINITY;
        for (j, &big_r) in grid.iter().enumerate() {
            for y in (0..n).filter(|&y| space.dist(x, y) <= big_r) {
                for (i, &rho) in grid.iter().enumerate().take(j) {
                    let e = (masses[x][j] / masses[y][i]).ln() / (big_r / rho).ln();
                    best = best.max(e);
                }
            }
        }
        best
    }))
}

fn density_constant(space: &MetricMeasureSpace, centers: &[VertexId], grid: &[f64]) -> f64 {
    let diam = space.domain_diameter();
    par_max(centers.par_iter().map(|&y| {
        let mut best = f64::NEG_INFINITY;
        for &r in grid.iter().filter(|&&r| r <= diam) {
            let ball = space.ball(y, r);
            let inside: Vec<VertexId> = ball
                .members
                .iter()
                .copied()
                .filter(|&v| space.is_interior(v))
                .collect();
            let m = space.measure(&inside);
            if m > 0.0 {
                best = best.max(space.measure(&ball.members) / m);
            }
        }
        best
    }))
}

fn ahlfors_constant(space: &MetricMeasureSpace, grid: &[f64]) -> f64 {
    let diam = space.domain_diameter();
    par_max(space.boundary().par_iter().map(|&y| {
        let mut best = f64::NEG_INFINITY;
        for &r in grid.iter().filter(|&&r| r <= diam) {
            let ball = space.ball(y, r);
            let per = space.boundary_perimeter(&ball.members);
            let m = space.measure(&ball.members);
            let a = r * per / m;
            best = best.max(a.max(1.0 / a));
        }
        best
    }))
}

/// `avg_B |u - u_B| / (r (avg_B g^p)^{1/p})` on the subgraph induced by a ball.
struct BallRatio<'a> {
    space: &'a MetricMeasureSpace,
    members: Vec<VertexId>,
    stencil: SlopeStencil,
    weights: Vec<f64>,
    radius: f64,
    p: f64,
}

impl<'a> BallRatio<'a> {
    fn new(space: &'a MetricMeasureSpace, members: Vec<VertexId>, radius: f64, p: f64) -> Self {
        let n = space.len();
        let mut inside = vec![false; n];
        members.iter().for_each(|&v| inside[v] = true);
        let targets: Vec<VertexId> = members.clone();
        let mut stencil = SlopeStencil::new(space, Region::All, &targets);
        stencil.retain_neighbors(|y| inside[y]);
        let mass = space.measure(&members);
        let mut weights = vec![0.0; n];
        for &v in &members {
            weights[v] = space.mu(v) / mass;
        }
        Self {
            space,
            members,
            stencil,
            weights,
            radius,
            p,
        }
    }

    fn connected(&self) -> bool {
        let n = self.space.len();
        let mut seen = vec![false; n];
        let mut stack = vec![self.members[0]];
        seen[self.members[0]] = true;
        let pos: std::collections::HashMap<VertexId, usize> =
            self.members.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &(y, _) in self.stencil.neighbors(pos[&x]) {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == self.members.len()
    }

    fn mean(&self, u: &[f64]) -> f64 {
        self.members.iter().map(|&v| self.weights[v] * u[v]).sum()
    }

    fn numerator(&self, u: &[f64]) -> (f64, Vec<f64>) {
        let m = self.mean(u);
        let mut grad = vec![0.0; u.len()];
        let mut value = 0.0;
        for &v in &self.members {
            value += self.weights[v] * (u[v] - m).abs();
            grad[v] = self.weights[v] * (u[v] - m).signum();
        }
        (value, grad)
    }

    fn value(&self, u: &[f64]) -> f64 {
        let (a, b) = self.evaluate(u);
        ratio(a, b)
    }
}

impl RatioObjective for BallRatio<'_> {
    fn evaluate(&self, u: &[f64]) -> (f64, f64) {
        let (d, _) = slope_norm_and_gradient(&self.stencil, u, &self.weights, self.p);
        (self.numerator(u).0, self.radius * d)
    }

    fn subgradients(&self, u: &[f64]) -> (f64, f64, Vec<f64>, Vec<f64>) {
        let (num, dn) = self.numerator(u);
        let (d, dd) = slope_norm_and_gradient(&self.stencil, u, &self.weights, self.p);
        let dd = dd.into_iter().map(|x| x * self.radius).collect();
        (num, self.radius * d, dn, dd)
    }

    fn project_direction(&self, d: &mut [f64]) {
        for (v, x) in d.iter_mut().enumerate() {
            if self.weights[v] == 0.0 {
                *x = 0.0;
            }
        }
    }

    fn normalize(&self, u: &mut [f64]) {
        let m = self.mean(u);
        let mut sup: f64 = 0.0;
        for &v in &self.members {
            u[v] -= m;
            sup = sup.max(u[v].abs());
        }
        if sup > 0.0 {
            for &v in &self.members {
                u[v] /= sup;
            }
        }
    }
}

/// Poincaré ratios on domain balls `B(x, r) ∩ Ω`, one best field per ball.
pub fn poincare_samples(
    space: &MetricMeasureSpace,
    grid: &[f64],
    p: f64,
    opts: &PoincareOptions,
) -> (Vec<PoincareSample>, usize) {
    let diam = space.domain_diameter();
    let balls: Vec<(VertexId, f64)> = space
        .interior()
        .iter()
        .flat_map(|&x| grid.iter().filter(|&&r| r <= diam).map(move |&r| (x, r)))
        .collect();
    let results: Vec<Option<PoincareSample>> = balls
        .par_iter()
        .enumerate()
        .map(|(k, &(x, r))| {
            let members: Vec<VertexId> = space
                .ball(x, r)
                .members
                .into_iter()
                .filter(|&v| space.is_interior(v))
                .collect();
            let obj = BallRatio::new(space, members, r, p);
            if !obj.connected() {
                return None;
            }
            let mut best = (0.0, vec![0.0; space.len()]);
            for start in 0..opts.search.starts.max(1) {
                let seed = opts.search.seed.wrapping_add(k as u64);
                let u0 = random_ball_start(space, &obj.members, seed, start);
                let (value, field) = ascend(&obj, u0, opts.search.iterations);
                if value > best.0 {
                    best = (value, field);
                }
            }
            Some(PoincareSample {
                center: space.id(x).to_string(),
                radius: r,
                ratio: obj.value(&best.1),
                members: obj.members.clone(),
                field: best.1,
            })
        })
        .collect();
    let skipped = results.iter().filter(|r| r.is_none()).count();
    (results.into_iter().flatten().collect(), skipped)
}

/// Re-evaluate the Poincaré ratio of a stored sample.
pub fn poincare_ratio(space: &MetricMeasureSpace, sample: &PoincareSample, p: f64) -> f64 {
    BallRatio::new(space, sample.members.clone(), sample.radius, p).value(&sample.field)
}

/// Doubling constant, mass exponent, (H1), (H2) and the Poincaré constant on a radius grid.
pub fn structural_constants(
    space: &MetricMeasureSpace,
    radius_grid: &[f64],
    p: f64,
    opts: &PoincareOptions,
) -> Result<HypothesisReport> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(p));
    }
    let grid = validate_grid(space, radius_grid)?;
    let k_d = doubling_constant(space, &grid);
    let raw_s = mass_exponent(space, &grid);
    let s_clamped = !(raw_s > 0.0);
    let s = if s_clamped { f64::EPSILON } else { raw_s };
    let k_h1 = density_constant(space, space.interior(), &grid);
    let k_h1_closure = density_constant(space, space.closure(), &grid);
    let k_h2 = ahlfors_constant(space, &grid);
    let (poincare, poincare_skipped) = poincare_samples(space, &grid, p, opts);
    let k_p = poincare.iter().map(|s| s.ratio).fold(0.0, f64::max);
    let sample_grid = (0..space.len())
        .flat_map(|v| {
            grid.iter().map(move |&r| RadiusPair {
                center: space.id(v).to_string(),
                radius: r,
            })
        })
        .collect();
    Ok(HypothesisReport {
        p,
        k_d,
        s,
        s_clamped,
        k_h1,
        k_h1_closure,
        k_h2,
        k_p,
        diam: space.domain_diameter(),
        diam_space: space.diameter(),
        radius_grid: grid,
        poincare_skipped,
        sample_grid,
        poincare,
    })
}

impl HypothesisReport {
    /// Largest violation of the doubling, mass-exponent, (H1) and (H2)
    /// inequalities on the report grid, recomputed from scratch (0 when all hold).
    pub fn recheck(&self, space: &MetricMeasureSpace) -> f64 {
        let grid = &self.radius_grid;
        let n = space.len();
        let diam = space.domain_diameter();
        let mut worst: f64 = 0.0;
        for y in 0..n {
            for &r in grid {
                let small = space.measure(&space.ball(y, r).members);
                let big = space.measure(&space.ball(y, 2.0 * r).members);
                worst = worst.max(big - self.k_d * small);
            }
        }
        for x in 0..n {
            for (j, &big_r) in grid.iter().enumerate() {
                let mx = space.measure(&space.ball(x, big_r).members);
                for y in (0..n).filter(|&y| space.dist(x, y) <= big_r) {
                    for &rho in &grid[..j] {
                        let my = space.measure(&space.ball(y, rho).members);
                        let bound = (rho / big_r).powf(self.s);
                        worst = worst.max(bound - my / mx * (1.0 + 1e-12));
                    }
                }
            }
        }
        for &y in space.interior() {
            for &r in grid.iter().filter(|&&r| r <= diam) {
                let ball = space.ball(y, r);
                let inside: Vec<_> = ball.members.iter().copied().filter(|&v| space.is_interior(v)).collect();
                worst = worst.max(space.measure(&ball.members) - self.k_h1 * space.measure(&inside));
            }
        }
        for &y in space.boundary() {
            for &r in grid.iter().filter(|&&r| r <= diam) {
                let ball = space.ball(y, r);
                let per = space.boundary_perimeter(&ball.members);
                let m = space.measure(&ball.members);
                worst = worst.max(m / r - self.k_h2 * per).max(per - self.k_h2 * m / r);
            }
        }
        worst
    }
}
