use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::ratio::{ascend, norm_and_gradient, ratio, slope_norm_and_gradient, RatioObjective};
use super::{conjugate_exponent, SlopeStencil};
use crate::error::{Error, Result};
use crate::space::MetricMeasureSpace;

/// Budget for multi-start ratio maximization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RatioSearch {
    pub starts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for RatioSearch {
    fn default() -> Self {
        Self {
            starts: 64,
            iterations: 200,
            seed: 0,
        }
    }
}

pub(crate) fn start_rng(seed: u64, start: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (start as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingSample {
    pub field: Vec<f64>,
    pub sobolev_ratio: f64,
    pub trace_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingConstants {
    pub p: f64,
    pub s: f64,
    pub q: f64,
    pub q_conjugate: f64,
    /// `ps / (s - p)` when `p < s`, infinite otherwise.
    pub p_star: f64,
    /// Largest observed `||u||_{L^p(domain)} / ||g_u||_{L^p(domain)}`.
    pub k_s: f64,
    /// Largest observed `||Tu||_{L^q'(boundary)} / ||g_u||_{L^p(domain)}`.
    pub k_t: f64,
    #[serde(skip)]
    pub samples: Vec<EmbeddingSample>,
}

pub fn sobolev_exponent(p: f64, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::DegenerateExponent(s));
    }
    Ok(if p < s { p * s / (s - p) } else { f64::INFINITY })
}

#[derive(Clone, Copy, PartialEq)]
enum Numerator {
    Domain,
    Trace,
}

/// Ratios over mean-zero fields on the closure with the energy gradient below.
pub(crate) struct EmbeddingRatio<'a> {
    space: &'a MetricMeasureSpace,
    stencil: SlopeStencil,
    p: f64,
    trace_exponent: f64,
    numerator: Numerator,
}

impl<'a> EmbeddingRatio<'a> {
    fn gradient_norm(&self, u: &[f64]) -> (f64, Vec<f64>) {
        slope_norm_and_gradient(&self.stencil, u, self.space.measures(), self.p)
    }

    fn numerator(&self, u: &[f64]) -> (f64, Vec<f64>) {
        let n = self.space.len();
        match self.numerator {
            Numerator::Domain => {
                norm_and_gradient(u, self.space.measures(), self.space.interior(), self.p, n)
            }
            Numerator::Trace => {
                let weights: Vec<f64> = (0..n).map(|v| self.space.perimeter_weight(v)).collect();
                norm_and_gradient(u, &weights, self.space.boundary(), self.trace_exponent, n)
            }
        }
    }

    pub(crate) fn value(&self, u: &[f64]) -> f64 {
        let (num, den) = self.evaluate(u);
        ratio(num, den)
    }
}

impl RatioObjective for EmbeddingRatio<'_> {
    fn evaluate(&self, u: &[f64]) -> (f64, f64) {
        (self.numerator(u).0, self.gradient_norm(u).0)
    }

    fn subgradients(&self, u: &[f64]) -> (f64, f64, Vec<f64>, Vec<f64>) {
        let (num, dn) = self.numerator(u);
        let (den, dd) = self.gradient_norm(u);
        (num, den, dn, dd)
    }

    fn project_direction(&self, d: &mut [f64]) {
        project_tangent(self.space, d);
    }

    fn normalize(&self, u: &mut [f64]) {
        normalize_mean_zero(self.space, u);
    }
}

/// Zero exterior entries and remove the component along the domain measure.
pub(crate) fn project_tangent(space: &MetricMeasureSpace, d: &mut [f64]) {
    for (v, x) in d.iter_mut().enumerate() {
        if space.role(v) == crate::space::Role::Exterior {
            *x = 0.0;
        }
    }
    let interior = space.interior();
    let dot: f64 = interior.iter().map(|&v| space.mu(v) * d[v]).sum();
    let norm2: f64 = interior.iter().map(|&v| space.mu(v) * space.mu(v)).sum();
    for &v in interior {
        d[v] -= dot / norm2 * space.mu(v);
    }
}

/// Shift to domain mean zero and scale to unit sup norm (when nonzero).
pub(crate) fn normalize_mean_zero(space: &MetricMeasureSpace, u: &mut [f64]) {
    let mean = space
        .mean(u, space.interior())
        .expect("domain has positive measure");
    for &v in space.closure() {
        u[v] -= mean;
    }
    let m = space.closure().iter().fold(0.0f64, |m, &v| m.max(u[v].abs()));
    if m > 0.0 {
        for &v in space.closure() {
            u[v] /= m;
        }
    }
}

pub(crate) fn random_start(space: &MetricMeasureSpace, seed: u64, start: usize) -> Vec<f64> {
    let mut rng = start_rng(seed, start);
    let mut u = vec![0.0; space.len()];
    let boundary = space.boundary();
    // Boundary spikes tend to maximize trace ratios on coarse spaces.
    let spikes = (boundary.len()).min(16);
    let anchor = |k: usize| boundary[(k % spikes) * boundary.len() / spikes];
    if start % 4 == 1 && spikes > 0 {
        u[anchor(start / 4)] = 1.0;
    } else if start % 4 == 2 && spikes > 0 {
        // Smooth starts: distance to one boundary vertex, or the difference of distances to two.
        let a = anchor(start / 4);
        let b = anchor(start / 4 + spikes / 2);
        let two = (start / 4) % 2 == 1 && a != b;
        for &v in space.closure() {
            u[v] = space.dist(v, a) - if two { space.dist(v, b) } else { 0.0 };
        }
    } else {
        for &v in space.closure() {
            u[v] = rng.gen_range(-1.0..1.0);
        }
    }
    u
}

pub(crate) fn random_ball_start(
    space: &MetricMeasureSpace,
    members: &[usize],
    seed: u64,
    start: usize,
) -> Vec<f64> {
    let mut rng = start_rng(seed, start);
    let mut u = vec![0.0; space.len()];
    for &v in members {
        u[v] = rng.gen_range(-1.0..1.0);
    }
    u
}

/// Sobolev exponent and empirical Sobolev and trace constants.
pub fn embedding_constants(
    space: &MetricMeasureSpace,
    p: f64,
    s: f64,
    q: f64,
    search: &RatioSearch,
) -> Result<EmbeddingConstants> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(p));
    }
    if !(q >= 1.0) {
        return Err(Error::InvalidExponent(q));
    }
    let p_star = sobolev_exponent(p, s)?;
    let q_conjugate = conjugate_exponent(q);
    let make = |numerator| EmbeddingRatio {
        space,
        stencil: SlopeStencil::energy(space),
        p,
        trace_exponent: q_conjugate,
        numerator,
    };
    let sobolev = make(Numerator::Domain);
    let trace = make(Numerator::Trace);

    let starts = search.starts.max(1);
    let samples: Vec<EmbeddingSample> = (0..starts)
        .into_par_iter()
        .flat_map_iter(|k| {
            let u0 = random_start(space, search.seed, k);
            let (_, a) = ascend(&sobolev, u0.clone(), search.iterations);
            let (_, b) = ascend(&trace, u0, search.iterations);
            [a, b].into_iter().map(|field| EmbeddingSample {
                sobolev_ratio: sobolev.value(&field),
                trace_ratio: trace.value(&field),
                field,
            })
        })
        .collect();

    let k_s = samples.iter().map(|s| s.sobolev_ratio).fold(0.0, f64::max);
    let k_t = samples.iter().map(|s| s.trace_ratio).fold(0.0, f64::max);
    Ok(EmbeddingConstants {
        p,
        s,
        q,
        q_conjugate,
        p_star,
        k_s,
        k_t,
        samples,
    })
}

impl EmbeddingConstants {
    /// Sobolev ratio of an arbitrary mean-zero field, for checking samples.
    pub fn sobolev_ratio(space: &MetricMeasureSpace, u: &[f64], p: f64) -> f64 {
        EmbeddingRatio {
            space,
            stencil: SlopeStencil::energy(space),
            p,
            trace_exponent: 1.0,
            numerator: Numerator::Domain,
        }
        .value(u)
    }

    pub fn trace_ratio(space: &MetricMeasureSpace, u: &[f64], p: f64, q: f64) -> f64 {
        EmbeddingRatio {
            space,
            stencil: SlopeStencil::energy(space),
            p,
            trace_exponent: conjugate_exponent(q),
            numerator: Numerator::Trace,
        }
        .value(u)
    }
}
