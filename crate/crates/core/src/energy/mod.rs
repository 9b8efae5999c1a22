//! The energy functional, its variants, lower bounds and the truncation
//! competitor used in De Giorgi estimates.
//!
//! For a field `u` on the closure of the domain, mean-zero over the domain,
//!
//! ```text
//! J(u) = sum_Ω g_u^p mu - sum_Ω (c - |u|^gamma) mu + sigma sum_∂Ω u f P
//! ```
//!
//! where `g_u` is the max-slope gradient at interior vertices taken over
//! edges to interior and boundary neighbors.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::calculus::{weighted_norm, ScalarField, SlopeStencil, Support};
use crate::error::{Error, Result};
use crate::space::{MetricMeasureSpace, Role, VertexId};

/// Mean-zero tolerance accepted by [`energy_j`], relative to `max(1, sup |u|)`.
pub const MEAN_ZERO_TOL: f64 = 1e-9;

/// Admissible absolute imbalance of `sum f P`, relative to `max(1, sum |f| P)`.
pub const BALANCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReactionParams {
    pub c: f64,
    pub gamma: f64,
}

impl ReactionParams {
    /// `G(t) = c - |t|^gamma`.
    pub fn value(&self, t: f64) -> f64 {
        self.c - t.abs().powf(self.gamma)
    }
}

pub fn reaction_value(t: f64, params: &ReactionParams) -> f64 {
    params.value(t)
}

/// An exponent that may be infinite; serialized as a number or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(pub f64);

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(Exponent(x)),
            Raw::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "Infinity") => {
                Ok(Exponent(f64::INFINITY))
            }
            Raw::Text(t) => Err(serde::de::Error::custom(format!("bad exponent `{t}`"))),
        }
    }
}

/// Problem description as stored on disk. Boundary values in `f` override
/// the ones carried by the space file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub p: f64,
    pub c: f64,
    pub gamma: f64,
    pub q: Exponent,
    #[serde(default)]
    pub f: BTreeMap<String, f64>,
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub p: f64,
    pub reaction: ReactionParams,
    /// Boundary data, supported on the boundary.
    pub f: ScalarField,
    pub q: f64,
}

impl ProblemSpec {
    pub fn new(
        space: &MetricMeasureSpace,
        p: f64,
        reaction: ReactionParams,
        f: Vec<f64>,
        q: f64,
    ) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidExponent(p));
        }
        if !(q >= 1.0) {
            return Err(Error::InvalidExponent(q));
        }
        if !(reaction.c > 0.0 && reaction.c.is_finite()) {
            return Err(Error::InvalidProblem(format!("c = {} must be positive", reaction.c)));
        }
        if !(reaction.gamma > 1.0 && reaction.gamma.is_finite()) {
            return Err(Error::InvalidProblem(format!(
                "gamma = {} must exceed 1",
                reaction.gamma
            )));
        }
        let f = ScalarField::new(space, f, Support::Boundary)?;
        let (net, total) = space.boundary().iter().fold((0.0, 0.0), |(n, t), &y| {
            let w = f.get(y) * space.perimeter_weight(y);
            (n + w, t + w.abs())
        });
        if net.abs() > BALANCE_TOL * total.max(1.0) {
            return Err(Error::InvalidProblem(format!(
                "boundary data is unbalanced: sum f P = {net:e}"
            )));
        }
        Ok(Self { p, reaction, f, q })
    }

    /// Problem with the boundary data carried by the space file.
    pub fn with_space_data(
        space: &MetricMeasureSpace,
        p: f64,
        reaction: ReactionParams,
        q: f64,
    ) -> Result<Self> {
        Self::new(space, p, reaction, space.boundary_data().to_vec(), q)
    }

    pub fn from_file(space: &MetricMeasureSpace, file: &ProblemFile) -> Result<Self> {
        let mut f = space.boundary_data().to_vec();
        for (id, &value) in &file.f {
            let v = space.vertex(id)?;
            if space.role(v) != Role::Boundary {
                return Err(Error::InvalidProblem(format!(
                    "boundary data given on non-boundary vertex `{id}`"
                )));
            }
            f[v] = value;
        }
        Self::new(
            space,
            file.p,
            ReactionParams {
                c: file.c,
                gamma: file.gamma,
            },
            f,
            file.q.0,
        )
    }

    pub fn to_file(&self, space: &MetricMeasureSpace) -> ProblemFile {
        ProblemFile {
            p: self.p,
            c: self.reaction.c,
            gamma: self.reaction.gamma,
            q: Exponent(self.q),
            f: space
                .boundary()
                .iter()
                .map(|&y| (space.id(y).to_string(), self.f.get(y)))
                .collect(),
        }
    }

    /// The same problem with `f = 0`.
    pub fn without_data(&self) -> Self {
        Self {
            f: self.f.scaled(0.0),
            ..self.clone()
        }
    }

    /// `||f||_{L^q(boundary, P)}`.
    pub fn f_norm(&self, space: &MetricMeasureSpace) -> f64 {
        let weights: Vec<f64> = (0..space.len()).map(|v| space.perimeter_weight(v)).collect();
        weighted_norm(self.f.values(), &weights, space.boundary(), self.q)
    }

    /// Require `1 < gamma < p_star`.
    pub fn check_gamma(&self, p_star: f64) -> Result<()> {
        if self.reaction.gamma < p_star {
            Ok(())
        } else {
            Err(Error::InvalidProblem(format!(
                "gamma = {} must be below the Sobolev exponent {p_star}",
                self.reaction.gamma
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// The energy `J`.
    J,
    /// `J` with `f = 0`.
    I,
    /// `J` with the sign of the boundary term reversed.
    JMinus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyParts {
    /// `sum_Ω g_u^p mu`.
    pub gradient: f64,
    /// `-sum_Ω G(u) mu`.
    pub reaction: f64,
    /// `sigma sum_∂Ω u f P`.
    pub boundary: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        self.gradient + self.reaction + self.boundary
    }

    /// Everything except the gradient term.
    pub fn non_gradient(&self) -> f64 {
        self.reaction + self.boundary
    }
}

/// Precomputed evaluation of one energy variant on one space.
#[derive(Debug, Clone)]
pub struct EnergyModel {
    p: f64,
    reaction: ReactionParams,
    /// `sigma f(y) P(y)` at boundary vertices, 0 elsewhere.
    load: Vec<f64>,
    mu: Vec<f64>,
    interior: Vec<VertexId>,
    closure: Vec<VertexId>,
    stencil: SlopeStencil,
}

impl EnergyModel {
    pub fn new(space: &MetricMeasureSpace, spec: &ProblemSpec, variant: Variant) -> Self {
        let sigma = match variant {
            Variant::J => 1.0,
            Variant::I => 0.0,
            Variant::JMinus => -1.0,
        };
        let load = (0..space.len())
            .map(|v| sigma * spec.f.get(v) * space.perimeter_weight(v))
            .collect();
        Self {
            p: spec.p,
            reaction: spec.reaction,
            load,
            mu: space.measures().to_vec(),
            interior: space.interior().to_vec(),
            closure: space.closure().to_vec(),
            stencil: SlopeStencil::energy(space),
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn reaction(&self) -> ReactionParams {
        self.reaction
    }

    pub fn load(&self) -> &[f64] {
        &self.load
    }

    pub fn stencil(&self) -> &SlopeStencil {
        &self.stencil
    }

    pub fn closure(&self) -> &[VertexId] {
        &self.closure
    }

    pub fn interior(&self) -> &[VertexId] {
        &self.interior
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    pub fn parts(&self, u: &[f64]) -> EnergyParts {
        let gradient = self
            .stencil
            .targets()
            .iter()
            .zip(self.stencil.slopes(u))
            .map(|(&x, g)| self.mu[x] * g.powf(self.p))
            .sum();
        let reaction = -self
            .interior
            .iter()
            .map(|&x| self.reaction.value(u[x]) * self.mu[x])
            .sum::<f64>();
        let boundary = self.closure.iter().map(|&y| u[y] * self.load[y]).sum();
        EnergyParts {
            gradient,
            reaction,
            boundary,
        }
    }

    pub fn value(&self, u: &[f64]) -> f64 {
        self.parts(u).total()
    }

    /// Energy gradient field: slopes at interior vertices, zero elsewhere.
    pub fn gradient_field(&self, u: &[f64]) -> Vec<f64> {
        self.stencil.slope_field(u, u.len())
    }

    /// One subgradient of the energy with respect to every vertex value.
    pub fn subgradient(&self, u: &[f64]) -> Vec<f64> {
        let mut out = self.load.clone();
        let p = self.p;
        for (&x, (g, arg)) in self
            .stencil
            .targets()
            .iter()
            .zip(self.stencil.slopes_with_argmax(u))
        {
            if let (true, Some((y, inv))) = (g > 0.0, arg) {
                let w = self.mu[x] * p * g.powf(p - 1.0) * inv * (u[y] - u[x]).signum();
                out[y] += w;
                out[x] -= w;
            }
        }
        let gamma = self.reaction.gamma;
        for &x in &self.interior {
            let t = u[x];
            out[x] += self.mu[x] * gamma * t.abs().powf(gamma - 1.0) * t.signum();
        }
        out
    }
}

fn check_mean_zero(space: &MetricMeasureSpace, u: &ScalarField) -> Result<()> {
    if u.len() != space.len() {
        return Err(Error::DimensionMismatch {
            expected: space.len(),
            got: u.len(),
        });
    }
    let mean = space.mean(u.values(), space.interior())?;
    if mean.abs() > MEAN_ZERO_TOL * u.sup_norm().max(1.0) {
        return Err(Error::NotMeanZero(mean));
    }
    Ok(())
}

/// Energy of a mean-zero field.
pub fn energy_j(
    space: &MetricMeasureSpace,
    u: &ScalarField,
    spec: &ProblemSpec,
    variant: Variant,
) -> Result<f64> {
    check_mean_zero(space, u)?;
    Ok(EnergyModel::new(space, spec, variant).value(u.values()))
}

pub fn energy_parts(
    space: &MetricMeasureSpace,
    u: &ScalarField,
    spec: &ProblemSpec,
    variant: Variant,
) -> Result<EnergyParts> {
    check_mean_zero(space, u)?;
    Ok(EnergyModel::new(space, spec, variant).parts(u.values()))
}

/// Lower bounds on `J` in terms of `t = ||g_u||_{L^p(Ω)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBounds {
    pub p: f64,
    /// `K_T ||f||_{L^q(boundary)}`.
    pub slope: f64,
    /// `c mu(Ω)`.
    pub c_mu: f64,
    /// Minimum over `t >= 0` of the Hölder curve.
    pub explicit_floor: f64,
}

impl LowerBounds {
    /// `t (t^{p-1} - K_T ||f||_q) - c mu(Ω)`.
    pub fn holder_curve(&self, t: f64) -> f64 {
        t * (t.powf(self.p - 1.0) - self.slope) - self.c_mu
    }
}

pub fn lower_bounds(space: &MetricMeasureSpace, spec: &ProblemSpec, k_t: f64) -> LowerBounds {
    let p = spec.p;
    let slope = k_t * spec.f_norm(space);
    let c_mu = spec.reaction.c * space.domain_measure();
    let explicit_floor = -(p - 1.0) * (slope / p).powf(p / (p - 1.0)) - c_mu;
    LowerBounds {
        p,
        slope,
        c_mu,
        explicit_floor,
    }
}

/// Truncation competitor `w = u - tau (u - alpha)_+` around a vertex.
#[derive(Debug, Clone)]
pub struct CompetitorBundle {
    pub center: VertexId,
    pub rho: f64,
    pub big_r: f64,
    pub alpha: f64,
    /// Cutoff `(1 - d(x, B(y, rho)) / (R - rho))_+`.
    pub tau: Vec<f64>,
    /// Domain vertices of `B(y, R)` with `u > alpha`.
    pub level_set: Vec<VertexId>,
    /// Boundary vertices of `B(y, R)` with `u > alpha`.
    pub level_set_boundary: Vec<VertexId>,
    /// Domain vertices of `B(y, rho)` with `u > alpha`.
    pub inner_level_set: Vec<VertexId>,
    pub w: Vec<f64>,
    /// `2^p (g_u^p (1 - chi) + (u - alpha)_+^p / (R - rho)^p)` with `chi` the
    /// indicator of the inner level set.
    pub g_w_bound: Vec<f64>,
    /// A pointwise bound on `g_w^p` valid on graphs:
    /// `((1 - tau) g_u + max(V / (R - rho), tau C))^p` where `u > alpha`, with
    /// `V` the largest `(u - alpha)_+` among neighbors and `C` the largest
    /// `(alpha - u(z)) / len` among neighbors `z` with `u(z) <= alpha`;
    /// `g_u^p` elsewhere.
    pub g_w_bound_graph: Vec<f64>,
}

/// Admissible radii: `0 < rho < R`, and `R < diam(Ω) / 10` unless `relax`.
pub fn check_radii(space: &MetricMeasureSpace, rho: f64, big_r: f64, relax: bool) -> Result<()> {
    let limit = space.domain_diameter() / 10.0;
    let ok = rho > 0.0 && rho < big_r && big_r.is_finite() && (relax || big_r < limit);
    if ok {
        Ok(())
    } else {
        Err(Error::BadRadii {
            rho,
            big_r,
            bound: if relax {
                String::new()
            } else {
                format!(" < diam/10 = {limit}")
            },
        })
    }
}

#[allow(clippy::too_many_arguments)]
pub fn competitor(
    space: &MetricMeasureSpace,
    u: &ScalarField,
    p: f64,
    y: VertexId,
    rho: f64,
    big_r: f64,
    alpha: f64,
    relax: bool,
) -> Result<CompetitorBundle> {
    check_radii(space, rho, big_r, relax)?;
    let n = space.len();
    let u = u.values();
    let inner = space.ball(y, rho).members;
    let outer = space.ball(y, big_r);
    let width = big_r - rho;
    let tau: Vec<f64> = (0..n)
        .map(|x| (1.0 - space.dist_to_set(x, &inner) / width).max(0.0))
        .collect();
    let mut in_s = vec![false; n];
    let mut level_set = Vec::new();
    let mut level_set_boundary = Vec::new();
    for &x in &outer.members {
        if u[x] > alpha {
            match space.role(x) {
                Role::Interior => level_set.push(x),
                Role::Boundary => level_set_boundary.push(x),
                Role::Exterior => continue,
            }
            in_s[x] = true;
        }
    }
    let inner_level_set: Vec<VertexId> = level_set
        .iter()
        .copied()
        .filter(|&x| space.dist(y, x) <= rho)
        .collect();
    let w: Vec<f64> = (0..n)
        .map(|x| u[x] - tau[x] * (u[x] - alpha).max(0.0))
        .collect();

    let stencil = SlopeStencil::energy(space);
    let g_u = stencil.slope_field(u, n);
    let excess = |x: VertexId| (u[x] - alpha).max(0.0);
    let two_p = 2f64.powf(p);
    let mut g_w_bound = vec![0.0; n];
    let mut g_w_bound_graph = vec![0.0; n];
    for (k, &x) in stencil.targets().iter().enumerate() {
        let inside_inner = in_s[x] && space.dist(y, x) <= rho;
        let chi = if inside_inner { 0.0 } else { 1.0 };
        g_w_bound[x] = two_p * (g_u[x].powf(p) * chi + (excess(x) / width).powf(p));
        // Vertices above alpha outside B(y, R) have tau = 0 but neighbors that may be cut.
        g_w_bound_graph[x] = if u[x] > alpha {
            let mut v_max: f64 = 0.0;
            let mut c_max: f64 = 0.0;
            for &(z, inv) in stencil.neighbors(k) {
                if u[z] > alpha {
                    v_max = v_max.max(excess(z));
                } else {
                    c_max = c_max.max((alpha - u[z]) * inv);
                }
            }
            ((1.0 - tau[x]) * g_u[x] + (v_max / width).max(tau[x] * c_max)).powf(p)
        } else {
            g_u[x].powf(p)
        };
    }
    Ok(CompetitorBundle {
        center: y,
        rho,
        big_r,
        alpha,
        tau,
        level_set,
        level_set_boundary,
        inner_level_set,
        w,
        g_w_bound,
        g_w_bound_graph,
    })
}

/// `sum_S g_w^p mu` and the two bounds `sum_S bound mu`, over the domain part of the level set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeibnizCheck {
    pub energy: f64,
    pub bound: f64,
    pub bound_graph: f64,
}

impl CompetitorBundle {
    pub fn leibniz(&self, space: &MetricMeasureSpace, p: f64) -> LeibnizCheck {
        let g_w = SlopeStencil::energy(space).slope_field(&self.w, space.len());
        let sum = |f: &dyn Fn(VertexId) -> f64| -> f64 {
            self.level_set.iter().map(|&x| f(x) * space.mu(x)).sum()
        };
        LeibnizCheck {
            energy: sum(&|x| g_w[x].powf(p)),
            bound: sum(&|x| self.g_w_bound[x]),
            bound_graph: sum(&|x| self.g_w_bound_graph[x]),
        }
    }

    /// Pointwise `g_w^p <= g_w_bound_graph` on the energy targets, as the largest excess.
    pub fn graph_bound_excess(&self, space: &MetricMeasureSpace, p: f64) -> f64 {
        let g_w = SlopeStencil::energy(space).slope_field(&self.w, space.len());
        space
            .interior()
            .iter()
            .map(|&x| g_w[x].powf(p) - self.g_w_bound_graph[x])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}
