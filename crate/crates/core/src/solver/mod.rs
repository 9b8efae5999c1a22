//! Minimization of the energy over mean-zero fields.
//!
//! The default method anneals a softmax smoothing of the max-slope gradient
//! and takes damped Newton steps on each smoothed problem, with the mean-zero
//! constraint enforced through the KKT system. A plain projected steepest
//! descent is available as [`Direction::Steepest`]. Both finish with a
//! monotone subgradient polish on the non-smooth energy.

mod smooth;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calculus::embedding::start_rng;
use crate::calculus::{ScalarField, Support};
use crate::energy::{EnergyModel, ProblemSpec, Variant};
use crate::error::{Error, Result};
use crate::space::MetricMeasureSpace;
use smooth::Smoothed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Newton,
    Steepest,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub max_iters: usize,
    /// Relative objective tolerance.
    pub tol: f64,
    /// Iterations over which the relative decrease is measured for steepest descent.
    pub stall_window: usize,
    /// Initial smoothing; `None` means `0.1` times the range of the boundary data (or 0.1).
    pub eps_initial: Option<f64>,
    pub eps_decay: f64,
    /// Iterations after which the smoothing is decayed even if the stage has not settled.
    pub eps_every: usize,
    pub eps_floor: f64,
    pub polish_iters: usize,
    pub starts: usize,
    pub seed: u64,
    pub direction: Direction,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iters: 20_000,
            tol: 1e-10,
            stall_window: 50,
            eps_initial: None,
            eps_decay: 0.5,
            eps_every: 200,
            eps_floor: 1e-6,
            polish_iters: 200,
            starts: 8,
            seed: 0,
            direction: Direction::Newton,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::BadParams(m.into()));
        if !(self.tol > 0.0) {
            return bad("tol must be positive");
        }
        if self.starts < 1 {
            return bad("starts must be at least 1");
        }
        if !(self.eps_decay > 0.0 && self.eps_decay < 1.0) {
            return bad("eps_decay must lie in (0, 1)");
        }
        if !(self.eps_floor >= 0.0) || self.eps_initial.is_some_and(|e| !(e > self.eps_floor)) {
            return bad("smoothing must decrease from eps_initial to eps_floor >= 0");
        }
        if self.eps_every == 0 || self.stall_window == 0 {
            return bad("eps_every and stall_window must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimizerResult {
    pub u: ScalarField,
    pub g: ScalarField,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Smoothed objective after every accepted step, then the true energy during polishing.
    pub history: Vec<f64>,
    /// True energy of every iterate, starting with the initial field.
    pub true_history: Vec<f64>,
    pub eps_final: f64,
}

impl MinimizerResult {
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                iterations: self.iterations,
                value: self.value,
            })
        }
    }
}

fn data_range(spec: &ProblemSpec, space: &MetricMeasureSpace) -> f64 {
    let (lo, hi) = space
        .boundary()
        .iter()
        .map(|&y| spec.f.get(y))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    hi - lo
}

fn project_mean_zero(space: &MetricMeasureSpace, u: &mut [f64]) {
    let mean = space.mean(u, space.interior()).expect("domain has positive measure");
    for &v in space.closure() {
        u[v] -= mean;
    }
}

/// Minimize `J` from the zero field.
pub fn minimize(space: &MetricMeasureSpace, spec: &ProblemSpec, opts: &SolverOptions) -> Result<MinimizerResult> {
    minimize_variant(space, spec, Variant::J, opts, None)
}

pub fn minimize_from(
    space: &MetricMeasureSpace,
    spec: &ProblemSpec,
    opts: &SolverOptions,
    start: &ScalarField,
) -> Result<MinimizerResult> {
    minimize_variant(space, spec, Variant::J, opts, Some(start.values()))
}

struct Run<'a> {
    space: &'a MetricMeasureSpace,
    model: &'a EnergyModel,
    smooth: Smoothed<'a>,
    m: DVector<f64>,
    history: Vec<f64>,
    true_history: Vec<f64>,
    iterations: usize,
}

impl Run<'_> {
    fn record(&mut self, z: &DVector<f64>, smoothed: f64) {
        self.history.push(smoothed);
        self.true_history.push(self.model.value(&self.smooth.to_full(z)));
        self.iterations += 1;
    }

    fn recenter(&self, z: &mut DVector<f64>) {
        let mut u = self.smooth.to_full(z);
        project_mean_zero(self.space, &mut u);
        *z = self.smooth.to_local(&u);
    }

    fn tangent(&self, d: &mut DVector<f64>) {
        let c = self.m.dot(d) / self.m.dot(&self.m);
        d.axpy(-c, &self.m, 1.0);
    }

    /// Newton direction for the equality-constrained smoothed problem.
    fn newton_direction(&self, grad: &DVector<f64>, hess: DMatrix<f64>) -> Option<DVector<f64>> {
        let scale = (0..hess.nrows()).map(|i| hess[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
        let mut shift = 0.0;
        for _ in 0..30 {
            let mut h = hess.clone();
            if shift > 0.0 {
                for i in 0..h.nrows() {
                    h[(i, i)] += shift;
                }
            }
            if let Some(chol) = h.cholesky() {
                let a = chol.solve(grad);
                let b = chol.solve(&self.m);
                let lambda = self.m.dot(&a) / self.m.dot(&b);
                let mut d = -(a - b * lambda);
                self.tangent(&mut d);
                return Some(d);
            }
            shift = if shift == 0.0 { 1e-12 * scale } else { shift * 10.0 };
        }
        None
    }

    fn line_search(
        &self,
        z: &DVector<f64>,
        eps: f64,
        f: f64,
        dir: &DVector<f64>,
        slope: f64,
        t0: f64,
    ) -> Option<(DVector<f64>, f64, f64)> {
        if !(slope < 0.0) {
            return None;
        }
        let mut t = t0;
        for _ in 0..80 {
            let trial = z + dir * t;
            let ft = self.smooth.value(&trial, eps);
            if ft <= f + 1e-4 * t * slope {
                return Some((trial, ft, t));
            }
            t *= 0.5;
        }
        None
    }

    /// One smoothed stage; returns whether it settled before its iteration budget.
    fn stage(&mut self, z: &mut DVector<f64>, eps: f64, opts: &SolverOptions, budget: usize) -> bool {
        let mut step: f64 = 1.0;
        let mut window: Vec<f64> = Vec::new();
        for _ in 0..budget {
            if self.iterations >= opts.max_iters {
                return false;
            }
            let newton = opts.direction == Direction::Newton;
            let (f, grad, hess) = self.smooth.derivatives(z, eps, newton);
            let mut steepest = -grad.clone();
            self.tangent(&mut steepest);
            let scale = f.abs().max(1.0);
            if steepest.norm_squared() <= (opts.tol * 1e-3 * scale).powi(2) {
                return true;
            }
            let newton_dir = hess.and_then(|h| self.newton_direction(&grad, h));
            let mut accepted = None;
            if let Some(dir) = newton_dir {
                let slope = grad.dot(&dir);
                if -slope <= opts.tol * 1e-3 * scale {
                    return true;
                }
                accepted = self.line_search(z, eps, f, &dir, slope, 1.0);
            }
            if accepted.is_none() {
                // Ill-conditioned Newton steps on rough fields fall back to steepest descent.
                let slope = grad.dot(&steepest);
                accepted = self.line_search(z, eps, f, &steepest, slope, (2.0 * step).min(1e6));
            }
            let Some((mut trial, ft, t)) = accepted else { return true };
            self.recenter(&mut trial);
            *z = trial;
            step = t;
            self.record(z, ft);
            if !newton {
                window.push(ft);
                let w = opts.stall_window;
                if window.len() > w {
                    let old = window[window.len() - 1 - w];
                    if (old - ft) <= opts.tol * old.abs().max(1.0) {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Monotone subgradient steps on the true energy.
    fn polish(&mut self, z: &mut DVector<f64>, iters: usize) {
        let vars = self.smooth.vars().to_vec();
        let mut u = self.smooth.to_full(z);
        let mut best = self.model.value(&u);
        let mut step = 1e-3 * u.iter().fold(1e-3f64, |m, v| m.max(v.abs()));
        for _ in 0..iters {
            let sub = self.model.subgradient(&u);
            let mut d = DVector::from_iterator(vars.len(), vars.iter().map(|&v| -sub[v]));
            self.tangent(&mut d);
            let norm = d.amax();
            if norm == 0.0 {
                break;
            }
            let mut t = 2.0 * step;
            let mut accepted = false;
            for _ in 0..40 {
                let mut trial = u.clone();
                for (k, &v) in vars.iter().enumerate() {
                    trial[v] += t * d[k] / norm;
                }
                project_mean_zero(self.space, &mut trial);
                let value = self.model.value(&trial);
                if value < best {
                    u = trial;
                    best = value;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
            step = t;
            *z = self.smooth.to_local(&u);
            self.history.push(best);
            self.true_history.push(best);
            self.iterations += 1;
        }
    }
}

/// Minimize one energy variant, optionally from a given field.
pub fn minimize_variant(
    space: &MetricMeasureSpace,
    spec: &ProblemSpec,
    variant: Variant,
    opts: &SolverOptions,
    start: Option<&[f64]>,
) -> Result<MinimizerResult> {
    opts.validate()?;
    let model = EnergyModel::new(space, spec, variant);
    let smooth = Smoothed::new(&model);
    let mut u0 = match start {
        Some(s) if s.len() != space.len() => {
            return Err(Error::DimensionMismatch {
                expected: space.len(),
                got: s.len(),
            })
        }
        Some(s) => s.to_vec(),
        None => vec![0.0; space.len()],
    };
    for (v, x) in u0.iter_mut().enumerate() {
        if !space.closure().contains(&v) {
            *x = 0.0;
        }
    }
    project_mean_zero(space, &mut u0);
    let mut run = Run {
        space,
        model: &model,
        m: smooth.mean_weights(),
        smooth,
        history: Vec::new(),
        true_history: vec![model.value(&u0)],
        iterations: 0,
    };
    let mut z = run.smooth.to_local(&u0);

    let range = if variant == Variant::I { 0.0 } else { data_range(spec, space) };
    let mut eps = opts
        .eps_initial
        .unwrap_or(if range > 0.0 { 0.1 * range } else { 0.1 })
        .max(opts.eps_floor);
    let floor = opts.eps_floor.max(f64::MIN_POSITIVE);
    let mut converged;
    loop {
        let at_floor = eps <= floor * (1.0 + 1e-12);
        // Nothing is left to decay at the floor, so the last stage may use the whole budget.
        let budget = if at_floor { opts.max_iters } else { opts.eps_every };
        let settled = run.stage(&mut z, eps, opts, budget);
        if at_floor {
            converged = settled;
            break;
        }
        if run.iterations >= opts.max_iters {
            converged = false;
            break;
        }
        eps = (eps * opts.eps_decay).max(floor);
    }
    run.polish(&mut z, opts.polish_iters);
    if run.iterations > opts.max_iters {
        converged = false;
    }

    let mut u = run.smooth.to_full(&z);
    project_mean_zero(space, &mut u);
    let value = model.value(&u);
    let g = model.gradient_field(&u);
    Ok(MinimizerResult {
        u: ScalarField::new(space, u, Support::Closure)?,
        g: ScalarField::new(space, g, Support::Domain)?,
        value,
        iterations: run.iterations,
        converged,
        history: run.history,
        true_history: run.true_history,
        eps_final: eps,
    })
}

/// Scan grid for [`brute_force_oracle`]: values `lo, lo + step, ..., <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleGrid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleResult {
    pub value: f64,
    pub argmin: Vec<f64>,
    /// Largest energy increase from the grid minimizer to a neighboring grid point.
    pub resolution_bound: f64,
    pub evaluations: usize,
}

pub const ORACLE_MAX_DOF: usize = 4;

/// Exhaustive grid scan of `J` over mean-zero fields; the first domain vertex
/// is eliminated by the mean-zero constraint.
pub fn brute_force_oracle(
    space: &MetricMeasureSpace,
    spec: &ProblemSpec,
    grid: &OracleGrid,
) -> Result<OracleResult> {
    if !(grid.step > 0.0 && grid.hi >= grid.lo && grid.lo.is_finite() && grid.hi.is_finite()) {
        return Err(Error::BadParams("oracle grid needs lo <= hi and step > 0".into()));
    }
    let closure = space.closure();
    let dof = closure.len() - 1;
    if dof > ORACLE_MAX_DOF {
        return Err(Error::TooManyVertices {
            dof,
            max: ORACLE_MAX_DOF,
        });
    }
    let model = EnergyModel::new(space, spec, Variant::J);
    let eliminated = space.interior()[0];
    let free: Vec<usize> = closure.iter().copied().filter(|&v| v != eliminated).collect();
    let count = ((grid.hi - grid.lo) / grid.step + 1e-9).floor() as usize + 1;
    let level = |k: usize| grid.lo + k as f64 * grid.step;

    let field = |idx: &[usize]| -> Vec<f64> {
        let mut u = vec![0.0; space.len()];
        let mut moment = 0.0;
        for (&v, &k) in free.iter().zip(idx) {
            u[v] = level(k);
            if space.is_interior(v) {
                moment += space.mu(v) * u[v];
            }
        }
        u[eliminated] = -moment / space.mu(eliminated);
        u
    };
    let decode = |mut code: usize| -> Vec<usize> {
        let mut idx = vec![0; dof];
        for slot in idx.iter_mut() {
            *slot = code % count;
            code /= count;
        }
        idx
    };
    let total = count.pow(dof as u32);
    let (best_value, best_code) = (0..total)
        .into_par_iter()
        .map(|code| (model.value(&field(&decode(code))), code))
        .reduce(
            || (f64::INFINITY, usize::MAX),
            |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    let best_idx = decode(best_code);

    let mut bound: f64 = 0.0;
    for offset in 0..3usize.pow(dof as u32) {
        let mut idx = best_idx.clone();
        let mut o = offset;
        let mut valid = true;
        for slot in idx.iter_mut() {
            let delta = (o % 3) as isize - 1;
            o /= 3;
            let k = *slot as isize + delta;
            if k < 0 || k >= count as isize {
                valid = false;
            }
            *slot = k.max(0) as usize;
        }
        if valid {
            bound = bound.max(model.value(&field(&idx)) - best_value);
        }
    }
    Ok(OracleResult {
        value: best_value,
        argmin: field(&best_idx),
        resolution_bound: bound,
        evaluations: total,
    })
}

/// Pairwise agreement of minimizers from independent starts.
#[derive(Debug, Clone, Serialize)]
pub struct UniquenessReport {
    pub starts: usize,
    pub values: Vec<f64>,
    pub converged: Vec<bool>,
    pub best_start: usize,
    pub best_value: f64,
    pub max_value_gap: f64,
    /// Largest `||g_i - g_j||_inf`.
    pub max_gradient_gap: f64,
    /// Largest difference of `-sum G(u) mu + sum u f P`.
    pub max_non_gradient_gap: f64,
    /// Largest `||u_i - u_j||_inf` over the domain.
    pub max_field_gap_domain: f64,
    /// Largest `||u_i - u_j||_inf` over the closure.
    pub max_field_gap_closure: f64,
    /// Largest `J((u_i + u_j) / 2) - best_value`.
    pub max_midpoint_excess: f64,
    #[serde(skip)]
    pub results: Vec<MinimizerResult>,
}

impl UniquenessReport {
    pub fn best(&self) -> &MinimizerResult {
        &self.results[self.best_start]
    }
}

/// Random mean-zero start; start 0 is the zero field.
pub fn random_start(space: &MetricMeasureSpace, spec: &ProblemSpec, seed: u64, start: usize) -> ScalarField {
    let mut u = vec![0.0; space.len()];
    if start > 0 {
        let amp = data_range(spec, space).max(1.0);
        let mut rng = start_rng(seed, start);
        for &v in space.closure() {
            u[v] = rng.gen_range(-amp..amp);
        }
        project_mean_zero(space, &mut u);
    }
    ScalarField::new(space, u, Support::Closure).expect("finite values")
}

fn sup_gap(a: &[f64], b: &[f64], set: &[usize]) -> f64 {
    set.iter().fold(0.0, |m, &v| m.max((a[v] - b[v]).abs()))
}

pub fn multi_start_analysis(
    space: &MetricMeasureSpace,
    spec: &ProblemSpec,
    opts: &SolverOptions,
) -> Result<UniquenessReport> {
    if opts.starts < 2 {
        return Err(Error::BadParams("multi-start analysis needs at least 2 starts".into()));
    }
    let results: Vec<MinimizerResult> = (0..opts.starts)
        .into_par_iter()
        .map(|k| minimize_from(space, spec, opts, &random_start(space, spec, opts.seed, k)))
        .collect::<Result<_>>()?;
    let model = EnergyModel::new(space, spec, Variant::J);
    let norm2 = |r: &MinimizerResult| r.u.values().iter().map(|v| v * v).sum::<f64>();
    let best_start = (0..results.len())
        .min_by(|&a, &b| {
            results[a]
                .value
                .total_cmp(&results[b].value)
                .then(norm2(&results[a]).total_cmp(&norm2(&results[b])))
        })
        .expect("at least two starts");
    let best_value = results[best_start].value;
    let parts: Vec<_> = results.iter().map(|r| model.parts(r.u.values())).collect();
    let mut report = UniquenessReport {
        starts: results.len(),
        values: results.iter().map(|r| r.value).collect(),
        converged: results.iter().map(|r| r.converged).collect(),
        best_start,
        best_value,
        max_value_gap: 0.0,
        max_gradient_gap: 0.0,
        max_non_gradient_gap: 0.0,
        max_field_gap_domain: 0.0,
        max_field_gap_closure: 0.0,
        max_midpoint_excess: f64::NEG_INFINITY,
        results: Vec::new(),
    };
    for i in 0..results.len() {
        for j in i + 1..results.len() {
            let (a, b) = (&results[i], &results[j]);
            report.max_value_gap = report.max_value_gap.max((a.value - b.value).abs());
            report.max_gradient_gap = report.max_gradient_gap.max(a.g.sup_distance(&b.g));
            report.max_non_gradient_gap = report
                .max_non_gradient_gap
                .max((parts[i].non_gradient() - parts[j].non_gradient()).abs());
            report.max_field_gap_domain = report
                .max_field_gap_domain
                .max(sup_gap(a.u.values(), b.u.values(), space.interior()));
            report.max_field_gap_closure = report
                .max_field_gap_closure
                .max(sup_gap(a.u.values(), b.u.values(), space.closure()));
            let mut mid: Vec<f64> = a.u.values().iter().zip(b.u.values()).map(|(x, y)| 0.5 * (x + y)).collect();
            project_mean_zero(space, &mut mid);
            report.max_midpoint_excess = report.max_midpoint_excess.max(model.value(&mid) - best_value);
        }
    }
    report.results = results;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub jensen_probes: usize,
    pub jensen_violations: usize,
    /// Largest `J(t u + (1 - t) v) - t J(u) - (1 - t) J(v)`.
    pub jensen_worst_margin: f64,
    /// Uniform convexity probes, run only for `p >= 2`.
    pub clarkson_probes: usize,
    pub clarkson_violations: usize,
    /// Largest `((a + b) / 2)^p - (a^p + b^p) / 2 + (delta / 2)^p`.
    pub clarkson_worst_margin: f64,
}

pub const JENSEN_TOL: f64 = 1e-9;

pub fn convexity_suite(space: &MetricMeasureSpace, spec: &ProblemSpec, n: usize, seed: u64) -> Result<ProbeReport> {
    if n == 0 {
        return Err(Error::BadParams("at least one probe is required".into()));
    }
    let model = EnergyModel::new(space, spec, Variant::J);
    let mut rng = start_rng(seed, usize::MAX);
    let amp = data_range(spec, space).max(1.0);
    let field = |rng: &mut rand_chacha::ChaCha8Rng| {
        let mut u = vec![0.0; space.len()];
        for &v in space.closure() {
            u[v] = rng.gen_range(-amp..amp);
        }
        project_mean_zero(space, &mut u);
        u
    };
    let mut report = ProbeReport {
        jensen_probes: n,
        jensen_violations: 0,
        jensen_worst_margin: f64::NEG_INFINITY,
        clarkson_probes: 0,
        clarkson_violations: 0,
        clarkson_worst_margin: f64::NEG_INFINITY,
    };
    for k in 0..n {
        let u = field(&mut rng);
        let v = field(&mut rng);
        let t: f64 = match k {
            0 => 0.0,
            1 => 1.0,
            _ => rng.gen_range(0.0..=1.0),
        };
        let mix: Vec<f64> = u.iter().zip(&v).map(|(a, b)| t * a + (1.0 - t) * b).collect();
        let margin = model.value(&mix) - t * model.value(&u) - (1.0 - t) * model.value(&v);
        report.jensen_worst_margin = report.jensen_worst_margin.max(margin);
        if margin > JENSEN_TOL {
            report.jensen_violations += 1;
        }
    }
    let p = spec.p;
    if p >= 2.0 {
        report.clarkson_probes = n;
        for _ in 0..n {
            let a: f64 = rng.gen_range(0.0..2.0);
            let b: f64 = rng.gen_range(0.0..2.0);
            let delta = (a - b).abs() * rng.gen_range(0.0..=1.0);
            let margin = clarkson_margin(a, b, delta, p);
            report.clarkson_worst_margin = report.clarkson_worst_margin.max(margin);
            if margin > 1e-12 {
                report.clarkson_violations += 1;
            }
        }
    }
    Ok(report)
}

/// `((a + b) / 2)^p - ((a^p + b^p) / 2 - (delta / 2)^p)`; nonpositive when `|a - b| >= delta` and `p >= 2`.
pub fn clarkson_margin(a: f64, b: f64, delta: f64, p: f64) -> f64 {
    ((a + b) / 2.0).powf(p) - ((a.powf(p) + b.powf(p)) / 2.0 - (delta / 2.0).powf(p))
}
