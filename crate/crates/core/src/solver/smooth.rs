//! Smoothed energy: each vertex max in the gradient is replaced by
//! `eps * ln sum_y (exp(d_y / eps) + exp(-d_y / eps))`, which is convex, at
//! least the true max slope, and within `eps ln(2k)` of it.

use nalgebra::{DMatrix, DVector};

use crate::energy::EnergyModel;

pub(crate) struct Smoothed<'a> {
    model: &'a EnergyModel,
    /// Closure vertex at each local coordinate.
    vars: Vec<usize>,
    /// Local coordinate of each vertex (usize::MAX outside the closure).
    local: Vec<usize>,
}

/// Smallest `|u|` used when evaluating the reaction curvature `|u|^(gamma - 2)`.
const CURVATURE_FLOOR: f64 = 1e-8;

impl<'a> Smoothed<'a> {
    pub(crate) fn new(model: &'a EnergyModel) -> Self {
        let vars = model.closure().to_vec();
        let mut local = vec![usize::MAX; model.len()];
        for (k, &v) in vars.iter().enumerate() {
            local[v] = k;
        }
        Self { model, vars, local }
    }

    pub(crate) fn dim(&self) -> usize {
        self.vars.len()
    }

    pub(crate) fn vars(&self) -> &[usize] {
        &self.vars
    }

    /// Domain measure in local coordinates (zero on boundary coordinates).
    pub(crate) fn mean_weights(&self) -> DVector<f64> {
        let mu = self.model.mu();
        let mut m = DVector::zeros(self.dim());
        for &x in self.model.interior() {
            m[self.local[x]] = mu[x];
        }
        m
    }

    pub(crate) fn to_full(&self, z: &DVector<f64>) -> Vec<f64> {
        let mut u = vec![0.0; self.model.len()];
        for (k, &v) in self.vars.iter().enumerate() {
            u[v] = z[k];
        }
        u
    }

    pub(crate) fn to_local(&self, u: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.dim(), self.vars.iter().map(|&v| u[v]))
    }

    /// Smoothed slope at target `k` with the sensitivities `s_j = dg / dd_j`
    /// and `t_j` (so that `d2g / dd_j dd_l = (t_j delta_jl - s_j s_l) / eps`).
    fn soft_slope(&self, k: usize, u: &[f64], eps: f64, s: &mut Vec<f64>, t: &mut Vec<f64>) -> f64 {
        let stencil = self.model.stencil();
        let x = stencil.targets()[k];
        let nb = stencil.neighbors(k);
        s.clear();
        t.clear();
        let mut big: f64 = 0.0;
        for &(y, inv) in nb {
            big = big.max(((u[y] - u[x]) * inv).abs());
        }
        let mut z = 0.0;
        for &(y, inv) in nb {
            let d = (u[y] - u[x]) * inv;
            let plus = ((d - big) / eps).exp();
            let minus = ((-d - big) / eps).exp();
            z += plus + minus;
            s.push(plus);
            t.push(minus);
        }
        for j in 0..nb.len() {
            let (plus, minus) = (s[j] / z, t[j] / z);
            s[j] = plus - minus;
            t[j] = plus + minus;
        }
        big + eps * z.ln()
    }

    pub(crate) fn value(&self, z: &DVector<f64>, eps: f64) -> f64 {
        let u = self.to_full(z);
        let (mut s, mut t) = (Vec::new(), Vec::new());
        let p = self.model.p();
        let mu = self.model.mu();
        let mut total = 0.0;
        for (k, &x) in self.model.stencil().targets().iter().enumerate() {
            let g = self.soft_slope(k, &u, eps, &mut s, &mut t);
            total += mu[x] * g.powf(p);
        }
        let parts = self.model.parts(&u);
        total + parts.reaction + parts.boundary
    }

    /// Value, gradient and (when requested) Hessian in local coordinates.
    pub(crate) fn derivatives(
        &self,
        z: &DVector<f64>,
        eps: f64,
        hessian: bool,
    ) -> (f64, DVector<f64>, Option<DMatrix<f64>>) {
        let m = self.dim();
        let u = self.to_full(z);
        let p = self.model.p();
        let mu = self.model.mu();
        let stencil = self.model.stencil();
        let mut grad = DVector::zeros(m);
        let mut hess = hessian.then(|| DMatrix::zeros(m, m));
        let (mut s, mut t) = (Vec::new(), Vec::new());
        let mut total = 0.0;
        let mut coeff = Vec::new();
        let mut idx = Vec::new();

        for (k, &x) in stencil.targets().iter().enumerate() {
            let g = self.soft_slope(k, &u, eps, &mut s, &mut t);
            total += mu[x] * g.powf(p);
            let nb = stencil.neighbors(k);
            let d1 = mu[x] * p * g.powf(p - 1.0);
            let lx = self.local[x];
            for (j, &(y, inv)) in nb.iter().enumerate() {
                let gj = d1 * s[j] * inv;
                grad[self.local[y]] += gj;
                grad[lx] -= gj;
            }
            if let Some(h) = hess.as_mut() {
                // Hessian in d: a diag(t) - b s s^T, pulled back through d_j = inv_j (u_y - u_x).
                let a = d1 / eps;
                let b = d1 / eps - mu[x] * p * (p - 1.0) * g.powf(p - 2.0);
                coeff.clear();
                idx.clear();
                for (j, &(y, inv)) in nb.iter().enumerate() {
                    coeff.push(s[j] * inv);
                    idx.push(self.local[y]);
                    let diag = a * t[j] * inv * inv;
                    let ly = self.local[y];
                    h[(ly, ly)] += diag;
                    h[(lx, lx)] += diag;
                    h[(ly, lx)] -= diag;
                    h[(lx, ly)] -= diag;
                }
                let sum: f64 = coeff.iter().sum();
                for (j, &lj) in idx.iter().enumerate() {
                    for (l, &ll) in idx.iter().enumerate() {
                        h[(lj, ll)] -= b * coeff[j] * coeff[l];
                    }
                    h[(lj, lx)] += b * coeff[j] * sum;
                    h[(lx, lj)] += b * coeff[j] * sum;
                }
                h[(lx, lx)] -= b * sum * sum;
            }
        }

        let reaction = self.model.reaction();
        let gamma = reaction.gamma;
        for &x in self.model.interior() {
            let v = u[x];
            let lx = self.local[x];
            total += mu[x] * (v.abs().powf(gamma) - reaction.c);
            grad[lx] += mu[x] * gamma * v.abs().powf(gamma - 1.0) * v.signum();
            if let Some(h) = hess.as_mut() {
                h[(lx, lx)] +=
                    mu[x] * gamma * (gamma - 1.0) * v.abs().max(CURVATURE_FLOOR).powf(gamma - 2.0);
            }
        }
        let load = self.model.load();
        for (k, &v) in self.vars.iter().enumerate() {
            total += load[v] * u[v];
            grad[k] += load[v];
        }
        (total, grad, hess)
    }
}
