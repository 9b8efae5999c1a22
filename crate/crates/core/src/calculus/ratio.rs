//! Projected subgradient ascent for scale-invariant ratios `N(u) / D(u)`.
//!
//! Used to estimate best constants in Poincaré, Sobolev and trace
//! inequalities. Every accepted step strictly increases the ratio, so the
//! returned value is attained by the returned field and is a certified lower
//! bound on the supremum.

pub(crate) trait RatioObjective {
    /// Numerator and denominator at `u`.
    fn evaluate(&self, u: &[f64]) -> (f64, f64);
    /// Numerator, denominator and one subgradient of each.
    fn subgradients(&self, u: &[f64]) -> (f64, f64, Vec<f64>, Vec<f64>);
    /// Project a direction onto the admissible tangent space.
    fn project_direction(&self, d: &mut [f64]);
    /// Map a point to its canonical representative (the ratio is unchanged).
    fn normalize(&self, u: &mut [f64]);
}

pub(crate) fn ratio(num: f64, den: f64) -> f64 {
    if num <= 0.0 {
        0.0
    } else if den <= 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

pub(crate) fn ascend<R: RatioObjective>(obj: &R, mut u: Vec<f64>, iterations: usize) -> (f64, Vec<f64>) {
    obj.normalize(&mut u);
    let (n0, d0) = obj.evaluate(&u);
    let mut current = ratio(n0, d0);
    if !current.is_finite() || current == 0.0 {
        return (current, u);
    }
    let mut step = 0.25;
    for _ in 0..iterations {
        let (num, den, dn, dd) = obj.subgradients(&u);
        let mut dir: Vec<f64> = dn.iter().zip(&dd).map(|(a, b)| a / num - b / den).collect();
        obj.project_direction(&mut dir);
        let dir_norm = dir.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if dir_norm == 0.0 {
            break;
        }
        let scale = u.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        let mut accepted = false;
        let mut t = step;
        for _ in 0..40 {
            let trial: Vec<f64> = u
                .iter()
                .zip(&dir)
                .map(|(x, d)| x + t * scale * d / dir_norm)
                .collect();
            let (tn, td) = obj.evaluate(&trial);
            let r = ratio(tn, td);
            if r > current * (1.0 + 1e-13) {
                u = trial;
                obj.normalize(&mut u);
                let (nn, nd) = obj.evaluate(&u);
                current = ratio(nn, nd);
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted || !current.is_finite() {
            break;
        }
        step = (2.0 * t).min(1.0);
    }
    (current, u)
}

/// Weighted `r`-norm over `set` and a subgradient with respect to each entry.
pub(crate) fn norm_and_gradient(
    values: &[f64],
    weights: &[f64],
    set: &[usize],
    r: f64,
    n: usize,
) -> (f64, Vec<f64>) {
    let mut grad = vec![0.0; n];
    if r.is_infinite() {
        let mut best = (0.0, None);
        for &v in set {
            if best.1.is_none() || values[v].abs() > best.0 {
                best = (values[v].abs(), Some(v));
            }
        }
        if let (m, Some(v)) = best {
            if m > 0.0 {
                grad[v] = values[v].signum();
            }
        }
        return (best.0, grad);
    }
    let total: f64 = set.iter().map(|&v| values[v].abs().powf(r) * weights[v]).sum();
    if total <= 0.0 {
        return (0.0, grad);
    }
    let norm = total.powf(1.0 / r);
    let factor = norm.powf(1.0 - r);
    for &v in set {
        let x = values[v];
        if x != 0.0 {
            grad[v] = factor * weights[v] * x.abs().powf(r - 1.0) * x.signum();
        }
    }
    (norm, grad)
}

/// `(sum_x w(x) g(x)^p)^{1/p}` for the stencil's max slopes, with a subgradient.
pub(crate) fn slope_norm_and_gradient(
    stencil: &super::SlopeStencil,
    u: &[f64],
    weights: &[f64],
    p: f64,
) -> (f64, Vec<f64>) {
    let slopes = stencil.slopes_with_argmax(u);
    let total: f64 = stencil
        .targets()
        .iter()
        .zip(&slopes)
        .map(|(&x, (g, _))| weights[x] * g.powf(p))
        .sum();
    let mut grad = vec![0.0; u.len()];
    if total <= 0.0 {
        return (0.0, grad);
    }
    let norm = total.powf(1.0 / p);
    let factor = norm.powf(1.0 - p);
    for (&x, &(g, arg)) in stencil.targets().iter().zip(&slopes) {
        if let (true, Some((y, inv))) = (g > 0.0, arg) {
            let w = factor * weights[x] * g.powf(p - 1.0) * inv * (u[y] - u[x]).signum();
            grad[y] += w;
            grad[x] -= w;
        }
    }
    (norm, grad)
}
