//! Separable power programs
//!
//! ```text
//! minimize   sum_x w(x) x(x)^p
//! subject to sum_x a(r, x) x(x) >= b(r)   for every row r,   x >= 0,
//! ```
//! with nonnegative coefficients. For `p > 1` the Lagrangian dual is smooth
//! and concave, and the primal point is recovered in closed form from the
//! multipliers, `x = (s / (p w))^{1/(p-1)}` with `s = A^T lambda`; we run
//! cyclic coordinate ascent on the dual and stop on the duality gap of a
//! rescaled feasible point. `p = 1` is a linear program.

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct PowerProgram {
    weights: Vec<f64>,
    p: f64,
    rows: Vec<Vec<(usize, f64)>>,
    rhs: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ProgramSolution {
    /// Feasible primal point.
    pub x: Vec<f64>,
    pub objective: f64,
    /// Upper bound on `objective - optimum`.
    pub gap: f64,
    pub sweeps: usize,
}

const MAX_SWEEPS: usize = 200_000;

impl PowerProgram {
    pub fn new(weights: Vec<f64>, p: f64) -> Self {
        Self {
            weights,
            p,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    /// Add `sum coeffs >= rhs`. Rows with `rhs <= 0` are always satisfied and dropped.
    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) {
        if rhs > 0.0 {
            self.rows.push(coeffs);
            self.rhs.push(rhs);
        }
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.weights)
            .map(|(v, w)| w * v.powf(self.p))
            .sum()
    }

    pub fn solve(&self, tol: f64) -> Result<ProgramSolution> {
        let n = self.weights.len();
        if self.rows.is_empty() {
            return Ok(ProgramSolution {
                x: vec![0.0; n],
                objective: 0.0,
                gap: 0.0,
                sweeps: 0,
            });
        }
        for row in &self.rows {
            if row.iter().all(|&(_, a)| a <= 0.0) {
                return Err(Error::SolverFailure("infeasible row".into()));
            }
        }
        if self.p == 1.0 {
            self.solve_linear()
        } else {
            self.solve_dual(tol)
        }
    }

    fn solve_linear(&self) -> Result<ProgramSolution> {
        let mut problem = Problem::new(OptimizationDirection::Minimize);
        let vars: Vec<_> = self
            .weights
            .iter()
            .map(|&w| problem.add_var(w, (0.0, f64::INFINITY)))
            .collect();
        for (row, &b) in self.rows.iter().zip(&self.rhs) {
            let expr: Vec<_> = row.iter().map(|&(x, a)| (vars[x], a)).collect();
            problem.add_constraint(&expr[..], ComparisonOp::Ge, b);
        }
        let solution = problem
            .solve()
            .map_err(|e| Error::SolverFailure(e.to_string()))?;
        let x: Vec<f64> = vars.iter().map(|&v| solution[v].max(0.0)).collect();
        Ok(ProgramSolution {
            objective: self.objective(&x),
            x,
            gap: 0.0,
            sweeps: 0,
        })
    }

    fn primal(&self, s: f64, w: f64) -> f64 {
        if s <= 0.0 {
            0.0
        } else {
            (s / (self.p * w)).powf(1.0 / (self.p - 1.0))
        }
    }

    fn solve_dual(&self, tol: f64) -> Result<ProgramSolution> {
        let n = self.weights.len();
        let p = self.p;
        let mut lambda = vec![0.0; self.rows.len()];
        let mut s = vec![0.0; n];
        let mut best: Option<ProgramSolution> = None;

        for sweep in 1..=MAX_SWEEPS {
            for (r, row) in self.rows.iter().enumerate() {
                let b = self.rhs[r];
                let old = lambda[r];
                let base: Vec<f64> = row.iter().map(|&(x, a)| s[x] - old * a).collect();
                let h = |l: f64| -> f64 {
                    row.iter()
                        .zip(&base)
                        .map(|(&(x, a), &s0)| a * self.primal((s0 + l * a).max(0.0), self.weights[x]))
                        .sum::<f64>()
                        - b
                };
                let new = if h(0.0) >= 0.0 {
                    0.0
                } else {
                    solve_increasing(h, old)
                };
                if new != old {
                    for (&(x, a), &s0) in row.iter().zip(&base) {
                        s[x] = (s0 + new * a).max(0.0);
                    }
                    lambda[r] = new;
                }
            }

            if sweep % 4 != 0 && sweep > 8 {
                continue;
            }
            let x: Vec<f64> = (0..n).map(|i| self.primal(s[i], self.weights[i])).collect();
            let mut scale: f64 = 0.0;
            for (row, &b) in self.rows.iter().zip(&self.rhs) {
                let lhs: f64 = row.iter().map(|&(i, a)| a * x[i]).sum();
                scale = scale.max(if lhs > 0.0 { b / lhs } else { f64::INFINITY });
            }
            if !scale.is_finite() {
                continue;
            }
            let energy = self.objective(&x);
            let dual = (1.0 - p) * energy + lambda.iter().zip(&self.rhs).map(|(l, b)| l * b).sum::<f64>();
            let objective = scale.powf(p) * energy;
            let gap = (objective - dual).max(0.0);
            let candidate = ProgramSolution {
                x: x.iter().map(|v| v * scale).collect(),
                objective,
                gap,
                sweeps: sweep,
            };
            let done = gap <= tol * objective.abs().max(1.0);
            if best.as_ref().is_none_or(|b| candidate.objective < b.objective) {
                best = Some(candidate);
            }
            if done {
                let mut out = best.expect("set above");
                out.gap = gap;
                return Ok(out);
            }
        }
        Err(Error::SolverFailure(format!(
            "duality gap above {tol:e} after {MAX_SWEEPS} sweeps (best gap {:e})",
            best.map_or(f64::INFINITY, |b| b.gap)
        )))
    }
}

/// Root of an increasing continuous function with `h(0) < 0`, starting the
/// bracket search near `guess`.
fn solve_increasing(h: impl Fn(f64) -> f64, guess: f64) -> f64 {
    let mut lo = 0.0;
    let mut hi = if guess > 0.0 { guess } else { 1.0 };
    while h(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return hi;
        }
    }
    let (mut f_lo, mut f_hi) = (h(lo), h(hi));
    // Illinois-style regula falsi, falling back to bisection when it stalls.
    let mut side = 0i8;
    for _ in 0..200 {
        if hi - lo <= 1e-15 * hi.max(1e-300) {
            break;
        }
        let mut mid = hi - f_hi * (hi - lo) / (f_hi - f_lo);
        if !(mid > lo && mid < hi) {
            mid = 0.5 * (lo + hi);
        }
        let f_mid = h(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid < 0.0 {
            lo = mid;
            f_lo = f_mid;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = mid;
            f_hi = f_mid;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_constraint_closed_form() {
        // min x^2 + y^2 s.t. x + y >= 2  ->  (1, 1), value 2.
        let mut prog = PowerProgram::new(vec![1.0, 1.0], 2.0);
        prog.add_row(vec![(0, 1.0), (1, 1.0)], 2.0);
        let sol = prog.solve(1e-12).unwrap();
        assert!((sol.objective - 2.0).abs() < 1e-10);
        assert!((sol.x[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn weighted_split() {
        // min x^2 + 3 y^2 s.t. x + y >= 1: KKT gives x = 3/4, y = 1/4, value 3/4.
        let mut prog = PowerProgram::new(vec![1.0, 3.0], 2.0);
        prog.add_row(vec![(0, 1.0), (1, 1.0)], 1.0);
        let sol = prog.solve(1e-12).unwrap();
        assert!((sol.objective - 0.75).abs() < 1e-10);
    }

    #[test]
    fn linear_case() {
        let mut prog = PowerProgram::new(vec![1.0, 2.0], 1.0);
        prog.add_row(vec![(0, 1.0), (1, 1.0)], 1.0);
        prog.add_row(vec![(1, 1.0)], 0.25);
        let sol = prog.solve(1e-12).unwrap();
        assert!((sol.objective - 1.25).abs() < 1e-9);
    }

    #[test]
    fn dropped_rows_give_zero() {
        let mut prog = PowerProgram::new(vec![1.0, 1.0], 3.0);
        prog.add_row(vec![(0, 1.0)], 0.0);
        let sol = prog.solve(1e-12).unwrap();
        assert_eq!(sol.objective, 0.0);
    }

    #[test]
    fn intersecting_rows() {
        // Two overlapping rows; compare with a dense scan of the 2-d problem.
        let mut prog = PowerProgram::new(vec![1.0, 1.0, 2.0], 1.5);
        prog.add_row(vec![(0, 1.0), (1, 0.5)], 1.0);
        prog.add_row(vec![(1, 1.0), (2, 1.0)], 2.0);
        let sol = prog.solve(1e-10).unwrap();
        let mut best = f64::INFINITY;
        let steps = 1500;
        for i in 0..=steps {
            let y = 2.0 * i as f64 / steps as f64;
            for j in 0..=steps {
                let z = 2.0 * j as f64 / steps as f64;
                if y + z < 2.0 {
                    continue;
                }
                let x = (1.0 - 0.5 * y).max(0.0);
                best = best.min(x.powf(1.5) + y.powf(1.5) + 2.0 * z.powf(1.5));
            }
        }
        assert!(sol.objective <= best + 1e-9);
        assert!(best - sol.objective < 5e-3);
    }
}
