//! Discrete upper-gradient calculus on a [`MetricMeasureSpace`].
//!
//! Line integrals use the trapezoid rule on edges, so a vertex field `g`
//! is an upper gradient of `u` exactly when every edge satisfies
//! `|u(x) - u(y)| <= len(x, y) * (g(x) + g(y)) / 2`; longer paths follow by
//! telescoping.

pub(crate) mod embedding;
mod program;
pub(crate) mod ratio;

pub use embedding::{embedding_constants, EmbeddingConstants, EmbeddingSample, RatioSearch};
pub use program::{PowerProgram, ProgramSolution};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{MetricMeasureSpace, Role, VertexId};

/// On which vertices a field is meaningful. Values are always stored for
/// every vertex of the space; entries outside the support are zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Support {
    All,
    Domain,
    Boundary,
    Closure,
}

impl Support {
    pub fn contains(self, role: Role) -> bool {
        match self {
            Support::All => true,
            Support::Domain => role == Role::Interior,
            Support::Boundary => role == Role::Boundary,
            Support::Closure => role != Role::Exterior,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    values: Vec<f64>,
    support: Support,
}

impl ScalarField {
    /// Wrap full-length values; entries outside `support` are zeroed.
    pub fn new(space: &MetricMeasureSpace, mut values: Vec<f64>, support: Support) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::DimensionMismatch {
                expected: space.len(),
                got: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidProblem(format!("field value {v} is not finite")));
        }
        for (i, v) in values.iter_mut().enumerate() {
            if !support.contains(space.role(i)) {
                *v = 0.0;
            }
        }
        Ok(Self { values, support })
    }

    pub fn zeros(space: &MetricMeasureSpace, support: Support) -> Self {
        Self {
            values: vec![0.0; space.len()],
            support,
        }
    }

    pub fn from_fn(
        space: &MetricMeasureSpace,
        support: Support,
        mut f: impl FnMut(VertexId) -> f64,
    ) -> Self {
        let values = (0..space.len())
            .map(|v| if support.contains(space.role(v)) { f(v) } else { 0.0 })
            .collect();
        Self { values, support }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn get(&self, v: VertexId) -> f64 {
        self.values[v]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| a * v).collect(),
            support: self.support,
        }
    }

    /// `a * self + b * other`; the support is the wider of the two.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        let support = if self.support == other.support {
            self.support
        } else {
            Support::All
        };
        Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
            support,
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

impl std::ops::Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.scaled(-1.0)
    }
}

/// `(sum_{x in set} |values(x)|^p weight(x))^{1/p}`, with `p = inf` giving the max.
pub fn weighted_norm(values: &[f64], weights: &[f64], set: &[VertexId], p: f64) -> f64 {
    if p.is_infinite() {
        return set.iter().fold(0.0, |m, &v| m.max(values[v].abs()));
    }
    set.iter()
        .map(|&v| values[v].abs().powf(p) * weights[v])
        .sum::<f64>()
        .powf(1.0 / p)
}

/// Vertex sets on which slopes are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    All,
    Domain,
    Closure,
}

impl Region {
    fn contains(self, role: Role) -> bool {
        match self {
            Region::All => true,
            Region::Domain => role == Role::Interior,
            Region::Closure => role != Role::Exterior,
        }
    }

    fn support(self) -> Support {
        match self {
            Region::All => Support::All,
            Region::Domain => Support::Domain,
            Region::Closure => Support::Closure,
        }
    }
}

/// Neighbor lists of the subgraph induced by a region, stored with inverse
/// edge lengths.
#[derive(Debug, Clone)]
pub struct SlopeStencil {
    targets: Vec<VertexId>,
    neighbors: Vec<Vec<(VertexId, f64)>>,
}

impl SlopeStencil {
    /// Stencil evaluating slopes at `targets` using neighbors inside `region`.
    pub fn new(space: &MetricMeasureSpace, region: Region, targets: &[VertexId]) -> Self {
        let neighbors = targets
            .iter()
            .map(|&x| {
                space
                    .neighbors(x)
                    .iter()
                    .filter(|&&(y, _)| region.contains(space.role(y)))
                    .map(|&(y, len)| (y, 1.0 / len))
                    .collect()
            })
            .collect();
        Self {
            targets: targets.to_vec(),
            neighbors,
        }
    }

    /// The gradient notion used by the energy: slopes at interior vertices,
    /// taken over edges to interior and boundary neighbors.
    pub fn energy(space: &MetricMeasureSpace) -> Self {
        Self::new(space, Region::Closure, space.interior())
    }

    pub fn targets(&self) -> &[VertexId] {
        &self.targets
    }

    /// Drop neighbors rejected by `keep`.
    pub fn retain_neighbors(&mut self, keep: impl Fn(VertexId) -> bool) {
        for nb in &mut self.neighbors {
            nb.retain(|&(y, _)| keep(y));
        }
    }

    pub fn neighbors(&self, k: usize) -> &[(VertexId, f64)] {
        &self.neighbors[k]
    }

    pub fn isolated(&self) -> Option<VertexId> {
        self.neighbors
            .iter()
            .position(|n| n.is_empty())
            .map(|k| self.targets[k])
    }

    /// Max slope at each target, in target order. Isolated targets get 0.
    pub fn slopes(&self, u: &[f64]) -> Vec<f64> {
        self.targets
            .iter()
            .zip(&self.neighbors)
            .map(|(&x, nb)| {
                nb.iter()
                    .map(|&(y, inv)| (u[y] - u[x]).abs() * inv)
                    .fold(0.0, f64::max)
            })
            .collect()
    }

    /// Max slope at each target together with the neighbor attaining it.
    pub fn slopes_with_argmax(&self, u: &[f64]) -> Vec<(f64, Option<(VertexId, f64)>)> {
        self.targets
            .iter()
            .zip(&self.neighbors)
            .map(|(&x, nb)| {
                let mut best = (0.0, None);
                for &(y, inv) in nb {
                    let s = (u[y] - u[x]).abs() * inv;
                    if best.1.is_none() || s > best.0 {
                        best = (s, Some((y, inv)));
                    }
                }
                best
            })
            .collect()
    }

    /// Slopes scattered into a full-length vector.
    pub fn slope_field(&self, u: &[f64], n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (&x, s) in self.targets.iter().zip(self.slopes(u)) {
            out[x] = s;
        }
        out
    }
}

fn check_len(space: &MetricMeasureSpace, field: &ScalarField) -> Result<()> {
    if field.len() != space.len() {
        return Err(Error::DimensionMismatch {
            expected: space.len(),
            got: field.len(),
        });
    }
    Ok(())
}

/// Max-slope gradient over the whole space:
/// `g(x) = max_{y ~ x} |u(y) - u(x)| / len(x, y)`.
pub fn max_slope_gradient(space: &MetricMeasureSpace, u: &ScalarField) -> Result<ScalarField> {
    max_slope_gradient_in(space, u, Region::All)
}

/// Max-slope gradient on the subgraph induced by `region`.
pub fn max_slope_gradient_in(
    space: &MetricMeasureSpace,
    u: &ScalarField,
    region: Region,
) -> Result<ScalarField> {
    check_len(space, u)?;
    let targets: Vec<_> = (0..space.len())
        .filter(|&v| region.contains(space.role(v)))
        .collect();
    let stencil = SlopeStencil::new(space, region, &targets);
    if let Some(v) = stencil.isolated() {
        return Err(Error::IsolatedVertex(space.id(v).to_string()));
    }
    Ok(ScalarField {
        values: stencil.slope_field(u.values(), space.len()),
        support: region.support(),
    })
}

/// Trapezoid line integral of `g` along a vertex path.
pub fn line_integral(space: &MetricMeasureSpace, g: &ScalarField, path: &[VertexId]) -> Result<f64> {
    check_len(space, g)?;
    if path.len() < 2 {
        return Err(Error::InvalidPath("paths need at least one edge".into()));
    }
    let mut total = 0.0;
    for w in path.windows(2) {
        let len = space.edge_length(w[0], w[1]).ok_or_else(|| {
            Error::InvalidPath(format!(
                "`{}` and `{}` are not adjacent",
                space.id(w[0]),
                space.id(w[1])
            ))
        })?;
        total += len * (g.get(w[0]) + g.get(w[1])) / 2.0;
    }
    Ok(total)
}

/// Absolute slack allowed in upper-gradient inequalities.
pub const UPPER_GRADIENT_TOL: f64 = 1e-12;

/// Whether `g` is an upper gradient of `u`: checked on every edge, then on
/// every simple path with at most `path_cap` edges.
pub fn is_upper_gradient(
    space: &MetricMeasureSpace,
    u: &ScalarField,
    g: &ScalarField,
    path_cap: usize,
) -> bool {
    if u.len() != space.len() || g.len() != space.len() {
        return false;
    }
    if g.values().iter().any(|&v| v < 0.0) {
        return false;
    }
    let edges_ok = space.edges().iter().all(|e| {
        (u.get(e.a) - u.get(e.b)).abs() <= e.length * (g.get(e.a) + g.get(e.b)) / 2.0 + UPPER_GRADIENT_TOL
    });
    if !edges_ok {
        return false;
    }
    let mut on_path = vec![false; space.len()];
    (0..space.len()).all(|start| {
        on_path[start] = true;
        let ok = paths_ok(space, u, g, start, start, 0.0, path_cap, &mut on_path);
        on_path[start] = false;
        ok
    })
}

#[allow(clippy::too_many_arguments)]
fn paths_ok(
    space: &MetricMeasureSpace,
    u: &ScalarField,
    g: &ScalarField,
    start: VertexId,
    at: VertexId,
    integral: f64,
    edges_left: usize,
    on_path: &mut [bool],
) -> bool {
    if edges_left == 0 {
        return true;
    }
    for &(next, len) in space.neighbors(at) {
        if on_path[next] {
            continue;
        }
        let total = integral + len * (g.get(at) + g.get(next)) / 2.0;
        if (u.get(start) - u.get(next)).abs() > total + UPPER_GRADIENT_TOL {
            return false;
        }
        on_path[next] = true;
        let ok = paths_ok(space, u, g, start, next, total, edges_left - 1, on_path);
        on_path[next] = false;
        if !ok {
            return false;
        }
    }
    true
}

/// Default edge cap for path enumeration.
pub const DEFAULT_PATH_CAP: usize = 12;

/// A finite family of nonconstant edge paths.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathFamily {
    pub paths: Vec<Vec<VertexId>>,
}

impl PathFamily {
    pub fn new(space: &MetricMeasureSpace, paths: Vec<Vec<VertexId>>) -> Result<Self> {
        for path in &paths {
            if path.len() < 2 {
                return Err(Error::InvalidPath("constant path".into()));
            }
            for w in path.windows(2) {
                if space.edge_length(w[0], w[1]).is_none() {
                    return Err(Error::InvalidPath(format!(
                        "`{}` and `{}` are not adjacent",
                        space.id(w[0]),
                        space.id(w[1])
                    )));
                }
            }
        }
        Ok(Self { paths })
    }

    /// Parse the `[[id, id, ...], ...]` JSON format.
    pub fn from_json(space: &MetricMeasureSpace, text: &str) -> Result<Self> {
        let raw: Vec<Vec<String>> = serde_json::from_str(text)?;
        let paths = raw
            .iter()
            .map(|p| p.iter().map(|id| space.vertex(id)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, paths)
    }

    pub fn to_json(&self, space: &MetricMeasureSpace) -> Result<String> {
        let raw: Vec<Vec<&str>> = self
            .paths
            .iter()
            .map(|p| p.iter().map(|&v| space.id(v)).collect())
            .collect();
        Ok(serde_json::to_string(&raw)?)
    }

    /// All simple paths with at most `cap` edges joining `from` to `to`.
    pub fn connecting(
        space: &MetricMeasureSpace,
        from: &[VertexId],
        to: &[VertexId],
        cap: usize,
    ) -> Self {
        let mut is_target = vec![false; space.len()];
        to.iter().for_each(|&v| is_target[v] = true);
        let mut paths = Vec::new();
        let mut on_path = vec![false; space.len()];
        for &s in from {
            let mut current = vec![s];
            on_path[s] = true;
            collect_paths(space, &is_target, cap, &mut current, &mut on_path, &mut paths);
            on_path[s] = false;
        }
        Self { paths }
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }
}

fn collect_paths(
    space: &MetricMeasureSpace,
    is_target: &[bool],
    cap: usize,
    current: &mut Vec<VertexId>,
    on_path: &mut [bool],
    out: &mut Vec<Vec<VertexId>>,
) {
    if current.len() > cap {
        return;
    }
    let at = *current.last().expect("path is never empty");
    for &(next, _) in space.neighbors(at) {
        if on_path[next] {
            continue;
        }
        current.push(next);
        if is_target[next] {
            out.push(current.clone());
        }
        on_path[next] = true;
        collect_paths(space, is_target, cap, current, on_path, out);
        on_path[next] = false;
        current.pop();
    }
}

fn check_exponent(p: f64, open_at_one: bool) -> Result<()> {
    let ok = p.is_finite() && if open_at_one { p > 1.0 } else { p >= 1.0 };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidExponent(p))
    }
}

/// The minimal vertex field with trapezoid-admissible edges:
/// minimize `sum g^p mu` subject to `len (g(x) + g(y)) / 2 >= |u(x) - u(y)|`.
pub fn minimal_weak_gradient(
    space: &MetricMeasureSpace,
    u: &ScalarField,
    p: f64,
) -> Result<ScalarField> {
    check_len(space, u)?;
    check_exponent(p, true)?;
    let mut program = PowerProgram::new(space.measures().to_vec(), p);
    for e in space.edges() {
        let jump = (u.get(e.a) - u.get(e.b)).abs();
        program.add_row(vec![(e.a, e.length / 2.0), (e.b, e.length / 2.0)], jump);
    }
    let solution = program.solve(1e-8)?;
    Ok(ScalarField {
        values: solution.x,
        support: Support::All,
    })
}

/// Relative duality gap at which [`p_modulus`] stops.
pub const MODULUS_TOL: f64 = 1e-12;

/// Discrete p-modulus: minimize `sum phi^p mu` over `phi >= 0` with
/// trapezoid line integral at least one on every path of the family.
pub fn p_modulus(space: &MetricMeasureSpace, family: &PathFamily, p: f64) -> Result<f64> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    check_exponent(p, false)?;
    let mut program = PowerProgram::new(space.measures().to_vec(), p);
    for path in &family.paths {
        let mut coeffs: Vec<(VertexId, f64)> = Vec::with_capacity(path.len());
        for w in path.windows(2) {
            let len = space
                .edge_length(w[0], w[1])
                .ok_or_else(|| Error::InvalidPath("path leaves the graph".into()))?;
            for v in [w[0], w[1]] {
                match coeffs.iter_mut().find(|(x, _)| *x == v) {
                    Some((_, c)) => *c += len / 2.0,
                    None => coeffs.push((v, len / 2.0)),
                }
            }
        }
        program.add_row(coeffs, 1.0);
    }
    Ok(program.solve(MODULUS_TOL)?.objective)
}

/// `||g_u||_{L^p(mu)} + ||u||_{L^p(mu)}` over the whole space.
pub fn newtonian_norm(space: &MetricMeasureSpace, u: &ScalarField, p: f64) -> Result<f64> {
    check_exponent(p, false)?;
    let g = max_slope_gradient(space, u)?;
    let all: Vec<_> = (0..space.len()).collect();
    Ok(weighted_norm(g.values(), space.measures(), &all, p)
        + weighted_norm(u.values(), space.measures(), &all, p))
}

/// Subtract the domain mean from every supported vertex.
pub fn mean_zero_project(space: &MetricMeasureSpace, u: &ScalarField) -> Result<ScalarField> {
    check_len(space, u)?;
    let mean = space.mean(u.values(), space.interior())?;
    Ok(ScalarField::from_fn(space, u.support(), |v| u.get(v) - mean))
}

/// Restriction to the boundary.
pub fn trace(space: &MetricMeasureSpace, u: &ScalarField) -> Result<ScalarField> {
    check_len(space, u)?;
    Ok(ScalarField::from_fn(space, Support::Boundary, |v| u.get(v)))
}

/// Conjugate exponent `q / (q - 1)` with the usual conventions at 1 and infinity.
pub fn conjugate_exponent(q: f64) -> f64 {
    if q == 1.0 {
        f64::INFINITY
    } else if q.is_infinite() {
        1.0
    } else {
        q / (q - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_space, EdgeSpec, SpaceFile, VertexSpec};

    fn line(values: &[(Role, f64)], lengths: &[f64]) -> MetricMeasureSpace {
        let vertices = values
            .iter()
            .enumerate()
            .map(|(i, &(role, mu))| VertexSpec {
                id: format!("v{i}"),
                mu,
                role,
                perimeter: None,
                f: None,
            })
            .collect();
        let edges = lengths
            .iter()
            .enumerate()
            .map(|(i, &length)| EdgeSpec {
                a: format!("v{i}"),
                b: format!("v{}", i + 1),
                length,
            })
            .collect();
        build_space(&SpaceFile { vertices, edges }).unwrap()
    }

    fn field(space: &MetricMeasureSpace, values: &[f64]) -> ScalarField {
        ScalarField::new(space, values.to_vec(), Support::All).unwrap()
    }

    #[test]
    fn line_integral_examples() {
        let s = line(&[(Role::Interior, 1.0), (Role::Boundary, 1.0)], &[2.0]);
        assert_eq!(line_integral(&s, &field(&s, &[0.0, 0.0]), &[0, 1]).unwrap(), 0.0);
        assert_eq!(line_integral(&s, &field(&s, &[1.0, 3.0]), &[0, 1]).unwrap(), 4.0);
        assert!(matches!(
            line_integral(&s, &field(&s, &[1.0, 3.0]), &[0]),
            Err(Error::InvalidPath(_))
        ));

        let s = line(
            &[(Role::Boundary, 1.0), (Role::Interior, 1.0), (Role::Interior, 1.0)],
            &[1.0, 1.0],
        );
        let g = field(&s, &[1.0, 1.0, 1.0]);
        assert_eq!(line_integral(&s, &g, &[0, 1, 2]).unwrap(), 2.0);
        assert!(line_integral(&s, &g, &[0, 2]).is_err());
    }

    #[test]
    fn upper_gradient_examples() {
        let s = line(&[(Role::Interior, 1.0), (Role::Boundary, 1.0)], &[1.0]);
        let zero = field(&s, &[0.0, 0.0]);
        assert!(is_upper_gradient(&s, &field(&s, &[2.0, 2.0]), &zero, 12));
        assert!(!is_upper_gradient(&s, &field(&s, &[0.0, 1.0]), &zero, 12));
        assert!(is_upper_gradient(&s, &field(&s, &[0.0, 1.0]), &field(&s, &[1.0, 1.0]), 12));
    }

    #[test]
    fn max_slope_examples() {
        let s = line(&[(Role::Interior, 1.0), (Role::Boundary, 1.0)], &[1.0]);
        let g = max_slope_gradient(&s, &field(&s, &[4.0, 4.0])).unwrap();
        assert_eq!(g.values(), &[0.0, 0.0]);
        let g = max_slope_gradient(&s, &field(&s, &[0.0, 1.0])).unwrap();
        assert_eq!(g.values(), &[1.0, 1.0]);

        let s = line(
            &[(Role::Boundary, 1.0), (Role::Interior, 1.0), (Role::Interior, 1.0)],
            &[1.0, 1.0],
        );
        let g = max_slope_gradient(&s, &field(&s, &[0.0, 1.0, 3.0])).unwrap();
        assert_eq!(g.values(), &[1.0, 2.0, 2.0]);
    }

    #[test]
    fn isolated_vertex_in_region() {
        // v1 has only a boundary neighbor, so it is isolated inside the domain.
        let s = line(&[(Role::Interior, 1.0), (Role::Boundary, 1.0)], &[1.0]);
        let u = field(&s, &[0.0, 1.0]);
        assert!(matches!(
            max_slope_gradient_in(&s, &u, Region::Domain),
            Err(Error::IsolatedVertex(_))
        ));
    }

    #[test]
    fn minimal_weak_gradient_two_vertices() {
        let s = line(&[(Role::Interior, 1.0), (Role::Boundary, 1.0)], &[1.0]);
        let g = minimal_weak_gradient(&s, &field(&s, &[0.0, 1.0]), 2.0).unwrap();
        assert!((g.get(0) - 1.0).abs() < 1e-6 && (g.get(1) - 1.0).abs() < 1e-6);
        let objective: f64 = g.values().iter().map(|v| v * v).sum();
        assert!((objective - 2.0).abs() < 1e-8);

        let g = minimal_weak_gradient(&s, &field(&s, &[3.0, 3.0]), 2.0).unwrap();
        assert_eq!(g.values(), &[0.0, 0.0]);
    }

    #[test]
    fn newtonian_norm_examples() {
        let s = line(&[(Role::Interior, 2.0), (Role::Boundary, 3.0)], &[1.0]);
        assert_eq!(newtonian_norm(&s, &field(&s, &[0.0, 0.0]), 2.0).unwrap(), 0.0);
        let one = newtonian_norm(&s, &field(&s, &[1.0, 1.0]), 2.0).unwrap();
        assert!((one - 5f64.sqrt()).abs() < 1e-14);
        let u = field(&s, &[0.5, -1.0]);
        let a = newtonian_norm(&s, &u, 3.0).unwrap();
        let b = newtonian_norm(&s, &u.scaled(2.0), 3.0).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-12);
    }

    #[test]
    fn mean_zero_examples() {
        let s = line(
            &[(Role::Interior, 1.0), (Role::Interior, 1.0), (Role::Boundary, 1.0)],
            &[1.0, 1.0],
        );
        let u = ScalarField::new(&s, vec![0.0, 2.0, 0.0], Support::Domain).unwrap();
        let z = mean_zero_project(&s, &u).unwrap();
        assert_eq!(z.values(), &[-1.0, 1.0, 0.0]);
        let zz = mean_zero_project(&s, &z).unwrap();
        assert_eq!(zz, z);
        let c = ScalarField::new(&s, vec![4.0, 4.0, 0.0], Support::Domain).unwrap();
        assert_eq!(mean_zero_project(&s, &c).unwrap().sup_norm(), 0.0);
    }

    #[test]
    fn trace_restricts() {
        let s = line(&[(Role::Interior, 1.0), (Role::Boundary, 1.0)], &[1.0]);
        let t = trace(&s, &field(&s, &[3.0, 7.0])).unwrap();
        assert_eq!(t.values(), &[0.0, 7.0]);
        assert_eq!(t.support(), Support::Boundary);
    }

    #[test]
    fn path_family_json() {
        let s = line(
            &[(Role::Boundary, 1.0), (Role::Interior, 1.0), (Role::Interior, 1.0)],
            &[1.0, 1.0],
        );
        let fam = PathFamily::from_json(&s, r#"[["v0","v1","v2"],["v1","v2"]]"#).unwrap();
        assert_eq!(fam.paths, vec![vec![0, 1, 2], vec![1, 2]]);
        assert!(PathFamily::from_json(&s, r#"[["v0","v2"]]"#).is_err());
        assert!(PathFamily::from_json(&s, r#"[["v0"]]"#).is_err());
        assert!(matches!(
            p_modulus(&s, &PathFamily::default(), 2.0),
            Err(Error::EmptyFamily)
        ));
        let all = PathFamily::connecting(&s, &[0], &[2], DEFAULT_PATH_CAP);
        assert_eq!(all.paths, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn conjugates() {
        assert_eq!(conjugate_exponent(2.0), 2.0);
        assert_eq!(conjugate_exponent(1.0), f64::INFINITY);
        assert_eq!(conjugate_exponent(f64::INFINITY), 1.0);
        assert!((conjugate_exponent(3.0) - 1.5).abs() < 1e-15);
    }
}
