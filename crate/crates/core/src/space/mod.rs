//! Finite metric measure spaces.
//!
//! A space is a connected weighted graph whose vertices carry a positive
//! measure and a role: interior (the domain), boundary, or exterior. The
//! metric is the shortest-path distance induced by the edge lengths, and
//! every boundary vertex carries a perimeter weight which plays the role of
//! the perimeter measure of the domain.

mod constants;

pub use constants::{
    doubling_constant, poincare_ratio, poincare_samples, structural_constants, HypothesisReport,
    PoincareOptions, PoincareSample, RadiusPair,
};

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a vertex inside a [`MetricMeasureSpace`].
pub type VertexId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Interior,
    Boundary,
    Exterior,
}

/// On-disk description of a space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    pub vertices: Vec<VertexSpec>,
    pub edges: Vec<EdgeSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexSpec {
    pub id: String,
    pub mu: f64,
    pub role: Role,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perimeter: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub a: String,
    pub b: String,
    pub length: f64,
}

impl SpaceFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: VertexId,
    pub b: VertexId,
    pub length: f64,
}

/// A validated finite metric measure space with all-pairs distances.
#[derive(Debug, Clone)]
pub struct MetricMeasureSpace {
    ids: Vec<String>,
    index: HashMap<String, VertexId>,
    mu: Vec<f64>,
    roles: Vec<Role>,
    perimeter: Vec<f64>,
    boundary_data: Vec<f64>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(VertexId, f64)>>,
    dist: Vec<f64>,
    interior: Vec<VertexId>,
    boundary: Vec<VertexId>,
    closure: Vec<VertexId>,
}

/// Closed metric ball `{x : d(center, x) <= radius}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: VertexId,
    pub radius: f64,
    /// Sorted vertex indices.
    pub members: Vec<VertexId>,
}

impl Ball {
    pub fn contains(&self, v: VertexId) -> bool {
        self.members.binary_search(&v).is_ok()
    }
}

/// Validate a space description and compute its metric.
pub fn build_space(spec: &SpaceFile) -> Result<MetricMeasureSpace> {
    let n = spec.vertices.len();
    let mut index = HashMap::with_capacity(n);
    let mut ids = Vec::with_capacity(n);
    let mut mu = Vec::with_capacity(n);
    let mut roles = Vec::with_capacity(n);
    for (i, v) in spec.vertices.iter().enumerate() {
        if index.insert(v.id.clone(), i).is_some() {
            return Err(Error::DuplicateVertex(v.id.clone()));
        }
        if !(v.mu.is_finite() && v.mu > 0.0) {
            return Err(Error::NonpositiveWeight {
                what: "measure",
                at: v.id.clone(),
                value: v.mu,
            });
        }
        if v.role != Role::Boundary && (v.perimeter.is_some() || v.f.is_some()) {
            return Err(Error::InvalidSpace(format!(
                "vertex `{}` is not a boundary vertex but carries boundary data",
                v.id
            )));
        }
        ids.push(v.id.clone());
        mu.push(v.mu);
        roles.push(v.role);
    }

    let mut adjacency: Vec<Vec<(VertexId, f64)>> = vec![Vec::new(); n];
    let mut edges = Vec::with_capacity(spec.edges.len());
    for e in &spec.edges {
        let a = *index
            .get(&e.a)
            .ok_or_else(|| Error::UnknownVertex(e.a.clone()))?;
        let b = *index
            .get(&e.b)
            .ok_or_else(|| Error::UnknownVertex(e.b.clone()))?;
        if !(e.length.is_finite() && e.length > 0.0) {
            return Err(Error::NonpositiveWeight {
                what: "edge length",
                at: format!("{}-{}", e.a, e.b),
                value: e.length,
            });
        }
        if a == b {
            return Err(Error::InvalidSpace(format!("self-loop at `{}`", e.a)));
        }
        if adjacency[a].iter().any(|&(y, _)| y == b) {
            return Err(Error::InvalidSpace(format!(
                "duplicate edge `{}`-`{}`",
                e.a, e.b
            )));
        }
        adjacency[a].push((b, e.length));
        adjacency[b].push((a, e.length));
        edges.push(Edge {
            a,
            b,
            length: e.length,
        });
    }

    let interior: Vec<_> = (0..n).filter(|&i| roles[i] == Role::Interior).collect();
    let boundary: Vec<_> = (0..n).filter(|&i| roles[i] == Role::Boundary).collect();
    if interior.is_empty() {
        return Err(Error::EmptyDomain);
    }
    if boundary.is_empty() {
        return Err(Error::EmptyBoundary);
    }

    let dist = all_pairs_shortest_paths(&adjacency);
    if let Some(j) = (0..n).find(|&j| !dist[j].is_finite()) {
        return Err(Error::DisconnectedGraph(ids[j].clone()));
    }

    let mut perimeter = vec![0.0; n];
    let mut boundary_data = vec![0.0; n];
    for &y in &boundary {
        let derived: f64 = adjacency[y]
            .iter()
            .filter(|&&(x, _)| roles[x] == Role::Interior)
            .map(|&(x, len)| mu[x].min(mu[y]) / len)
            .sum();
        if derived == 0.0 {
            return Err(Error::DetachedBoundary(ids[y].clone()));
        }
        let spec_v = &spec.vertices[y];
        let value = spec_v.perimeter.unwrap_or(derived);
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::NonpositiveWeight {
                what: "perimeter",
                at: ids[y].clone(),
                value,
            });
        }
        perimeter[y] = value;
        if let Some(f) = spec_v.f {
            if !f.is_finite() {
                return Err(Error::InvalidSpace(format!(
                    "boundary data at `{}` is not finite",
                    ids[y]
                )));
            }
            boundary_data[y] = f;
        }
    }

    let closure = (0..n).filter(|&i| roles[i] != Role::Exterior).collect();
    Ok(MetricMeasureSpace {
        ids,
        index,
        mu,
        roles,
        perimeter,
        boundary_data,
        edges,
        adjacency,
        dist,
        interior,
        boundary,
        closure,
    })
}

#[derive(Copy, Clone, PartialEq)]
struct QueueItem {
    dist: f64,
    vertex: VertexId,
}

impl Eq for QueueItem {}

impl Ord for QueueItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for QueueItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra(adjacency: &[Vec<(VertexId, f64)>], source: VertexId, out: &mut [f64]) {
    out.fill(f64::INFINITY);
    out[source] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(QueueItem {
        dist: 0.0,
        vertex: source,
    });
    while let Some(QueueItem { dist, vertex }) = heap.pop() {
        if dist > out[vertex] {
            continue;
        }
        for &(next, len) in &adjacency[vertex] {
            let candidate = dist + len;
            if candidate < out[next] {
                out[next] = candidate;
                heap.push(QueueItem {
                    dist: candidate,
                    vertex: next,
                });
            }
        }
    }
}

fn all_pairs_shortest_paths(adjacency: &[Vec<(VertexId, f64)>]) -> Vec<f64> {
    let n = adjacency.len();
    let mut dist = vec![0.0; n * n];
    for (source, row) in dist.chunks_mut(n.max(1)).enumerate().take(n) {
        dijkstra(adjacency, source, row);
    }
    // Both directions agree up to summation order; keep the metric exactly symmetric.
    for i in 0..n {
        for j in (i + 1)..n {
            let d = dist[i * n + j].min(dist[j * n + i]);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    dist
}

impl MetricMeasureSpace {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, v: VertexId) -> &str {
        &self.ids[v]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn vertex(&self, id: &str) -> Result<VertexId> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn mu(&self, v: VertexId) -> f64 {
        self.mu[v]
    }

    pub fn measures(&self) -> &[f64] {
        &self.mu
    }

    pub fn role(&self, v: VertexId) -> Role {
        self.roles[v]
    }

    pub fn is_interior(&self, v: VertexId) -> bool {
        self.roles[v] == Role::Interior
    }

    pub fn is_boundary(&self, v: VertexId) -> bool {
        self.roles[v] == Role::Boundary
    }

    /// Perimeter weight of a boundary vertex (zero elsewhere).
    pub fn perimeter_weight(&self, v: VertexId) -> f64 {
        self.perimeter[v]
    }

    /// Boundary data carried by the space file (zero where absent).
    pub fn boundary_data(&self) -> &[f64] {
        &self.boundary_data
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, f64)] {
        &self.adjacency[v]
    }

    pub fn edge_length(&self, a: VertexId, b: VertexId) -> Option<f64> {
        self.adjacency[a]
            .iter()
            .find(|&&(y, _)| y == b)
            .map(|&(_, len)| len)
    }

    pub fn dist(&self, a: VertexId, b: VertexId) -> f64 {
        self.dist[a * self.len() + b]
    }

    pub fn interior(&self) -> &[VertexId] {
        &self.interior
    }

    pub fn boundary(&self) -> &[VertexId] {
        &self.boundary
    }

    /// Interior and boundary vertices together, in index order.
    pub fn closure(&self) -> &[VertexId] {
        &self.closure
    }

    pub fn measure(&self, set: &[VertexId]) -> f64 {
        set.iter().map(|&v| self.mu[v]).sum()
    }

    pub fn domain_measure(&self) -> f64 {
        self.measure(&self.interior)
    }

    pub fn boundary_perimeter(&self, set: &[VertexId]) -> f64 {
        set.iter().map(|&v| self.perimeter[v]).sum()
    }

    pub fn ball(&self, center: VertexId, radius: f64) -> Ball {
        let row = &self.dist[center * self.len()..(center + 1) * self.len()];
        let members = row
            .iter()
            .enumerate()
            .filter(|&(_, &d)| d <= radius)
            .map(|(v, _)| v)
            .collect();
        Ball {
            center,
            radius,
            members,
        }
    }

    /// Distance from `x` to the nearest member of `set` (infinite for an empty set).
    pub fn dist_to_set(&self, x: VertexId, set: &[VertexId]) -> f64 {
        set.iter()
            .map(|&z| self.dist(x, z))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn diameter_of(&self, set: &[VertexId]) -> f64 {
        let mut diam: f64 = 0.0;
        for &a in set {
            for &b in set {
                diam = diam.max(self.dist(a, b));
            }
        }
        diam
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    pub fn domain_diameter(&self) -> f64 {
        self.diameter_of(&self.interior)
    }

    /// `mu`-weighted average of `values` over `set`.
    pub fn mean(&self, values: &[f64], set: &[VertexId]) -> Result<f64> {
        let m = self.measure(set);
        if !(m > 0.0) {
            return Err(Error::EmptySet);
        }
        Ok(set.iter().map(|&v| values[v] * self.mu[v]).sum::<f64>() / m)
    }

    /// Discrete perimeter of `e` inside `u`: total weight `min(mu)/length`
    /// of the edges of `u` that cross from `e` to its complement.
    pub fn perimeter(&self, e: &[VertexId], u: &[VertexId]) -> f64 {
        let n = self.len();
        let mut in_e = vec![false; n];
        let mut in_u = vec![false; n];
        e.iter().for_each(|&v| in_e[v] = true);
        u.iter().for_each(|&v| in_u[v] = true);
        self.edges
            .iter()
            .filter(|edge| in_u[edge.a] && in_u[edge.b] && in_e[edge.a] != in_e[edge.b])
            .map(|edge| self.mu[edge.a].min(self.mu[edge.b]) / edge.length)
            .sum()
    }

    /// Smallest edge length.
    pub fn min_edge_length(&self) -> f64 {
        self.edges
            .iter()
            .map(|e| e.length)
            .fold(f64::INFINITY, f64::min)
    }

    /// Round-trip back to the file representation (perimeters written explicitly).
    pub fn to_file(&self) -> SpaceFile {
        let vertices = (0..self.len())
            .map(|v| VertexSpec {
                id: self.ids[v].clone(),
                mu: self.mu[v],
                role: self.roles[v],
                perimeter: self.is_boundary(v).then_some(self.perimeter[v]),
                f: (self.is_boundary(v) && self.boundary_data[v] != 0.0)
                    .then_some(self.boundary_data[v]),
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| EdgeSpec {
                a: self.ids[e.a].clone(),
                b: self.ids[e.b].clone(),
                length: e.length,
            })
            .collect();
        SpaceFile { vertices, edges }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vertex(id: &str, role: Role) -> VertexSpec {
        VertexSpec {
            id: id.into(),
            mu: 1.0,
            role,
            perimeter: None,
            f: None,
        }
    }

    fn edge(a: &str, b: &str, length: f64) -> EdgeSpec {
        EdgeSpec {
            a: a.into(),
            b: b.into(),
            length,
        }
    }

    fn unit_path(n: usize) -> MetricMeasureSpace {
        let mut vertices: Vec<_> = (0..n)
            .map(|i| vertex(&format!("v{i}"), Role::Interior))
            .collect();
        vertices[0].role = Role::Boundary;
        let edges = (1..n)
            .map(|i| edge(&format!("v{}", i - 1), &format!("v{i}"), 1.0))
            .collect();
        build_space(&SpaceFile { vertices, edges }).unwrap()
    }

    #[test]
    fn single_edge_space() {
        let spec = SpaceFile {
            vertices: vec![vertex("a", Role::Interior), {
                let mut b = vertex("b", Role::Boundary);
                b.perimeter = Some(1.0);
                b
            }],
            edges: vec![edge("a", "b", 1.0)],
        };
        let space = build_space(&spec).unwrap();
        assert_eq!(space.dist(0, 1), 1.0);
        assert_eq!(space.perimeter_weight(1), 1.0);
    }

    #[test]
    fn rejects_zero_length_edge() {
        let spec = SpaceFile {
            vertices: vec![vertex("a", Role::Interior), vertex("b", Role::Boundary)],
            edges: vec![edge("a", "b", 0.0)],
        };
        assert!(matches!(
            build_space(&spec),
            Err(Error::NonpositiveWeight { .. })
        ));
    }

    #[test]
    fn rejects_structural_defects() {
        let no_boundary = SpaceFile {
            vertices: vec![vertex("a", Role::Interior), vertex("b", Role::Interior)],
            edges: vec![edge("a", "b", 1.0)],
        };
        assert!(matches!(build_space(&no_boundary), Err(Error::EmptyBoundary)));

        let no_domain = SpaceFile {
            vertices: vec![vertex("a", Role::Exterior), vertex("b", Role::Boundary)],
            edges: vec![edge("a", "b", 1.0)],
        };
        assert!(matches!(build_space(&no_domain), Err(Error::EmptyDomain)));

        let disconnected = SpaceFile {
            vertices: vec![
                vertex("a", Role::Interior),
                vertex("b", Role::Boundary),
                vertex("c", Role::Exterior),
            ],
            edges: vec![edge("a", "b", 1.0)],
        };
        assert!(matches!(
            build_space(&disconnected),
            Err(Error::DisconnectedGraph(_))
        ));

        let detached = SpaceFile {
            vertices: vec![
                vertex("a", Role::Interior),
                vertex("b", Role::Boundary),
                vertex("c", Role::Boundary),
            ],
            edges: vec![edge("a", "b", 1.0), edge("b", "c", 1.0)],
        };
        assert!(matches!(
            build_space(&detached),
            Err(Error::DetachedBoundary(_))
        ));

        let mut bad_mu = vertex("a", Role::Interior);
        bad_mu.mu = -1.0;
        let negative = SpaceFile {
            vertices: vec![bad_mu, vertex("b", Role::Boundary)],
            edges: vec![edge("a", "b", 1.0)],
        };
        assert!(matches!(
            build_space(&negative),
            Err(Error::NonpositiveWeight { .. })
        ));
    }

    #[test]
    fn loader_rejects_unknown_fields() {
        let text = r#"{"vertices":[{"id":"a","mu":1,"role":"interior","colour":3}],"edges":[]}"#;
        assert!(SpaceFile::from_json(text).is_err());
        let text = r#"{"vertices":[],"edges":[],"extra":1}"#;
        assert!(SpaceFile::from_json(text).is_err());
    }

    #[test]
    fn balls_on_unit_path() {
        let space = unit_path(5);
        assert_eq!(space.ball(2, 0.0).members, vec![2]);
        assert_eq!(space.ball(2, 1.0).members, vec![1, 2, 3]);
        assert_eq!(space.ball(2, space.diameter()).members.len(), 5);
        assert!(space.ball(2, 1.0).contains(2));
    }

    #[test]
    fn mean_formula() {
        let space = unit_path(3);
        assert_eq!(space.mean(&[5.0, 5.0, 5.0], &[0, 2]).unwrap(), 5.0);
        assert!(matches!(space.mean(&[1.0; 3], &[]), Err(Error::EmptySet)));
    }

    #[test]
    fn weighted_mean() {
        let spec = SpaceFile {
            vertices: vec![
                vertex("a", Role::Interior),
                VertexSpec {
                    mu: 3.0,
                    ..vertex("b", Role::Boundary)
                },
            ],
            edges: vec![edge("a", "b", 1.0)],
        };
        let space = build_space(&spec).unwrap();
        assert!((space.mean(&[0.0, 1.0], &[0, 1]).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn empty_perimeter_is_zero() {
        let space = unit_path(4);
        let all: Vec<_> = (0..4).collect();
        assert_eq!(space.perimeter(&[], &all), 0.0);
        assert_eq!(space.perimeter(&[1], &all), 2.0);
    }
}
