//! Finite metric graphs with internal edges (finite directed intervals) and
//! external lines (half-lines), plus the canonical ordering of boundary
//! coordinates.
//!
//! A boundary vector `z ∈ ℂ^k`, `k = n + 2m`, is laid out as
//! `({z_e}_{e∈ℰ}, {z_i^(−)}_{i∈ℐ}, {z_i^(+)}_{i∈ℐ})`: the value at `x = 0` of
//! every external line, then the initial endpoint of every internal edge, then
//! its terminal endpoint. Edges keep their input order.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct InternalEdge {
    pub id: String,
    /// Vertex at `x = 0`.
    pub initial: usize,
    /// Vertex at `x = length`.
    pub terminal: usize,
    pub length: f64,
}

impl InternalEdge {
    pub fn is_tadpole(&self) -> bool {
        self.initial == self.terminal
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExternalEdge {
    pub id: String,
    pub vertex: usize,
}

/// A metric graph. Vertices and edges are referred to by index; the string
/// ids are kept for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    vertices: Vec<String>,
    internal: Vec<InternalEdge>,
    external: Vec<ExternalEdge>,
}

#[derive(Debug, Default, Clone)]
pub struct GraphBuilder {
    vertices: Vec<String>,
    internal: Vec<(String, String, String, f64)>,
    external: Vec<(String, String)>,
}

impl GraphBuilder {
    pub fn vertex(mut self, id: impl Into<String>) -> Self {
        self.vertices.push(id.into());
        self
    }

    pub fn vertices<I, S>(mut self, ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.vertices.extend(ids.into_iter().map(Into::into));
        self
    }

    pub fn internal(
        mut self,
        id: impl Into<String>,
        initial: impl Into<String>,
        terminal: impl Into<String>,
        length: f64,
    ) -> Self {
        self.internal
            .push((id.into(), initial.into(), terminal.into(), length));
        self
    }

    pub fn external(mut self, id: impl Into<String>, vertex: impl Into<String>) -> Self {
        self.external.push((id.into(), vertex.into()));
        self
    }

    /// Resolves vertex references. Structural assumptions (connectivity,
    /// positive lengths, ...) are left to [`MetricGraph::validate`].
    pub fn build(self) -> Result<MetricGraph> {
        let mut index = HashMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(Error::DuplicateId(v.clone()));
            }
        }
        let lookup = |id: &str| {
            index
                .get(id)
                .copied()
                .ok_or_else(|| Error::UnknownVertex(id.to_string()))
        };

        let mut edge_ids = HashSet::new();
        let mut internal = Vec::with_capacity(self.internal.len());
        for (id, from, to, length) in &self.internal {
            if !edge_ids.insert(id.clone()) {
                return Err(Error::DuplicateId(id.clone()));
            }
            internal.push(InternalEdge {
                id: id.clone(),
                initial: lookup(from)?,
                terminal: lookup(to)?,
                length: *length,
            });
        }
        let mut external = Vec::with_capacity(self.external.len());
        for (id, v) in &self.external {
            if !edge_ids.insert(id.clone()) {
                return Err(Error::DuplicateId(id.clone()));
            }
            external.push(ExternalEdge {
                id: id.clone(),
                vertex: lookup(v)?,
            });
        }
        Ok(MetricGraph {
            vertices: self.vertices,
            internal,
            external,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoEdges,
    IsolatedVertex(String),
    BadLength { edge: String, length: f64 },
    Disconnected { components: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoEdges => write!(f, "graph has no edges"),
            Violation::IsolatedVertex(v) => write!(f, "vertex `{v}` has degree 0"),
            Violation::BadLength { edge, length } => {
                write!(f, "edge `{edge}` has non-positive or non-finite length {length}")
            }
            Violation::Disconnected { components } => {
                write!(f, "disconnected ({components} components)")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            let msg = self
                .violations
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; ");
            Err(Error::InvalidGraph(msg))
        }
    }
}

impl MetricGraph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::default()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn internal_edges(&self) -> &[InternalEdge] {
        &self.internal
    }

    pub fn external_edges(&self) -> &[ExternalEdge] {
        &self.external
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// `n = |ℰ|`
    pub fn n_external(&self) -> usize {
        self.external.len()
    }

    /// `m = |ℐ|`
    pub fn n_internal(&self) -> usize {
        self.internal.len()
    }

    /// Number of boundary coordinates, `n + 2m`.
    pub fn boundary_dim(&self) -> usize {
        self.n_external() + 2 * self.n_internal()
    }

    pub fn is_compact(&self) -> bool {
        self.external.is_empty()
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == id)
    }

    pub fn internal_index(&self, id: &str) -> Option<usize> {
        self.internal.iter().position(|e| e.id == id)
    }

    pub fn external_index(&self, id: &str) -> Option<usize> {
        self.external.iter().position(|e| e.id == id)
    }

    /// Degree with tadpoles counted twice.
    pub fn degree(&self, v: usize) -> usize {
        let ext = self.external.iter().filter(|e| e.vertex == v).count();
        let int: usize = self
            .internal
            .iter()
            .map(|e| usize::from(e.initial == v) + usize::from(e.terminal == v))
            .sum();
        ext + int
    }

    /// Connected components of the vertex set. External lines never join two
    /// vertices, so this is also the component structure of the internal graph.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let nv = self.n_vertices();
        let mut adj = vec![Vec::new(); nv];
        for e in &self.internal {
            adj[e.initial].push(e.terminal);
            adj[e.terminal].push(e.initial);
        }
        let mut seen = vec![false; nv];
        let mut out = Vec::new();
        for start in 0..nv {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.internal.is_empty() && self.external.is_empty() {
            violations.push(Violation::NoEdges);
        }
        for e in &self.internal {
            if !(e.length.is_finite() && e.length > 0.0) {
                violations.push(Violation::BadLength {
                    edge: e.id.clone(),
                    length: e.length,
                });
            }
        }
        for (v, id) in self.vertices.iter().enumerate() {
            if self.degree(v) == 0 {
                violations.push(Violation::IsolatedVertex(id.clone()));
            }
        }
        let components = self.components().len();
        if components > 1 {
            violations.push(Violation::Disconnected { components });
        }
        ValidationReport { violations }
    }

    pub fn boundary_coordinate_map(&self) -> BoundaryCoordinateMap {
        BoundaryCoordinateMap::new(self)
    }
}

/// Which endpoint a boundary coordinate belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    /// `x = 0` on an external line.
    External(usize),
    /// `x = 0` on an internal edge.
    Initial(usize),
    /// `x = a_i` on an internal edge.
    Terminal(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub endpoint: Endpoint,
    pub vertex: usize,
}

/// Canonical ordering of `ℂ^{n+2m}` and its split into per-vertex subspaces
/// `ℒ_v`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCoordinateMap {
    n: usize,
    m: usize,
    slots: Vec<Slot>,
    vertex_slots: Vec<Vec<usize>>,
}

impl BoundaryCoordinateMap {
    fn new(graph: &MetricGraph) -> Self {
        let n = graph.n_external();
        let m = graph.n_internal();
        let mut slots = Vec::with_capacity(n + 2 * m);
        slots.extend(graph.external.iter().enumerate().map(|(e, x)| Slot {
            endpoint: Endpoint::External(e),
            vertex: x.vertex,
        }));
        slots.extend(graph.internal.iter().enumerate().map(|(i, x)| Slot {
            endpoint: Endpoint::Initial(i),
            vertex: x.initial,
        }));
        slots.extend(graph.internal.iter().enumerate().map(|(i, x)| Slot {
            endpoint: Endpoint::Terminal(i),
            vertex: x.terminal,
        }));
        let mut vertex_slots = vec![Vec::new(); graph.n_vertices()];
        for (j, s) in slots.iter().enumerate() {
            vertex_slots[s.vertex].push(j);
        }
        Self {
            n,
            m,
            slots,
            vertex_slots,
        }
    }

    pub fn dim(&self) -> usize {
        self.slots.len()
    }

    pub fn n_external(&self) -> usize {
        self.n
    }

    pub fn n_internal(&self) -> usize {
        self.m
    }

    pub fn n_vertices(&self) -> usize {
        self.vertex_slots.len()
    }

    pub fn external_slot(&self, e: usize) -> usize {
        e
    }

    pub fn initial_slot(&self, i: usize) -> usize {
        self.n + i
    }

    pub fn terminal_slot(&self, i: usize) -> usize {
        self.n + self.m + i
    }

    pub fn slot(&self, j: usize) -> Slot {
        self.slots[j]
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    /// Indices spanning `ℒ_v`, ascending.
    pub fn vertex_slots(&self, v: usize) -> &[usize] {
        &self.vertex_slots[v]
    }

    pub fn all_vertex_slots(&self) -> &[Vec<usize>] {
        &self.vertex_slots
    }
}
