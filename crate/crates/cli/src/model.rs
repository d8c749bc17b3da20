//! Model files: a graph, boundary conditions and optional potential and
//! unitary sections, as UTF-8 JSON.

use std::collections::BTreeMap;

use qwire_core::boundary::{self, BoundaryConditions};
use qwire_core::gauge::DiagonalUnitary;
use qwire_core::graph::MetricGraph;
use qwire_core::linalg::{c, CMatrix, Tolerances};
use qwire_core::potential::{Piece, VectorPotential};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub graph: GraphSpec,
    pub boundary_conditions: BcSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialSpec>,
    /// Phases in radians, canonical ordering.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitary: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub vertices: Vec<String>,
    #[serde(default)]
    pub internal_edges: Vec<InternalSpec>,
    #[serde(default)]
    pub external_edges: Vec<ExternalSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InternalSpec {
    pub id: String,
    pub from: String,
    pub to: String,
    pub length: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalSpec {
    pub id: String,
    pub vertex: String,
}

/// Complex entries are `[re, im]` pairs; matrices are lists of rows.
pub type MatrixSpec = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BcSpec {
    Matrices {
        #[serde(rename = "A")]
        a: MatrixSpec,
        #[serde(rename = "B")]
        b: MatrixSpec,
    },
    /// Delta couplings, one strength per vertex; omitted means all zero.
    Standard {
        #[serde(default)]
        strengths: Option<Vec<f64>>,
    },
    Dirichlet,
    Neumann,
}

/// Per-edge potential, keyed by edge id. An edge maps either to one number
/// (constant along the edge) or to `[length, value]` pieces.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PotentialSpec(pub BTreeMap<String, EdgePotential>);

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EdgePotential {
    Constant(f64),
    Pieces(Vec<[f64; 2]>),
}

/// The model with every section resolved against the graph.
pub struct Model {
    pub graph: MetricGraph,
    pub bc: BoundaryConditions,
    pub potential: Option<VectorPotential>,
    pub unitary: Option<DiagonalUnitary>,
    pub file: ModelFile,
}

pub fn parse(text: &str, origin: &str) -> Result<ModelFile, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let (line, column) = (inner.line(), inner.column());
        let msg = inner.to_string();
        let msg = msg
            .strip_suffix(&format!(" at line {line} column {column}"))
            .unwrap_or(&msg);
        CliError::Parse(format!("{origin}:{line}:{column}: at `{path}`: {msg}"))
    })
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

impl ModelFile {
    pub fn resolve(self) -> Result<Model, CliError> {
        let graph = self.build_graph()?;
        let bc = self.build_bc(&graph)?;
        let potential = self
            .potential
            .as_ref()
            .map(|p| build_potential(p, &graph))
            .transpose()?;
        let unitary = match &self.unitary {
            Some(phases) if phases.len() != graph.boundary_dim() => {
                return Err(invalid(format!(
                    "unitary: expected {} phases, found {}",
                    graph.boundary_dim(),
                    phases.len()
                )))
            }
            Some(phases) if phases.iter().any(|x| !x.is_finite()) => {
                return Err(invalid("unitary: phases must be finite"))
            }
            Some(phases) => Some(DiagonalUnitary::new(phases.clone())),
            None => None,
        };
        Ok(Model {
            graph,
            bc,
            potential,
            unitary,
            file: self,
        })
    }

    fn build_graph(&self) -> Result<MetricGraph, CliError> {
        let spec = &self.graph;
        let mut b = MetricGraph::builder().vertices(spec.vertices.iter().cloned());
        for e in &spec.internal_edges {
            b = b.internal(e.id.clone(), e.from.clone(), e.to.clone(), e.length);
        }
        for e in &spec.external_edges {
            b = b.external(e.id.clone(), e.vertex.clone());
        }
        let graph = b.build().map_err(|e| invalid(format!("graph: {e}")))?;
        graph
            .validate()
            .into_result()
            .map_err(|e| invalid(e.to_string()))?;
        Ok(graph)
    }

    fn build_bc(&self, graph: &MetricGraph) -> Result<BoundaryConditions, CliError> {
        let k = graph.boundary_dim();
        match &self.boundary_conditions {
            BcSpec::Matrices { a, b } => {
                let a = matrix(a, k, "A")?;
                let b = matrix(b, k, "B")?;
                BoundaryConditions::new(a, b).map_err(|e| invalid(format!("boundary_conditions: {e}")))
            }
            BcSpec::Standard { strengths } => {
                let s = strengths.clone().unwrap_or_else(|| vec![0.0; graph.n_vertices()]);
                boundary::standard_conditions(graph, &s)
                    .map_err(|e| invalid(format!("boundary_conditions.strengths: {e}")))
            }
            BcSpec::Dirichlet => Ok(boundary::dirichlet(graph)),
            BcSpec::Neumann => Ok(boundary::neumann(graph)),
        }
    }
}

fn matrix(rows: &MatrixSpec, k: usize, name: &str) -> Result<CMatrix, CliError> {
    if rows.len() != k || rows.iter().any(|r| r.len() != k) {
        return Err(invalid(format!(
            "boundary_conditions.{name}: expected a {k}x{k} matrix (n + 2m = {k})"
        )));
    }
    Ok(CMatrix::from_fn(k, k, |i, j| {
        let [re, im] = rows[i][j];
        c(re, im)
    }))
}

fn build_potential(spec: &PotentialSpec, graph: &MetricGraph) -> Result<VectorPotential, CliError> {
    for id in spec.0.keys() {
        if graph.internal_index(id).is_none() && graph.external_index(id).is_none() {
            return Err(invalid(format!("potential: unknown edge `{id}`")));
        }
    }
    let internal = graph
        .internal_edges()
        .iter()
        .map(|e| match spec.0.get(&e.id) {
            None => vec![Piece::new(e.length, 0.0)],
            Some(EdgePotential::Constant(v)) => vec![Piece::new(e.length, *v)],
            Some(EdgePotential::Pieces(p)) => p.iter().map(|&[l, v]| Piece::new(l, v)).collect(),
        })
        .collect();
    let external = graph
        .external_edges()
        .iter()
        .map(|e| match spec.0.get(&e.id) {
            None => Ok(vec![Piece::new(f64::INFINITY, 0.0)]),
            Some(EdgePotential::Constant(v)) => Ok(vec![Piece::new(f64::INFINITY, *v)]),
            Some(EdgePotential::Pieces(_)) => Err(invalid(format!(
                "potential: external edge `{}` takes a single value",
                e.id
            ))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    VectorPotential::new(graph, external, internal).map_err(|e| invalid(format!("potential: {e}")))
}

pub fn tolerances(rank: f64, eq: f64) -> Result<Tolerances, CliError> {
    Tolerances::new(rank, Tolerances::default().orth, eq).map_err(|e| CliError::Usage(e.to_string()))
}
