//! Chain complex of the internal graph, fundamental cycle bases, and the flux
//! homomorphism `ρ : 𝖴 → Hom(H₁(𝒢,ℤ), S¹)`.

use std::collections::VecDeque;

use crate::boundary::{is_local, BoundaryConditions};
use crate::error::{Error, Result};
use crate::gauge::{isotropy_identity_component, DiagonalUnitary};
use crate::graph::MetricGraph;
use crate::linalg::Tolerances;
use crate::phase::Phase;

/// Integer coefficients over the internal edges, `c = Σ n_i σ_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChainVector(pub Vec<i64>);

impl ChainVector {
    pub fn zero(m: usize) -> Self {
        ChainVector(vec![0; m])
    }

    pub fn unit(m: usize, i: usize) -> Self {
        let mut v = vec![0; m];
        v[i] = 1;
        ChainVector(v)
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &ChainVector) -> ChainVector {
        ChainVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, s: i64) -> ChainVector {
        ChainVector(self.0.iter().map(|a| a * s).collect())
    }
}

fn check_len(c: &ChainVector, graph: &MetricGraph) -> Result<()> {
    if c.len() != graph.n_internal() {
        return Err(Error::DimensionMismatch {
            expected: graph.n_internal(),
            found: c.len(),
        });
    }
    Ok(())
}

/// `∂₁c = Σ n_i (σ_{v₊(i)} − σ_{v₋(i)})` as vertex coefficients.
pub fn boundary_op(c: &ChainVector, graph: &MetricGraph) -> Result<Vec<i64>> {
    check_len(c, graph)?;
    let mut out = vec![0; graph.n_vertices()];
    for (e, &n) in graph.internal_edges().iter().zip(&c.0) {
        out[e.terminal] += n;
        out[e.initial] -= n;
    }
    Ok(out)
}

/// `∂₀`: sum of vertex coefficients.
pub fn augmentation(vertex_chain: &[i64]) -> i64 {
    vertex_chain.iter().sum()
}

pub fn is_cycle(c: &ChainVector, graph: &MetricGraph) -> Result<bool> {
    Ok(boundary_op(c, graph)?.iter().all(|&x| x == 0))
}

/// Breadth-first spanning forest of the internal graph. Vertices and incident
/// edges are visited in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanningForest {
    /// `(edge, parent vertex)` for every non-root vertex.
    pub parent: Vec<Option<(usize, usize)>>,
    pub depth: Vec<usize>,
    /// Vertices in visiting order; a parent always precedes its children.
    pub order: Vec<usize>,
    pub roots: Vec<usize>,
    pub tree_edges: Vec<usize>,
    pub chords: Vec<usize>,
}

pub fn spanning_forest(graph: &MetricGraph) -> SpanningForest {
    let nv = graph.n_vertices();
    let mut incident = vec![Vec::new(); nv];
    for (i, e) in graph.internal_edges().iter().enumerate() {
        incident[e.initial].push(i);
        if e.terminal != e.initial {
            incident[e.terminal].push(i);
        }
    }
    let mut parent = vec![None; nv];
    let mut depth = vec![0; nv];
    let mut seen = vec![false; nv];
    let mut in_tree = vec![false; graph.n_internal()];
    let mut order = Vec::with_capacity(nv);
    let mut roots = Vec::new();
    for root in 0..nv {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        roots.push(root);
        order.push(root);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &i in &incident[v] {
                let e = &graph.internal_edges()[i];
                let w = if e.initial == v { e.terminal } else { e.initial };
                if !seen[w] {
                    seen[w] = true;
                    in_tree[i] = true;
                    parent[w] = Some((i, v));
                    depth[w] = depth[v] + 1;
                    order.push(w);
                    queue.push_back(w);
                }
            }
        }
    }
    let (tree_edges, chords) = (0..graph.n_internal()).partition(|&i| in_tree[i]);
    SpanningForest {
        parent,
        depth,
        order,
        roots,
        tree_edges,
        chords,
    }
}

/// Fundamental cycles of a spanning tree, one per chord, each oriented so that
/// its chord has coefficient `+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleBasis {
    pub cycles: Vec<ChainVector>,
    pub chords: Vec<usize>,
    pub tree_edges: Vec<usize>,
}

impl CycleBasis {
    /// `d = rank H₁(𝒢, ℤ)`.
    pub fn rank(&self) -> usize {
        self.cycles.len()
    }
}

pub fn cycle_basis(graph: &MetricGraph) -> Result<CycleBasis> {
    let forest = spanning_forest(graph);
    if forest.roots.len() != 1 {
        return Err(Error::InvalidGraph(format!(
            "disconnected ({} components)",
            forest.roots.len()
        )));
    }
    let m = graph.n_internal();
    let edges = graph.internal_edges();
    let cycles = forest
        .chords
        .iter()
        .map(|&chord| {
            let mut c = ChainVector::unit(m, chord);
            // close the loop: tree path from v₊(chord) back to v₋(chord)
            let mut up = edges[chord].terminal;
            let mut down = edges[chord].initial;
            while up != down {
                if forest.depth[up] >= forest.depth[down] {
                    // walk child → parent
                    let (i, p) = forest.parent[up].expect("non-root");
                    c.0[i] += if edges[i].initial == up { 1 } else { -1 };
                    up = p;
                } else {
                    // walk parent → child, recorded from the child side
                    let (i, p) = forest.parent[down].expect("non-root");
                    c.0[i] += if edges[i].initial == p { 1 } else { -1 };
                    down = p;
                }
            }
            c
        })
        .collect();
    Ok(CycleBasis {
        cycles,
        chords: forest.chords,
        tree_edges: forest.tree_edges,
    })
}

/// Betti numbers `(b₀, b₁)` of the internal graph.
pub fn betti_numbers(graph: &MetricGraph) -> (usize, usize) {
    let b0 = graph.components().len();
    let b1 = graph.n_internal() + b0 - graph.n_vertices();
    (b0, b1)
}

/// `Φ_𝒰(c) = ∏ exp{i n_i (φ_i⁺ − φ_i⁻)}`.
pub fn flux_map(u: &DiagonalUnitary, c: &ChainVector, graph: &MetricGraph) -> Result<Phase> {
    if !is_cycle(c, graph)? {
        return Err(Error::NotACycle);
    }
    if u.dim() != graph.boundary_dim() {
        return Err(Error::DimensionMismatch {
            expected: graph.boundary_dim(),
            found: u.dim(),
        });
    }
    let map = graph.boundary_coordinate_map();
    let total: f64 =
        c.0.iter()
            .enumerate()
            .filter(|(_, &n)| n != 0)
            .map(|(i, &n)| n as f64 * u.edge_gap(&map, i))
            .sum();
    Ok(Phase::from_angle(total))
}

pub fn fluxes(u: &DiagonalUnitary, basis: &CycleBasis, graph: &MetricGraph) -> Result<Vec<Phase>> {
    basis.cycles.iter().map(|c| flux_map(u, c, graph)).collect()
}

/// Target phases `μ_p` on the basis cycles, radians.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxAssignment(pub Vec<f64>);

/// A unitary with prescribed fluxes: each chord carries its target as the
/// gap `φ⁺ − φ⁻`, every other phase is zero.
pub fn realize_flux(
    graph: &MetricGraph,
    basis: &CycleBasis,
    target: &FluxAssignment,
) -> Result<DiagonalUnitary> {
    if target.0.len() != basis.rank() {
        return Err(Error::DimensionMismatch {
            expected: basis.rank(),
            found: target.0.len(),
        });
    }
    let map = graph.boundary_coordinate_map();
    let mut phases = vec![0.0; map.dim()];
    for (&chord, &mu) in basis.chords.iter().zip(&target.0) {
        phases[map.terminal_slot(chord)] = mu;
    }
    Ok(DiagonalUnitary::new(phases))
}

#[derive(Debug, Clone, PartialEq)]
pub enum CosetVerdict {
    Same,
    Different,
    /// Outside the regime where fluxes classify cosets; carries the reason.
    Undecidable(String),
}

/// Decides whether `u1` and `u2` lie in the same coset of `𝖴₀𝖶(A,B)`.
/// Only answers for local conditions whose isotropy group is `𝖶₀`.
pub fn same_coset(
    u1: &DiagonalUnitary,
    u2: &DiagonalUnitary,
    bc: &BoundaryConditions,
    graph: &MetricGraph,
    tol: &Tolerances,
) -> Result<CosetVerdict> {
    let map = graph.boundary_coordinate_map();
    bc.check_shape(&map)?;
    if !is_local(bc, &map, tol)? {
        return Ok(CosetVerdict::Undecidable(
            "boundary conditions are not local".into(),
        ));
    }
    let iso = isotropy_identity_component(bc, &map, tol)?;
    if !iso.contains_w0 || iso.dimension != graph.n_vertices() {
        return Ok(CosetVerdict::Undecidable(format!(
            "isotropy group has dimension {} (|V| = {}), not W0",
            iso.dimension,
            graph.n_vertices()
        )));
    }
    let basis = cycle_basis(graph)?;
    let f1 = fluxes(u1, &basis, graph)?;
    let f2 = fluxes(u2, &basis, graph)?;
    let same = f1.iter().zip(&f2).all(|(a, b)| a.approx_eq(*b, tol.eq));
    Ok(if same {
        CosetVerdict::Same
    } else {
        CosetVerdict::Different
    })
}
