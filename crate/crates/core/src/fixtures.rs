//! Small reference graphs and boundary conditions used across the tests,
//! the acceptance suite and the CLI fixture corpus.

use crate::boundary::BoundaryConditions;
use crate::gauge::DiagonalUnitary;
use crate::graph::MetricGraph;
use crate::linalg::{real_matrix, CMatrix};

/// Two vertices joined by one internal edge of length `a`, with one external
/// line at each vertex. External lines are listed first, so the canonical
/// coordinates are `(ψ₁(0), ψ₃(0), ψ₂(0), ψ₂(a))`.
pub fn two_lead_graph(a: f64) -> MetricGraph {
    MetricGraph::builder()
        .vertices(["left", "right"])
        .external("1", "left")
        .internal("2", "left", "right", a)
        .external("3", "right")
        .build()
        .expect("static graph")
}

/// A single vertex with one tadpole of length `length`.
pub fn ring_graph(length: f64) -> MetricGraph {
    MetricGraph::builder()
        .vertex("v")
        .internal("ring", "v", "v", length)
        .build()
        .expect("static graph")
}

/// Two vertices joined by three parallel edges, all oriented the same way.
pub fn theta_graph(lengths: [f64; 3]) -> MetricGraph {
    MetricGraph::builder()
        .vertices(["a", "b"])
        .internal("1", "a", "b", lengths[0])
        .internal("2", "a", "b", lengths[1])
        .internal("3", "a", "b", lengths[2])
        .build()
        .expect("static graph")
}

/// A single internal edge between two distinct vertices, no external lines.
pub fn interval_graph(length: f64) -> MetricGraph {
    MetricGraph::builder()
        .vertices(["a", "b"])
        .internal("1", "a", "b", length)
        .build()
        .expect("static graph")
}

/// Permutation from the ordering `(ψ₁(0), ψ₂(0), ψ₂(a), ψ₃(0))` used to write
/// the non-local example to canonical indices on [`two_lead_graph`].
pub const EXAMPLE_TO_CANONICAL: [usize; 4] = [0, 2, 3, 1];

/// The non-local example, written in the ordering `(ψ₁(0), ψ₂(0), ψ₂(a), ψ₃(0))`:
/// `ψ₁(0) = ψ₂(0)`, `ψ₂(a) = ψ₃(0)`, `ψ₂(a) + ψ₁′(0) + ψ₂′(0) = 0`,
/// `ψ₁(0) − ψ₂′(a) + ψ₃′(0) = 0`.
pub fn example_nonlocal_matrices() -> (CMatrix, CMatrix) {
    let a = real_matrix(&[
        &[1.0, -1.0, 0.0, 0.0],
        &[0.0, 0.0, 1.0, -1.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[1.0, 0.0, 0.0, 0.0],
    ]);
    let b = real_matrix(&[
        &[0.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 0.0],
        &[1.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 1.0, 1.0],
    ]);
    (a, b)
}

fn to_canonical(m: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(4, 4);
    for (j, &cj) in EXAMPLE_TO_CANONICAL.iter().enumerate() {
        out.set_column(cj, &m.column(j));
    }
    out
}

/// The non-local example in canonical coordinates of [`two_lead_graph`].
pub fn example_nonlocal_conditions() -> BoundaryConditions {
    let (a, b) = example_nonlocal_matrices();
    BoundaryConditions::new(to_canonical(&a), to_canonical(&b)).expect("static matrices")
}

/// `diag(e^{iφ₁}, e^{iφ₁}, e^{iφ₂}, e^{iφ₂})` in the example ordering, i.e.
/// phase `φ₁` on every coordinate of the left vertex and `φ₂` on the right.
pub fn example_unitary(phi1: f64, phi2: f64) -> DiagonalUnitary {
    let ordered = [phi1, phi1, phi2, phi2];
    let mut phases = [0.0; 4];
    for (j, &cj) in EXAMPLE_TO_CANONICAL.iter().enumerate() {
        phases[cj] = ordered[j];
    }
    DiagonalUnitary::new(phases.to_vec())
}
