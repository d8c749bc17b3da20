#![allow(dead_code)]

use nalgebra::DMatrix;
use qwire_core::boundary::BoundaryConditions;
use qwire_core::gauge::DiagonalUnitary;
use qwire_core::graph::MetricGraph;
use qwire_core::linalg::{c, CMatrix, C64};
use qwire_core::potential::{Piece, VectorPotential};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.random_range(f64::EPSILON..1.0);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

pub fn random_complex(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| c(gaussian(rng), gaussian(rng)))
}

pub fn random_unitary(rng: &mut impl Rng, k: usize) -> CMatrix {
    random_complex(rng, k, k).qr().q()
}

/// Random matrix of rank `r`.
pub fn random_rank(rng: &mut impl Rng, k: usize, r: usize) -> CMatrix {
    random_complex(rng, k, r) * random_complex(rng, r, k)
}

pub fn random_angle(rng: &mut impl Rng) -> f64 {
    rng.random_range(-PI..PI)
}

pub fn random_phases(rng: &mut impl Rng, k: usize) -> DiagonalUnitary {
    DiagonalUnitary::new((0..k).map(|_| random_angle(rng)).collect())
}

/// Self-adjoint pair `(U − I, i(U + I))` with `U` unitary. Eigenvalues of `U`
/// are drawn from `{1, −1, random}` so that kernels of both matrices occur.
pub fn random_self_adjoint_block(rng: &mut impl Rng, d: usize) -> (CMatrix, CMatrix) {
    let v = random_unitary(rng, d);
    let eig: Vec<C64> = (0..d)
        .map(|_| match rng.random_range(0..3) {
            0 => c(1.0, 0.0),
            1 => c(-1.0, 0.0),
            _ => C64::from_polar(1.0, random_angle(rng)),
        })
        .collect();
    let diag = CMatrix::from_fn(d, d, |i, j| if i == j { eig[i] } else { c(0.0, 0.0) });
    let u = &v * diag * v.adjoint();
    let id = CMatrix::identity(d, d);
    (&u - &id, (&u + &id) * c(0.0, 1.0))
}

/// Random invertible matrix with condition number bounded by construction.
pub fn random_invertible(rng: &mut impl Rng, k: usize) -> CMatrix {
    let u = random_unitary(rng, k);
    let w = random_unitary(rng, k);
    let s = CMatrix::from_fn(k, k, |i, j| {
        if i == j {
            c(rng.random_range(0.5..2.0), 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    u * s * w
}

/// Block-diagonal self-adjoint pair over a random partition of the
/// coordinates, premultiplied by a random invertible matrix. Returns the
/// pair together with the partition.
pub fn random_block_conditions(rng: &mut impl Rng, k: usize) -> (BoundaryConditions, Vec<Vec<usize>>) {
    let mut idx: Vec<usize> = (0..k).collect();
    idx.shuffle(rng);
    let mut groups = Vec::new();
    let mut rest = &idx[..];
    while !rest.is_empty() {
        let size = rng.random_range(1..=rest.len().min(3));
        groups.push(rest[..size].to_vec());
        rest = &rest[size..];
    }
    let mut a = CMatrix::zeros(k, k);
    let mut b = CMatrix::zeros(k, k);
    for g in &groups {
        let (ga, gb) = random_self_adjoint_block(rng, g.len());
        for (r, &row) in g.iter().enumerate() {
            for (s, &col) in g.iter().enumerate() {
                a[(row, col)] = ga[(r, s)];
                b[(row, col)] = gb[(r, s)];
            }
        }
    }
    let cm = random_invertible(rng, k);
    let bc = BoundaryConditions::new(&cm * a, &cm * b).unwrap();
    (bc, groups)
}

/// Self-adjoint conditions built from independent random blocks on each
/// vertex subspace, premultiplied by a random invertible matrix.
pub fn random_local_conditions(rng: &mut impl Rng, graph: &MetricGraph) -> BoundaryConditions {
    let map = graph.boundary_coordinate_map();
    let k = map.dim();
    let mut a = CMatrix::zeros(k, k);
    let mut b = CMatrix::zeros(k, k);
    for slots in map.all_vertex_slots() {
        let (ga, gb) = random_self_adjoint_block(rng, slots.len());
        for (r, &row) in slots.iter().enumerate() {
            for (s, &col) in slots.iter().enumerate() {
                a[(row, col)] = ga[(r, s)];
                b[(row, col)] = gb[(r, s)];
            }
        }
    }
    let cm = random_invertible(rng, k);
    BoundaryConditions::new(&cm * a, &cm * b).unwrap()
}

pub struct GraphShape {
    pub max_vertices: usize,
    pub max_internal: usize,
    pub max_external: usize,
}

pub const SMALL: GraphShape = GraphShape {
    max_vertices: 6,
    max_internal: 8,
    max_external: 3,
};

pub const COMPACT: GraphShape = GraphShape {
    max_vertices: 4,
    max_internal: 5,
    max_external: 0,
};

/// Connected multigraph: a random spanning tree plus extra edges, which may
/// be tadpoles or parallel to existing ones. Orientations are random.
pub fn random_connected_graph(rng: &mut impl Rng, shape: &GraphShape) -> MetricGraph {
    let nv = rng.random_range(1..=shape.max_vertices);
    let min_m = (nv - 1).max(1);
    let m = rng.random_range(min_m..=shape.max_internal.max(min_m));
    let mut edges = Vec::new();
    for v in 1..nv {
        let p = rng.random_range(0..v);
        edges.push(if rng.random() { (p, v) } else { (v, p) });
    }
    while edges.len() < m {
        let kind = rng.random_range(0..4);
        let e = match kind {
            0 => {
                let v = rng.random_range(0..nv);
                (v, v)
            }
            1 if !edges.is_empty() => *edges.choose(rng).unwrap(),
            _ => (rng.random_range(0..nv), rng.random_range(0..nv)),
        };
        edges.push(e);
    }
    edges.shuffle(rng);
    let n = rng.random_range(0..=shape.max_external);
    build_graph(rng, nv, &edges, n)
}

pub fn random_tree(rng: &mut impl Rng, max_vertices: usize, max_external: usize) -> MetricGraph {
    let nv = rng.random_range(2..=max_vertices);
    let mut edges = Vec::new();
    for v in 1..nv {
        let p = rng.random_range(0..v);
        edges.push(if rng.random() { (p, v) } else { (v, p) });
    }
    edges.shuffle(rng);
    let n = rng.random_range(0..=max_external);
    build_graph(rng, nv, &edges, n)
}

fn build_graph(rng: &mut impl Rng, nv: usize, edges: &[(usize, usize)], n_external: usize) -> MetricGraph {
    let mut b = MetricGraph::builder().vertices((0..nv).map(|v| format!("v{v}")));
    for (i, &(s, t)) in edges.iter().enumerate() {
        b = b.internal(
            format!("i{i}"),
            format!("v{s}"),
            format!("v{t}"),
            rng.random_range(0.5..2.0),
        );
    }
    for e in 0..n_external {
        b = b.external(format!("e{e}"), format!("v{}", rng.random_range(0..nv)));
    }
    b.build().unwrap()
}

/// Piecewise-constant potential with one to three pieces per internal edge.
pub fn random_potential(rng: &mut impl Rng, graph: &MetricGraph) -> VectorPotential {
    let internal = graph
        .internal_edges()
        .iter()
        .map(|e| {
            let n = rng.random_range(1..=3);
            let mut cuts: Vec<f64> = (0..n - 1).map(|_| rng.random_range(0.1..0.9)).collect();
            cuts.sort_by(f64::total_cmp);
            cuts.insert(0, 0.0);
            cuts.push(1.0);
            cuts.windows(2)
                .map(|w| Piece::new((w[1] - w[0]) * e.length, rng.random_range(-2.0..2.0)))
                .collect()
        })
        .collect();
    let external = (0..graph.n_external())
        .map(|_| vec![Piece::new(f64::INFINITY, rng.random_range(-2.0..2.0))])
        .collect();
    VectorPotential::new(graph, external, internal).unwrap()
}

pub fn real_rank(m: &DMatrix<f64>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = qwire_core::svd::svd(m).singular_values;
    let max = sv.max();
    sv.iter().filter(|&&s| s > 1e-10 * max).count()
}
