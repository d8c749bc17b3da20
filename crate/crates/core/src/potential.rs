//! Piecewise-constant magnetic vector potentials and their gauge data.

use crate::boundary::BoundaryConditions;
use crate::error::{Error, Result};
use crate::gauge::{factorize_u0w0, DiagonalUnitary, Factorization};
use crate::graph::MetricGraph;
use crate::homology::{is_cycle, ChainVector};
use crate::linalg::Tolerances;
use crate::phase::Phase;

/// Constant value `value` on a segment of length `length`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub length: f64,
    pub value: f64,
}

impl Piece {
    pub fn new(length: f64, value: f64) -> Self {
        Self { length, value }
    }
}

/// Relative tolerance on `Σ lengths = a_i`.
const LENGTH_TOL: f64 = 1e-9;

/// `𝒜_j(x)` on every edge as a list of constant pieces starting at `x = 0`.
/// An empty list is the zero potential. On external lines only the value at
/// the vertex enters, so their last piece may be unbounded.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorPotential {
    external: Vec<Vec<Piece>>,
    internal: Vec<Vec<Piece>>,
}

impl VectorPotential {
    pub fn zero(graph: &MetricGraph) -> Self {
        Self {
            external: vec![Vec::new(); graph.n_external()],
            internal: vec![Vec::new(); graph.n_internal()],
        }
    }

    pub fn new(graph: &MetricGraph, external: Vec<Vec<Piece>>, internal: Vec<Vec<Piece>>) -> Result<Self> {
        if external.len() != graph.n_external() {
            return Err(Error::DimensionMismatch {
                expected: graph.n_external(),
                found: external.len(),
            });
        }
        if internal.len() != graph.n_internal() {
            return Err(Error::DimensionMismatch {
                expected: graph.n_internal(),
                found: internal.len(),
            });
        }
        let check_piece = |id: &str, p: &Piece| {
            if !p.value.is_finite() {
                return Err(Error::InvalidPotential(format!("non-finite value on `{id}`")));
            }
            if p.length.is_nan() || p.length <= 0.0 {
                return Err(Error::InvalidPotential(format!(
                    "non-positive piece length on `{id}`"
                )));
            }
            Ok(())
        };
        for (e, pieces) in graph.external_edges().iter().zip(&external) {
            for p in pieces {
                check_piece(&e.id, p)?;
            }
        }
        for (e, pieces) in graph.internal_edges().iter().zip(&internal) {
            for p in pieces {
                check_piece(&e.id, p)?;
            }
            if pieces.is_empty() {
                continue;
            }
            let sum: f64 = pieces.iter().map(|p| p.length).sum();
            if (sum - e.length).abs() > LENGTH_TOL * e.length.max(1.0) {
                return Err(Error::PotentialLength {
                    edge: e.id.clone(),
                    sum,
                    length: e.length,
                });
            }
        }
        Ok(Self { external, internal })
    }

    /// Constant potential `values[i]` on internal edge `i`, zero on external lines.
    pub fn constant(graph: &MetricGraph, values: &[f64]) -> Result<Self> {
        let internal = graph
            .internal_edges()
            .iter()
            .zip(values)
            .map(|(e, &v)| vec![Piece::new(e.length, v)])
            .collect::<Vec<_>>();
        if internal.len() != graph.n_internal() || values.len() != graph.n_internal() {
            return Err(Error::DimensionMismatch {
                expected: graph.n_internal(),
                found: values.len(),
            });
        }
        Self::new(graph, vec![Vec::new(); graph.n_external()], internal)
    }

    pub fn external_pieces(&self, e: usize) -> &[Piece] {
        &self.external[e]
    }

    pub fn internal_pieces(&self, i: usize) -> &[Piece] {
        &self.internal[i]
    }

    /// Pieces covering `[0, a_i]`, with the zero potential as a single piece.
    pub fn pieces_or_zero(&self, i: usize, length: f64) -> Vec<Piece> {
        if self.internal[i].is_empty() {
            vec![Piece::new(length, 0.0)]
        } else {
            self.internal[i].clone()
        }
    }

    /// `∫₀^{a_i} 𝒜_i(t) dt`
    pub fn integral(&self, i: usize) -> f64 {
        self.internal[i].iter().map(|p| p.length * p.value).sum()
    }

    fn start_value(pieces: &[Piece]) -> f64 {
        pieces.first().map_or(0.0, |p| p.value)
    }

    fn end_value(pieces: &[Piece]) -> f64 {
        pieces.last().map_or(0.0, |p| p.value)
    }

    /// `𝒜̲ = diag(𝒜_e(0), 𝒜_i(0), −𝒜_i(a_i))` in canonical ordering.
    pub fn boundary_diagonal(&self) -> Vec<f64> {
        let mut d: Vec<f64> = self.external.iter().map(|p| Self::start_value(p)).collect();
        d.extend(self.internal.iter().map(|p| Self::start_value(p)));
        d.extend(self.internal.iter().map(|p| -Self::end_value(p)));
        d
    }

    /// Sum of two potentials, refining pieces to common breakpoints.
    pub fn add(&self, other: &VectorPotential, graph: &MetricGraph) -> Result<VectorPotential> {
        let merge = |p: &[Piece], q: &[Piece], total: f64| -> Vec<Piece> {
            if p.is_empty() {
                return q.to_vec();
            }
            if q.is_empty() {
                return p.to_vec();
            }
            let mut out = Vec::new();
            let (mut i, mut j) = (0, 0);
            let (mut ri, mut rj) = (p[0].length, q[0].length);
            let mut covered = 0.0;
            while i < p.len() && j < q.len() {
                let step = ri.min(rj);
                out.push(Piece::new(step, p[i].value + q[j].value));
                covered += step;
                ri -= step;
                rj -= step;
                if ri <= LENGTH_TOL * total {
                    i += 1;
                    if i < p.len() {
                        ri += p[i].length;
                    }
                }
                if rj <= LENGTH_TOL * total {
                    j += 1;
                    if j < q.len() {
                        rj += q[j].length;
                    }
                }
                if covered >= total * (1.0 - LENGTH_TOL) {
                    break;
                }
            }
            out
        };
        let internal = graph
            .internal_edges()
            .iter()
            .enumerate()
            .map(|(i, e)| merge(&self.internal[i], &other.internal[i], e.length.max(1.0)))
            .collect();
        let external = (0..graph.n_external())
            .map(|e| {
                let v = Self::start_value(&self.external[e]) + Self::start_value(&other.external[e]);
                if v == 0.0 {
                    Vec::new()
                } else {
                    vec![Piece::new(f64::INFINITY, v)]
                }
            })
            .collect();
        VectorPotential::new(graph, external, internal)
    }
}

/// Boundary diagonal, edge integrals, and gauge unitary of a potential.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeData {
    pub boundary_diagonal: Vec<f64>,
    pub integrals: Vec<f64>,
    pub unitary: DiagonalUnitary,
}

fn check_graph(pot: &VectorPotential, graph: &MetricGraph) -> Result<()> {
    if pot.internal.len() != graph.n_internal() || pot.external.len() != graph.n_external() {
        return Err(Error::InvalidPotential(
            "potential does not match the graph".into(),
        ));
    }
    Ok(())
}

/// The diagonal unitary of the gauge `χ_j(0) = 0`: `φ_e = 0`, `φ_i⁻ = 0`,
/// `φ_i⁺ = ∫₀^{a_i} 𝒜_i`.
pub fn induced_unitary(pot: &VectorPotential, graph: &MetricGraph) -> Result<DiagonalUnitary> {
    check_graph(pot, graph)?;
    let map = graph.boundary_coordinate_map();
    let mut phases = vec![0.0; map.dim()];
    for i in 0..graph.n_internal() {
        phases[map.terminal_slot(i)] = pot.integral(i);
    }
    Ok(DiagonalUnitary::new(phases))
}

/// Gauge unitary for `χ_j(0) = offsets[j]`, with external lines first:
/// `φ_e = χ_e(0)`, `φ_i⁻ = χ_i(0)`, `φ_i⁺ = χ_i(0) + ∫₀^{a_i} 𝒜_i`. It differs
/// from [`induced_unitary`] by an element of `𝖴₀`.
pub fn induced_unitary_with_offsets(
    pot: &VectorPotential,
    graph: &MetricGraph,
    offsets: &[f64],
) -> Result<DiagonalUnitary> {
    let n = graph.n_external();
    if offsets.len() != n + graph.n_internal() {
        return Err(Error::DimensionMismatch {
            expected: n + graph.n_internal(),
            found: offsets.len(),
        });
    }
    let map = graph.boundary_coordinate_map();
    let mut phases = induced_unitary(pot, graph)?.phases().to_vec();
    for (e, &o) in offsets[..n].iter().enumerate() {
        phases[map.external_slot(e)] += o;
    }
    for (i, &o) in offsets[n..].iter().enumerate() {
        phases[map.initial_slot(i)] += o;
        phases[map.terminal_slot(i)] += o;
    }
    Ok(DiagonalUnitary::new(phases))
}

/// Offsets `χ_j(0)` for which the gauge unitary lies in `𝖶₀`, so that for
/// local conditions the potential disappears from the operator altogether.
/// `None` when some flux is non-trivial.
pub fn trivializing_offsets(
    pot: &VectorPotential,
    graph: &MetricGraph,
    tol: &Tolerances,
) -> Result<Option<Vec<f64>>> {
    let u = induced_unitary(pot, graph)?;
    let Factorization::Product { u0, .. } = factorize_u0w0(&u, graph, tol)? else {
        return Ok(None);
    };
    let map = graph.boundary_coordinate_map();
    let mut offsets: Vec<f64> = (0..graph.n_external())
        .map(|e| -u0.phases()[map.external_slot(e)])
        .collect();
    offsets.extend((0..graph.n_internal()).map(|i| -u0.phases()[map.initial_slot(i)]));
    Ok(Some(offsets))
}

pub fn gauge_data(pot: &VectorPotential, graph: &MetricGraph) -> Result<GaugeData> {
    Ok(GaugeData {
        boundary_diagonal: pot.boundary_diagonal(),
        integrals: (0..graph.n_internal()).map(|i| pot.integral(i)).collect(),
        unitary: induced_unitary(pot, graph)?,
    })
}

/// `exp(i Σ n_i ∫ 𝒜_i)` for a cycle `c = Σ n_i σ_i`.
pub fn flux_of_potential(pot: &VectorPotential, c: &ChainVector, graph: &MetricGraph) -> Result<Phase> {
    check_graph(pot, graph)?;
    if !is_cycle(c, graph)? {
        return Err(Error::NotACycle);
    }
    let total: f64 = c
        .coefficients()
        .iter()
        .enumerate()
        .map(|(i, &n)| n as f64 * pot.integral(i))
        .sum();
    Ok(Phase::from_angle(total))
}

/// `(A𝒰_G, B𝒰_G)`: boundary conditions of the potential-free operator
/// unitarily equivalent to the magnetic one.
pub fn gauge_eliminate(
    bc: &BoundaryConditions,
    pot: &VectorPotential,
    graph: &MetricGraph,
) -> Result<BoundaryConditions> {
    bc.check_shape(&graph.boundary_coordinate_map())?;
    bc.transformed(&induced_unitary(pot, graph)?)
}

/// [`gauge_eliminate`] in the gauge `χ_j(0) = offsets[j]`.
pub fn gauge_eliminate_with_offsets(
    bc: &BoundaryConditions,
    pot: &VectorPotential,
    graph: &MetricGraph,
    offsets: &[f64],
) -> Result<BoundaryConditions> {
    bc.check_shape(&graph.boundary_coordinate_map())?;
    bc.transformed(&induced_unitary_with_offsets(pot, graph, offsets)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{kirchhoff, operators_equal};
    use crate::fixtures::{example_nonlocal_conditions, ring_graph, theta_graph, two_lead_graph};
    use crate::gauge::{in_u0, in_w0};
    use crate::homology::flux_map;
    use std::f64::consts::PI;

    #[test]
    fn zero_potential_gives_identity() {
        let g = theta_graph([1.0, 2.0, 3.0]);
        let u = induced_unitary(&VectorPotential::zero(&g), &g).unwrap();
        assert_eq!(u, DiagonalUnitary::identity(6));
    }

    #[test]
    fn ring_constant_potential() {
        let g = ring_graph(3.0);
        let pot = VectorPotential::constant(&g, &[0.7 / 3.0]).unwrap();
        let u = induced_unitary(&pot, &g).unwrap();
        assert!((u.phases()[1] - 0.7).abs() < 1e-15);
        assert_eq!(u.phases()[0], 0.0);
    }

    #[test]
    fn two_piece_integral() {
        let g = ring_graph(2.0);
        let pot = VectorPotential::new(
            &g,
            vec![],
            vec![vec![Piece::new(1.0, 0.4), Piece::new(1.0, -1.5)]],
        )
        .unwrap();
        let u = induced_unitary(&pot, &g).unwrap();
        assert!((u.phases()[1] - (0.4 - 1.5)).abs() < 1e-15);
        assert_eq!(pot.boundary_diagonal(), vec![0.4, 1.5]);
    }

    #[test]
    fn boundary_diagonal_order() {
        let g = two_lead_graph(2.0);
        let pot = VectorPotential::new(
            &g,
            vec![vec![Piece::new(f64::INFINITY, 0.1)], vec![]],
            vec![vec![Piece::new(0.5, 0.2), Piece::new(1.5, 0.3)]],
        )
        .unwrap();
        assert_eq!(pot.boundary_diagonal(), vec![0.1, 0.0, 0.2, -0.3]);
    }

    #[test]
    fn length_mismatch_rejected() {
        let g = ring_graph(2.0);
        let err = VectorPotential::new(&g, vec![], vec![vec![Piece::new(1.0, 0.4)]]).unwrap_err();
        assert!(matches!(err, Error::PotentialLength { .. }));
        let err = VectorPotential::new(&g, vec![], vec![vec![Piece::new(2.0, f64::NAN)]]).unwrap_err();
        assert!(matches!(err, Error::InvalidPotential(_)));
    }

    #[test]
    fn flux_on_ring_and_theta() {
        let g = ring_graph(1.0);
        let pot = VectorPotential::constant(&g, &[PI]).unwrap();
        let f = flux_of_potential(&pot, &ChainVector(vec![1]), &g).unwrap();
        assert!(f.approx_eq(Phase::from_angle(PI), 1e-15));

        let g = theta_graph([1.0, 2.0, 1.0]);
        let (alpha, beta) = (0.9, -0.4);
        let pot = VectorPotential::constant(&g, &[alpha, beta / 2.0, 0.0]).unwrap();
        let c = ChainVector(vec![1, -1, 0]);
        let f = flux_of_potential(&pot, &c, &g).unwrap();
        assert!(f.approx_eq(Phase::from_angle(alpha - beta), 1e-15));
        let u = induced_unitary(&pot, &g).unwrap();
        assert_eq!(f, flux_map(&u, &c, &g).unwrap());
        let bad = ChainVector(vec![1, 0, 0]);
        assert_eq!(flux_of_potential(&pot, &bad, &g).unwrap_err(), Error::NotACycle);
    }

    #[test]
    fn ring_gauge_with_trivial_flux() {
        let tol = Tolerances::default();
        let g = ring_graph(1.0);
        let bc = kirchhoff(&g);
        let pot = VectorPotential::constant(&g, &[2.0 * PI]).unwrap();
        let eliminated = gauge_eliminate(&bc, &pot, &g).unwrap();
        assert!(operators_equal(&bc, &eliminated, &tol).unwrap());
        let pot = VectorPotential::constant(&g, &[1.0]).unwrap();
        let eliminated = gauge_eliminate(&bc, &pot, &g).unwrap();
        assert!(!operators_equal(&bc, &eliminated, &tol).unwrap());
    }

    #[test]
    fn example_with_half_flux_changes_operator() {
        let tol = Tolerances::default();
        let g = two_lead_graph(1.0);
        let bc = example_nonlocal_conditions();
        let pot = VectorPotential::constant(&g, &[PI]).unwrap();
        let eliminated = gauge_eliminate(&bc, &pot, &g).unwrap();
        assert!(eliminated.check_self_adjoint(&tol));
        assert!(!operators_equal(&bc, &eliminated, &tol).unwrap());
        let zero = gauge_eliminate(&bc, &VectorPotential::zero(&g), &g).unwrap();
        assert!(operators_equal(&bc, &zero, &tol).unwrap());
    }

    #[test]
    fn adding_potentials() {
        let g = ring_graph(2.0);
        let p =
            VectorPotential::new(&g, vec![], vec![vec![Piece::new(0.5, 1.0), Piece::new(1.5, 2.0)]]).unwrap();
        let q = VectorPotential::new(
            &g,
            vec![],
            vec![vec![Piece::new(1.0, -1.0), Piece::new(1.0, 3.0)]],
        )
        .unwrap();
        let s = p.add(&q, &g).unwrap();
        assert_eq!(s.internal_pieces(0).len(), 3);
        assert!((s.integral(0) - (p.integral(0) + q.integral(0))).abs() < 1e-14);
        assert_eq!(s.boundary_diagonal(), vec![0.0, -5.0]);
    }

    #[test]
    fn offsets_change_unitary_within_u0() {
        let g = two_lead_graph(2.0);
        let pot = VectorPotential::constant(&g, &[0.6]).unwrap();
        let base = induced_unitary(&pot, &g).unwrap();
        let shifted = induced_unitary_with_offsets(&pot, &g, &[0.3, -1.0, 2.0]).unwrap();
        let map = g.boundary_coordinate_map();
        assert!(in_u0(
            &base.inverse().compose(&shifted),
            &map,
            &Tolerances::default()
        ));
        assert!(induced_unitary_with_offsets(&pot, &g, &[0.0]).is_err());
    }

    #[test]
    fn potential_on_a_tree_is_removable() {
        let tol = Tolerances::default();
        let g = two_lead_graph(2.0);
        let pot = VectorPotential::constant(&g, &[0.6]).unwrap();
        let bc = kirchhoff(&g);
        assert!(!operators_equal(&bc, &gauge_eliminate(&bc, &pot, &g).unwrap(), &tol).unwrap());
        let offsets = trivializing_offsets(&pot, &g, &tol).unwrap().unwrap();
        let u = induced_unitary_with_offsets(&pot, &g, &offsets).unwrap();
        assert!(in_w0(&u, &g.boundary_coordinate_map(), &tol));
        let eliminated = gauge_eliminate_with_offsets(&bc, &pot, &g, &offsets).unwrap();
        assert!(operators_equal(&bc, &eliminated, &tol).unwrap());

        let ring = ring_graph(1.0);
        let pot = VectorPotential::constant(&ring, &[1.0]).unwrap();
        assert_eq!(trivializing_offsets(&pot, &ring, &tol).unwrap(), None);
    }
}
