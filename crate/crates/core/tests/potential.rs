mod common;

use common::{
    random_block_conditions, random_connected_graph, random_local_conditions, random_potential, rng, SMALL,
};
use proptest::prelude::*;
use qwire_core::boundary::{kirchhoff, BoundaryConditions};
use qwire_core::fixtures::{ring_graph, two_lead_graph};
use qwire_core::gauge::in_u0;
use qwire_core::homology::{cycle_basis, flux_map};
use qwire_core::linalg::Tolerances;
use qwire_core::potential::{
    flux_of_potential, gauge_data, gauge_eliminate, induced_unitary, Piece, VectorPotential,
};
use rand::Rng;

fn tol() -> Tolerances {
    Tolerances::default()
}

/// `χ′` for a `χ` vanishing at both ends of every internal edge: two halves
/// of opposite sign.
fn pure_gauge(rng: &mut impl Rng, graph: &qwire_core::graph::MetricGraph) -> VectorPotential {
    let internal = graph
        .internal_edges()
        .iter()
        .map(|e| {
            let v = rng.random_range(-3.0..3.0);
            vec![Piece::new(e.length / 2.0, v), Piece::new(e.length / 2.0, -v)]
        })
        .collect();
    let external = (0..graph.n_external())
        .map(|_| vec![Piece::new(f64::INFINITY, 0.0)])
        .collect();
    VectorPotential::new(graph, external, internal).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn elimination_keeps_self_adjointness(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_connected_graph(&mut r, &SMALL);
        let pot = random_potential(&mut r, &g);
        let local = random_local_conditions(&mut r, &g);
        prop_assert!(gauge_eliminate(&local, &pot, &g).unwrap().check_self_adjoint(&tol()));
        let (any, _) = random_block_conditions(&mut r, g.boundary_dim());
        prop_assert!(gauge_eliminate(&any, &pot, &g).unwrap().check_self_adjoint(&tol()));
    }

    #[test]
    fn potential_flux_matches_unitary_flux(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_connected_graph(&mut r, &SMALL);
        let pot = random_potential(&mut r, &g);
        let u = induced_unitary(&pot, &g).unwrap();
        for cyc in cycle_basis(&g).unwrap().cycles {
            let direct = flux_of_potential(&pot, &cyc, &g).unwrap();
            prop_assert!(direct.approx_eq(flux_map(&u, &cyc, &g).unwrap(), 1e-12));
        }
    }

    #[test]
    fn pure_gauge_moves_only_inside_u0(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_connected_graph(&mut r, &SMALL);
        let pot = random_potential(&mut r, &g);
        let sum = pot.add(&pure_gauge(&mut r, &g), &g).unwrap();
        let u1 = induced_unitary(&pot, &g).unwrap();
        let u2 = induced_unitary(&sum, &g).unwrap();
        prop_assert!(in_u0(&u2.compose(&u1.inverse()), &g.boundary_coordinate_map(), &tol()));
    }

    #[test]
    fn integrals_add(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_connected_graph(&mut r, &SMALL);
        let p = random_potential(&mut r, &g);
        let q = random_potential(&mut r, &g);
        let s = p.add(&q, &g).unwrap();
        for i in 0..g.n_internal() {
            prop_assert!((s.integral(i) - p.integral(i) - q.integral(i)).abs() < 1e-12);
        }
    }
}

#[test]
fn boundary_diagonal_signs() {
    let g = two_lead_graph(2.0);
    let pot = VectorPotential::new(
        &g,
        vec![
            vec![Piece::new(f64::INFINITY, 0.5)],
            vec![Piece::new(f64::INFINITY, -1.0)],
        ],
        vec![vec![Piece::new(1.5, 2.0), Piece::new(0.5, 3.0)]],
    )
    .unwrap();
    let data = gauge_data(&pot, &g).unwrap();
    // externals first, then the initial and terminal end of the edge
    assert_eq!(data.boundary_diagonal, vec![0.5, -1.0, 2.0, -3.0]);
    assert!((data.integrals[0] - 4.5).abs() < 1e-15);
    assert!((data.unitary.phases()[3] - 4.5).abs() < 1e-15);
}

#[test]
fn piece_lengths_must_cover_the_edge() {
    let g = ring_graph(1.0);
    let short = VectorPotential::new(&g, vec![], vec![vec![Piece::new(0.4, 1.0)]]);
    assert!(short.is_err());
    assert!(VectorPotential::constant(&g, &[1.0]).is_ok());
}

#[test]
fn zero_potential_changes_nothing() {
    let g = two_lead_graph(1.0);
    let bc = kirchhoff(&g);
    let out: BoundaryConditions = gauge_eliminate(&bc, &VectorPotential::zero(&g), &g).unwrap();
    assert_eq!(out, bc);
}
