mod common;

use common::{random_complex, random_rank, rng};
use proptest::prelude::*;
use qwire_core::linalg::{
    hstack, intersect, kernel, pseudoinverse, range, rank, subspace_equal, CMatrix, Subspace, Tolerances,
};
use rand::Rng;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn close(a: &CMatrix, b: &CMatrix, eps: f64) -> bool {
    (a - b).norm() <= eps * b.norm().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn penrose_identities(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rows = r.random_range(1..=12);
        let cols = r.random_range(1..=12);
        let rk = r.random_range(0..=rows.min(cols));
        let m = random_complex(&mut r, rows, rk) * random_complex(&mut r, rk, cols);
        let p = pseudoinverse(&m, &tol());
        prop_assert!(close(&(&m * &p * &m), &m, 1e-10));
        prop_assert!(close(&(&p * &m * &p), &p, 1e-10));
        let mp = &m * &p;
        let pm = &p * &m;
        prop_assert!(close(&mp.adjoint(), &mp, 1e-10));
        prop_assert!(close(&pm.adjoint(), &pm, 1e-10));
        prop_assert_eq!(rank(&m, &tol()), rk);
    }

    #[test]
    fn rank_nullity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = r.random_range(1..=10);
        let rk = r.random_range(0..=k);
        let m = random_rank(&mut r, k, rk);
        prop_assert_eq!(kernel(&m, &tol()).dim() + range(&m, &tol()).dim(), k);
        prop_assert!((&m * kernel(&m, &tol()).basis()).norm() < 1e-9 * m.norm().max(1.0));
    }

    #[test]
    fn intersection_laws(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = r.random_range(1..=10);
        let d1 = r.random_range(0..=k);
        let d2 = r.random_range(0..=k);
        let s1 = Subspace::span(&random_complex(&mut r, k, d1), &tol());
        let s2 = Subspace::span(&random_complex(&mut r, k, d2), &tol());
        let self_meet = intersect(&s1, &s1, &tol()).unwrap();
        prop_assert!(subspace_equal(&self_meet, &s1, &tol()));
        let i12 = intersect(&s1, &s2, &tol()).unwrap();
        let i21 = intersect(&s2, &s1, &tol()).unwrap();
        prop_assert!(subspace_equal(&i12, &i21, &tol()));
        prop_assert!(i12.dim() <= d1.min(d2));
        // generic subspaces meet in the expected dimension
        prop_assert_eq!(i12.dim(), (d1 + d2).saturating_sub(k));
    }

    #[test]
    fn planted_intersection_is_found(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = r.random_range(2..=10);
        let common_dim = r.random_range(1..=k / 2);
        let extra = (k - common_dim) / 2;
        let shared = random_complex(&mut r, k, common_dim);
        let s1 = Subspace::span(&hstack(&shared, &random_complex(&mut r, k, extra)), &tol());
        let s2 = Subspace::span(&hstack(&shared, &random_complex(&mut r, k, extra)), &tol());
        let meet = intersect(&s1, &s2, &tol()).unwrap();
        prop_assert_eq!(meet.dim(), common_dim);
        prop_assert!(subspace_equal(&meet, &Subspace::span(&shared, &tol()), &tol()));
    }
}

#[test]
fn orthogonal_lines_meet_in_zero() {
    let s1 = Subspace::coordinate(3, &[0]);
    let s2 = Subspace::coordinate(3, &[1]);
    assert!(intersect(&s1, &s2, &tol()).unwrap().is_zero());
}

#[test]
fn projector_of_full_space_is_identity() {
    let s = Subspace::full(4);
    assert!((s.projector() - CMatrix::identity(4, 4)).norm() < 1e-14);
    assert_eq!(Subspace::zero(4).dim(), 0);
}
