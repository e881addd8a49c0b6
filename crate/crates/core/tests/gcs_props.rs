mod common;

use common::{standard_symplectic, unipotent_jacobian};
use gengeo::courant::{pairing, standard_chart, Section};
use gengeo::gcs::{
    check_eigenbundles, check_gcs, coboundary_of_pairing, eigenprojector, gcs_from_complex, gcs_from_holomorphic_poisson, gcs_from_symplectic,
    standard_complex_structure, GcsCandidate, HoloPoissonData,
};
use gengeo::liecalc::lie_derivative_section;
use gengeo::linalg::FieldMatrix;
use gengeo::random::trials;
use proptest::prelude::*;

fn invariants(j: &GcsCandidate, seed: u64) -> Result<(), TestCaseError> {
    let chart = j.chart();
    let n = chart.rank();
    let m = j.matrix();
    prop_assert!(m.mul(m).add(&FieldMatrix::identity(n)).is_zero());
    let g = chart.pairing_fields();
    prop_assert_eq!(m.transpose().mul(&g).mul(m), g);
    let (s, fs) = trials(chart, seed, 2, 1, 1);
    let r = check_gcs(j, &s, &fs).unwrap();
    prop_assert!(r.passed(), "{}", r.to_text());
    let r = check_eigenbundles(j).unwrap();
    prop_assert!(r.passed(), "{}", r.to_text());
    Ok(())
}

/// `(d_L beta)(v, w) = <v, L_{zbar} w>` for `beta = <zbar, .>` and `z, v, w` in `L`.
fn coboundary_matches_lie_derivative(j: &GcsCandidate, seed: u64) -> Result<(), TestCaseError> {
    let chart = j.chart();
    let p = eigenprojector(j).unwrap();
    let (s, _) = trials(chart, seed, 3, 1, 1);
    let z = p.apply(&s[0]);
    let zbar = z.conj();
    for (a, b) in [(0, 1), (1, 2), (2, 0)] {
        let v = p.apply(&Section::basis(chart, a));
        let w = p.apply(&s[b]);
        let lhs = coboundary_of_pairing(&zbar, &v, &w).unwrap();
        let rhs = pairing(&v, &lie_derivative_section(&zbar, &w).unwrap()).unwrap();
        prop_assert!((lhs - rhs).is_zero());
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn pulled_back_symplectic_structures(seed in any::<u64>()) {
        let chart = standard_chart(4).unwrap();
        let a = unipotent_jacobian(4, seed);
        let omega = a.transpose().mul(&standard_symplectic(4)).mul(&a);
        let j = gcs_from_symplectic(&chart, &omega).unwrap();
        invariants(&j, seed)?;
        coboundary_matches_lie_derivative(&j, seed)?;
    }

    #[test]
    fn pulled_back_complex_structures(seed in any::<u64>()) {
        let chart = standard_chart(4).unwrap();
        let a = unipotent_jacobian(4, seed);
        let jm = a.inverse().unwrap().unwrap().mul(&standard_complex_structure(4)).mul(&a);
        let j = gcs_from_complex(&chart, &jm).unwrap();
        invariants(&j, seed)?;
        coboundary_matches_lie_derivative(&j, seed)?;
    }
}

#[test]
fn zero_bivector_gives_the_complex_structure() {
    for d in [2, 4] {
        let chart = standard_chart(d).unwrap();
        let j = standard_complex_structure(d);
        let data = HoloPoissonData::new(j.clone(), FieldMatrix::zeros(d, d)).unwrap();
        let a = gcs_from_holomorphic_poisson(&chart, &data).unwrap();
        let b = gcs_from_complex(&chart, &j).unwrap();
        assert_eq!(a.matrix(), b.matrix());
    }
}

#[test]
fn non_closed_form_is_rejected() {
    // x3 dx1^dx2 + dx1^dx4 + dx2^dx3 + ... : d(x3 dx1^dx2) = dx3^dx1^dx2 != 0
    let chart = standard_chart(4).unwrap();
    let mut omega = standard_symplectic(4);
    omega.set(0, 1, common::f("x3"));
    omega.set(1, 0, common::f("-x3"));
    assert!(gcs_from_symplectic(&chart, &omega).is_err());
}
