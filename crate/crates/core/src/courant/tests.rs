use super::*;
use crate::report::Status;
use crate::symbolic::coeff::{cq_int, rat};
use crate::symbolic::parse_field;

fn f(s: &str) -> ScalarField {
    parse_field(s).unwrap()
}

fn sec(chart: &Arc<CourantChart>, parts: &[&str]) -> Section {
    Section::new(chart, parts.iter().map(|p| f(p)).collect()).unwrap()
}

#[test]
fn standard_pairing_matrix() {
    let c = standard_chart(2).unwrap();
    let g = c.pairing_matrix();
    for i in 0..4 {
        for j in 0..4 {
            let want = if (i, j) == (0, 2) || (i, j) == (2, 0) || (i, j) == (1, 3) || (i, j) == (3, 1) {
                rat(1, 2)
            } else {
                rat(0, 1)
            };
            assert_eq!(g[i][j], want, "g[{i}][{j}]");
        }
    }
    for i in 0..4 {
        for j in 0..4 {
            assert!(c.structure(i, j).iter().all(ScalarField::is_zero));
            assert!(courant_bracket(&Section::basis(&c, i), &Section::basis(&c, j)).unwrap().is_zero());
        }
    }
}

#[test]
fn one_dimensional_anchor() {
    let c = standard_chart(1).unwrap();
    assert_eq!(anchor_vector(&Section::basis(&c, 0)), vec![f("1")]);
    assert_eq!(anchor_vector(&Section::basis(&c, 1)), vec![f("0")]);
    assert!(standard_chart(0).is_err());
}

#[test]
fn pairing_examples() {
    let c = standard_chart(2).unwrap();
    let dx = sec(&c, &["1", "0", "0", "0"]);
    assert!(pairing(&dx, &dx).unwrap().is_zero());
    let s = sec(&c, &["1", "0", "1", "0"]);
    assert_eq!(pairing(&s, &s).unwrap(), f("1"));
}

#[test]
fn anchor_examples() {
    let c = standard_chart(2).unwrap();
    assert_eq!(anchor_apply(&sec(&c, &["1", "0", "5", "0"]), &f("x1^2")), f("2*x1"));
    assert!(anchor_apply(&sec(&c, &["0", "0", "1", "0"]), &f("x1^2*x2")).is_zero());
    assert_eq!(anchor_apply(&sec(&c, &["0", "x1", "0", "0"]), &f("x2")), f("x1"));
}

#[test]
fn d_operator_examples() {
    let c = standard_chart(2).unwrap();
    assert_eq!(d_operator(&c, &f("x1")), sec(&c, &["0", "0", "1", "0"]));
    assert!(d_operator(&c, &f("7/3")).is_zero());
    let a = d_operator(&c, &f("x1^2*x2 + x2"));
    let b = d_operator(&c, &f("x1 - 3*x2^2"));
    assert!(pairing(&a, &b).unwrap().is_zero());
}

#[test]
fn bracket_hand_examples() {
    let c = standard_chart(1).unwrap();
    let dx = sec(&c, &["1", "0"]);
    let x_dx = sec(&c, &["0", "x1"]);
    assert_eq!(courant_bracket(&dx, &x_dx).unwrap(), sec(&c, &["0", "1/2"]));
    assert_eq!(dorfman_bracket(&dx, &x_dx).unwrap(), sec(&c, &["0", "1"]));
    let a = sec(&c, &["x1^2 + 1", "3*x1"]);
    assert!(courant_bracket(&a, &a).unwrap().is_zero());
    let d = d_operator(&c, &pairing(&a, &a).unwrap());
    assert_eq!(dorfman_bracket(&a, &a).unwrap(), d);
}

#[test]
fn double_of_tangent_bundle_is_standard() {
    let d = 2;
    let zero = vec![vec![vec![ScalarField::zero(); d]; d]; d];
    let dbl = double_of_lie_algebroid(&FieldMatrix::identity(d), &zero).unwrap();
    assert_eq!(*dbl, *standard_chart(d).unwrap());
    assert_eq!(dbl.kind(), ChartKind::Standard);
}

#[test]
fn abelian_double_is_flat() {
    let anchor = FieldMatrix::from_rows(vec![vec![f("x1"), f("x1^2 + 1")]]).unwrap();
    let zero = vec![vec![vec![ScalarField::zero(); 2]; 2]; 2];
    assert!(double_of_lie_algebroid(&anchor, &zero).unwrap().is_flat());
}

#[test]
fn double_brackets_from_structure_constants() {
    // rank 2 algebra with c^1_12 = 1: [e1, e2] = e1
    let anchor = FieldMatrix::zeros(1, 2);
    let mut c = vec![vec![vec![ScalarField::zero(); 2]; 2]; 2];
    c[0][1][0] = ScalarField::one();
    c[1][0][0] = -ScalarField::one();
    let chart = double_of_lie_algebroid(&anchor, &c).unwrap();
    let e = |i| Section::basis(&chart, i);
    // frame order (e1, e2, eps1, eps2)
    assert_eq!(courant_bracket(&e(0), &e(1)).unwrap(), e(0));
    assert_eq!(courant_bracket(&e(0), &e(2)).unwrap(), -e(3));
    assert_eq!(courant_bracket(&e(1), &e(2)).unwrap(), e(2));
    assert!(courant_bracket(&e(3), &e(0)).unwrap().is_zero());
    assert!(courant_bracket(&e(2), &e(3)).unwrap().is_zero());
}

#[test]
fn antisymmetry_violation_rejected() {
    let anchor = FieldMatrix::zeros(1, 2);
    let mut c = vec![vec![vec![ScalarField::zero(); 2]; 2]; 2];
    c[0][1][0] = ScalarField::one();
    assert!(matches!(
        double_of_lie_algebroid(&anchor, &c),
        Err(CourantError::NotAntisymmetric(..))
    ));
}

#[test]
fn singular_pairing_rejected() {
    let g = vec![vec![rat(1, 1), rat(1, 1)], vec![rat(1, 1), rat(1, 1)]];
    let s = vec![vec![vec![ScalarField::zero(); 2]; 2]; 2];
    let r = CourantChart::new(1, g, FieldMatrix::zeros(1, 2), s, ChartKind::Custom);
    assert_eq!(r.unwrap_err(), CourantError::PairingSingular);
}

#[test]
fn standard_chart_passes_axioms() {
    for d in 1..=2 {
        let chart = standard_chart(d).unwrap();
        let (s, fs) = crate::random::trials(&chart, 11 + d as u64, 4, 2, 2);
        let r = check_axioms_with(&chart, &s, &fs, TupleMode::All).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        let r = check_dorfman_identities(&chart, &s, &fs, TupleMode::Window).unwrap();
        assert!(r.passed(), "{}", r.to_text());
    }
}

#[test]
fn non_jacobi_double_fails_jacobiator_only() {
    let chart = non_jacobi_double();
    let (s, fs) = crate::random::trials(&chart, 3, 3, 2, 1);
    let mut s = s;
    // frame elements make the failing triple explicit
    s.extend((0..3).map(|i| Section::basis(&chart, i)));
    let r = check_axioms(&chart, &s, &fs).unwrap();
    let jac = r.check("jacobiator equals D of the cyclic pairing").unwrap();
    assert_eq!(jac.status, Status::Fail);
    assert!(r.check("anchor is a bracket morphism").unwrap().passed());
    assert!(r.check("Leibniz rule").unwrap().passed());
}

/// Rank 3 algebroid with zero anchor and `[e1,e2] = e2`, `[e2,e3] = x1 e1`,
/// whose Jacobiator on `(e1, e2, e3)` is `x1 e1`.
pub(crate) fn non_jacobi_double() -> Arc<CourantChart> {
    let anchor = FieldMatrix::zeros(1, 3);
    let mut c = vec![vec![vec![ScalarField::zero(); 3]; 3]; 3];
    c[0][1][1] = ScalarField::one();
    c[1][0][1] = -ScalarField::one();
    c[1][2][0] = f("x1");
    c[2][1][0] = f("-x1");
    double_of_lie_algebroid(&anchor, &c).unwrap()
}

#[test]
fn too_few_trials() {
    let chart = standard_chart(1).unwrap();
    let s = vec![Section::zero(&chart); 2];
    assert!(check_axioms(&chart, &s, &[f("1"), f("x1")]).is_err());
}

#[test]
fn section_scaling() {
    let c = standard_chart(1).unwrap();
    let s = sec(&c, &["x1", "1"]).scale(&cq_int(2));
    assert_eq!(s, sec(&c, &["2*x1", "2"]));
}
