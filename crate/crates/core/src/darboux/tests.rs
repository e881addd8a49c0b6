use super::*;
use crate::courant::standard_chart;
use crate::gcs::{gcs_from_complex, gcs_from_symplectic};
use crate::moser::{check_infinitesimal, default_times, primitive_to_vector};
use crate::symbolic::parse_field;

fn f(s: &str) -> ScalarField {
    parse_field(s).unwrap()
}

fn area(c: &str) -> GcsCandidate {
    let chart = standard_chart(2).unwrap();
    let omega = FieldMatrix::from_rows(vec![vec![f("0"), f(c)], vec![f(c).neg(), f("0")]]).unwrap();
    gcs_from_symplectic(&chart, &omega).unwrap()
}

fn dw_config() -> NumericConfig {
    NumericConfig {
        tol: 1e-4,
        ..NumericConfig::default()
    }
}

#[test]
fn constant_structure_scales_to_itself() {
    let j = area("1");
    let fam = scaling_family(&j, &default_times()).unwrap();
    assert_eq!(fam.symbolic().unwrap().j.matrix(), j.matrix());
    assert!(fam.symbolic().unwrap().jdot.is_zero());
    assert!(verify_scaling_lemma(&fam).unwrap().passed());
    let z = Section::zero(j.chart());
    let (r, zt) = dw_criterion_check(&fam, &z).unwrap();
    assert!(r.passed(), "{}", r.to_text());
    assert!(zt.is_some());
    assert!(dw_pipeline(&j, &z, &dw_config()).passed());
}

#[test]
fn linear_entry_scales_linearly() {
    let chart = standard_chart(2).unwrap();
    let j = gcs_from_complex(&chart, &FieldMatrix::from_rows(vec![vec![f("x1"), f("1")], vec![f("-1-x1^2"), f("-x1")]]).unwrap()).unwrap();
    let fam = scaling_family(&j, &default_times()).unwrap();
    let jt = fam.symbolic().unwrap().j.matrix();
    assert_eq!(jt.get(0, 0), &f("-t*x1"));
    assert_eq!(jt.get(1, 0), &f("1+t^2*x1^2"));
    let r = verify_scaling_lemma(&fam).unwrap();
    assert!(r.passed(), "{}", r.to_text());
}

#[test]
fn scaled_symplectic_family_endpoints() {
    let j = area("1+x1^2");
    let fam = scaling_family(&j, &default_times()).unwrap();
    let samples = fam.samples();
    assert_eq!(samples.last().unwrap().j.matrix(), j.matrix());
    assert_eq!(samples[0].j.matrix(), area("1").matrix());
    assert!(verify_scaling_lemma(&fam).unwrap().passed());
    assert!(verify_scaling_lemma(&scaling_family(&area("1+x1"), &default_times()).unwrap()).unwrap().passed());
}

#[test]
fn homotopy_primitive_of_constant_form_is_zero() {
    assert!(symplectic_homotopy_primitive(&area("1")).unwrap().is_zero());
}

#[test]
fn homotopy_primitive_has_the_right_exterior_derivative() {
    for c in ["1+x1", "1+x1^2", "2+x1*x2"] {
        let j = area(c);
        let z = symplectic_homotopy_primitive(&j).unwrap();
        let xi = z.covector_part().to_vec();
        assert!(xi.iter().all(|g| g.vanishes_to_order(2)), "{c}");
        // d xi = -W with W = x . grad of the area density
        let dxi = xi[1].diff(Var::coord(0)) - xi[0].diff(Var::coord(1));
        let dens = f(c);
        let w = ScalarField::coord(0) * &dens.diff(Var::coord(0)) + ScalarField::coord(1) * &dens.diff(Var::coord(1));
        assert_eq!(dxi, w.neg(), "{c}");
    }
    // the x1 case by hand: W = x1 dx1^dx2, xi = -int s^2 x1 (x1 dx2 - x2 dx1) ds
    let z = symplectic_homotopy_primitive(&area("1+x1")).unwrap();
    assert_eq!(z.covector_part(), &[f("1/3*x1*x2"), f("-1/3*x1^2")]);
}

#[test]
fn homotopy_primitive_needs_symplectic_input() {
    let chart = standard_chart(2).unwrap();
    let j = gcs_from_complex(&chart, &crate::gcs::standard_complex_structure(2)).unwrap();
    assert_eq!(symplectic_homotopy_primitive(&j).unwrap_err(), DarbouxError::NotSymplectic);
}

#[test]
fn criterion_passes_for_homotopy_primitive() {
    let j = area("1+x1^2");
    let fam = scaling_family(&j, &default_times()).unwrap();
    let z = symplectic_homotopy_primitive(&j).unwrap();
    let (r, zt) = dw_criterion_check(&fam, &z).unwrap();
    assert!(r.passed(), "{}", r.to_text());
    assert!(r.notes.iter().any(|n| n == DBETA_NOTE));
    // criterion success feeds an exact infinitesimal identity
    let zt = zt.unwrap();
    let prims = primitive_to_vector(&fam, &zt).unwrap();
    assert!(check_infinitesimal(&fam, &prims).unwrap().passed());
}

#[test]
fn linear_term_fails_condition_c() {
    let j = area("1+x1^2");
    let fam = scaling_family(&j, &default_times()).unwrap();
    let chart = j.chart().clone();
    // xi = x1 dx2 through the same dictionary
    let z = Section::new(&chart, vec![f("0"), f("0"), f("0"), f("x1")]).unwrap();
    let sharp = j.matrix().block(0, 2, 2, 2).neg();
    let v: Vec<ScalarField> = sharp.apply(&z.covector_part().to_vec()).iter().map(|g| g.scale(&cq_i())).collect();
    let z = Section::new(&chart, v.into_iter().chain(z.covector_part().to_vec()).collect()).unwrap();
    let (r, zt) = dw_criterion_check(&fam, &z).unwrap();
    assert!(zt.is_none());
    assert!(r.check("(b) beta vanishes at 0").unwrap().passed());
    assert!(!r.check("(c) first partials of beta vanish at 0").unwrap().passed());
    let full = dw_pipeline(&j, &z, &dw_config());
    assert!(!full.passed());
    assert!(full.checks.iter().all(|c| !c.name.starts_with("moser/")));
}

#[test]
fn darboux_weinstein_end_to_end() {
    let j = area("1+x1^2");
    let z = symplectic_homotopy_primitive(&j).unwrap();
    let r = dw_pipeline(&j, &z, &dw_config());
    assert!(r.passed(), "{}", r.to_text());
    assert!(r.check("phi* Omega = Omega(0)").unwrap().passed());
}

#[test]
fn t_integration() {
    assert_eq!(f("3*t^2*x1 + t").integrate_t_unit().unwrap(), f("x1 + 1/2"));
}
