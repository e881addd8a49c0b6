use super::*;
use crate::courant::standard_chart;
use crate::gcs::{holomorphic_bivector, standard_complex_structure};
use crate::linalg::FieldMatrix;
use crate::report::Status;
use crate::symbolic::coeff::{cq_real, rat};
use crate::symbolic::{parse_field, ScalarField, Var};
use nalgebra::DMatrix;

fn f(s: &str) -> ScalarField {
    parse_field(s).unwrap()
}

/// Parses `num` or `num // den` as a quotient of polynomials.
fn q(s: &str) -> ScalarField {
    match s.split_once("//") {
        Some((n, d)) => f(n).div(&f(d)).unwrap(),
        None => f(s),
    }
}

fn mat(rows: &[&[&str]]) -> FieldMatrix {
    FieldMatrix::from_rows(rows.iter().map(|r| r.iter().map(|s| q(s)).collect()).collect()).unwrap()
}

fn col(entries: &[&str]) -> TimeDependent {
    TimeDependent::column(entries.iter().map(|s| q(s)).collect())
}

fn symplectic_source() -> FamilySource {
    FamilySource::Symplectic(TimeDependent::from_matrix(mat(&[&["0", "1+t"], &["-1-t", "0"]])))
}

fn symplectic_family() -> GcsFamily {
    let chart = standard_chart(2).unwrap();
    GcsFamily::new(&chart, symplectic_source(), Representation::Sampled, &default_times()).unwrap()
}

fn xi_family(fam: &GcsFamily, sign: &str) -> SectionFamily {
    SectionFamily::new(fam.chart(), ZSpec::Xi(col(&["0", &format!("{sign}x1")]))).unwrap()
}

fn small_config() -> NumericConfig {
    NumericConfig {
        random_points: 2,
        ..NumericConfig::default()
    }
}

#[test]
fn symplectic_pipeline_passes() {
    let fam = symplectic_family();
    let r = moser_pipeline(&fam, &xi_family(&fam, "-"), &NumericConfig::default());
    assert!(r.passed(), "{}", r.to_text());
    assert!(r.notes.iter().any(|n| n.contains("Omega_dot = -d xi on every slice")));
}

#[test]
fn symplectic_jdot_matches_hand_derivative() {
    let fam = symplectic_family();
    let s = &fam.samples()[3];
    let t = s.t.clone().unwrap();
    let c = rat(-1, 1) / ((Rational::from_integer(1.into()) + &t) * (Rational::from_integer(1.into()) + &t));
    // Omega_dot flat = [[0, -1], [1, 0]]; d/dt of -pi# = [[0, 1], [-1, 0]] / (1+t)^2
    let want = FieldMatrix::from_rows(vec![
        vec![ScalarField::zero(), ScalarField::zero(), ScalarField::zero(), ScalarField::rational(-c.clone())],
        vec![ScalarField::zero(), ScalarField::zero(), ScalarField::rational(c), ScalarField::zero()],
        vec![ScalarField::zero(), ScalarField::int(-1), ScalarField::zero(), ScalarField::zero()],
        vec![ScalarField::one(), ScalarField::zero(), ScalarField::zero(), ScalarField::zero()],
    ])
    .unwrap();
    assert_eq!(s.jdot, want);
}

#[test]
fn polynomial_representation_agrees_with_samples() {
    let chart = standard_chart(2).unwrap();
    let poly = GcsFamily::new(&chart, symplectic_source(), Representation::PolyInT, &default_times()).unwrap();
    let sampled = symplectic_family();
    let sym = poly.symbolic().unwrap();
    assert!(sym.jdot.depends_on(Var::T));
    for (a, b) in poly.samples().iter().zip(sampled.samples()) {
        assert_eq!(a.j.matrix(), b.j.matrix());
        assert_eq!(a.jdot, b.jdot);
    }
    let r = moser_pipeline(&poly, &xi_family(&poly, "-"), &small_config());
    assert!(r.passed(), "{}", r.to_text());
    assert_eq!(poly.check_slices().len(), 1);
    assert_eq!(r.check("Jdot + L_x J = 0").unwrap().residual, crate::report::Residual::Terms(0));
}

#[test]
fn exponential_profiles_refuse_polynomial_mode() {
    let chart = standard_chart(2).unwrap();
    let td = TimeDependent::new(vec![(TimeProfile::Exp(rat(1, 1)), mat(&[&["0", "1"], &["-1", "0"]]))]).unwrap();
    let e = GcsFamily::new(&chart, FamilySource::Symplectic(td), Representation::PolyInT, &default_times()).unwrap_err();
    assert!(matches!(e, MoserError::NotSymbolic(_)));
}

#[test]
fn generator_is_minus_x_over_one_plus_t() {
    let fam = symplectic_family();
    let z = xi_family(&fam, "-");
    let gen = z.generator(&fam).unwrap().symbolic().unwrap();
    let want = f("-x1").div(&f("1+t")).unwrap();
    assert_eq!(gen.get(0, 0), &want);
    assert!(gen.get(1, 0).is_zero() && gen.get(2, 0).is_zero() && gen.get(3, 0).is_zero());
    let prims = primitive_to_vector(&fam, &z).unwrap();
    for p in &prims {
        let t = p.t.clone().unwrap();
        let scale = cq_real(rat(-1, 1) / (Rational::from_integer(1.into()) + t));
        assert_eq!(p.x.coeff(0), &f("x1").scale(&scale));
        assert!(p.x.coeff(1).is_zero());
    }
}

#[test]
fn wrong_sign_primitive_is_reported() {
    let fam = symplectic_family();
    let r = moser_pipeline(&fam, &xi_family(&fam, ""), &small_config());
    assert!(!r.passed());
    assert!(!r.check("Jdot + L_x J = 0").unwrap().passed());
    assert!(r.notes.iter().any(|n| n.contains("opposite generator")), "{:?}", r.notes);
}

#[test]
fn constant_family_with_zero_section() {
    let chart = standard_chart(2).unwrap();
    let td = TimeDependent::from_matrix(mat(&[&["0", "1"], &["-1", "0"]]));
    let fam = GcsFamily::new(&chart, FamilySource::Symplectic(td), Representation::Sampled, &default_times()).unwrap();
    assert!(omega_dot(&fam).iter().all(|(_, w)| w.is_zero()));
    let r = moser_pipeline(&fam, &SectionFamily::zero(&chart), &small_config());
    assert!(r.passed(), "{}", r.to_text());
    let ident = r.check("Phi^-1 J_t Phi = J_0").unwrap();
    assert_eq!(ident.residual, crate::report::Residual::Value(0.0));
}

#[test]
fn non_integrable_perturbation_breaks_the_cocycle() {
    let chart = standard_chart(2).unwrap();
    // symplectic J_t with x1^2 added to one entry
    let j = mat(&[
        &["0", "0", "0", "-1//1+t"],
        &["0", "0", "1//1+t", "0"],
        &["0", "-1-t", "0", "0"],
        &["1+t", "0", "x1^2", "0"],
    ]);
    let fam = GcsFamily::new(&chart, FamilySource::Raw(TimeDependent::from_matrix(j)), Representation::Sampled, &default_times()).unwrap();
    let r = check_cocycle(&fam).unwrap();
    let c = r.check("d_L omega_dot = 0").unwrap();
    assert!(!c.passed());
    assert!(c.location.as_deref().unwrap().contains("triple"));
}

#[test]
fn section_outside_l_is_rejected() {
    let fam = symplectic_family();
    let z = SectionFamily::new(fam.chart(), ZSpec::Z(col(&["1", "0", "0", "0"]))).unwrap();
    let e = primitive_to_vector(&fam, &z).unwrap_err();
    assert!(matches!(e, MoserError::NotInL { .. }));
    let r = moser_pipeline(&fam, &z, &small_config());
    assert_eq!(r.overall, Status::Error);
    assert!(r.failures().any(|c| c.name == "primitive_to_vector"));
}

#[test]
fn generator_is_imaginary_part() {
    let fam = symplectic_family();
    // z = J x + i x with x = d/dx2
    let zx = SectionFamily::new(fam.chart(), ZSpec::X(col(&["0", "1", "0", "0"]))).unwrap();
    let prims = primitive_to_vector(&fam, &zx).unwrap();
    for (p, s) in prims.iter().zip(fam.samples()) {
        assert_eq!(p.x.coeffs(), &[f("0"), f("1"), f("0"), f("0")]);
        assert_eq!(p.z.re(), s.j.endomorphism().apply(&p.x));
    }
    // complex structure: L contains d/dx1 + i d/dx2, and i times it
    let chart = fam.chart().clone();
    let jc = crate::gcs::gcs_from_complex(&chart, &standard_complex_structure(2)).unwrap();
    let cfam = GcsFamily::new(&chart, FamilySource::Raw(TimeDependent::from_matrix(jc.matrix().clone())), Representation::Sampled, &[rat(0, 1), rat(1, 1)]).unwrap();
    for (z, want) in [(["1", "i"], ["0", "1"]), (["i", "-1"], ["1", "0"])] {
        let zs = SectionFamily::new(&chart, ZSpec::Z(col(&[z[0], z[1], "0", "0"]))).unwrap();
        let p = primitive_to_vector(&cfam, &zs).unwrap();
        assert_eq!(p[0].x.coeffs(), &[f(want[0]), f(want[1]), f("0"), f("0")]);
    }
}

fn plane() -> std::sync::Arc<crate::courant::CourantChart> {
    standard_chart(2).unwrap()
}

fn compiled(entries: &[&str]) -> CompiledGenerator {
    CompiledGenerator::new(&plane(), &col(entries)).unwrap()
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

#[test]
fn covector_generator_adds_the_contraction() {
    // xi = x dy: Phi(d/dx) = d/dx + t dy, Phi(d/dy) = d/dy - t dx
    let g = compiled(&["0", "0", "0", "x1"]);
    let grid = numeric_grid(2, 5, 5, 1);
    let flow = integrate_flow(&g, 0.0, 1.0, &grid, 100, 10.0).unwrap();
    let mut want = DMatrix::<f64>::identity(4, 4);
    want[(3, 0)] = 1.0;
    want[(2, 1)] = -1.0;
    for fp in &flow.points {
        assert_eq!(fp.start, fp.end);
        assert!(max_abs(&(&fp.fiber - &want)) <= 1e-12);
    }
    assert!(pairing_check(&flow, 1e-8).passed());
}

#[test]
fn translation_flow() {
    let g = compiled(&["1", "0", "0", "0"]);
    let flow = integrate_flow(&g, 0.25, 0.75, &[vec![0.5, -1.0]], 10, 10.0).unwrap();
    let fp = &flow.points[0];
    assert!((fp.end[0] - 1.0).abs() < 1e-14 && (fp.end[1] + 1.0).abs() < 1e-14);
    assert!(max_abs(&(&fp.fiber - DMatrix::<f64>::identity(4, 4))) < 1e-14);
    assert_eq!(flow.integrator_order, 4);
}

#[test]
fn symplectic_flow_halves_x() {
    let fam = symplectic_family();
    let gen = xi_family(&fam, "-").generator(&fam).unwrap();
    let g = CompiledGenerator::new(fam.chart(), &gen).unwrap();
    let grid = numeric_grid(2, 5, 0, 0);
    assert_eq!(grid.len(), 25);
    let flow = integrate_flow(&g, 0.0, 1.0, &grid, 100, 10.0).unwrap();
    for fp in &flow.points {
        assert!((fp.end[0] - fp.start[0] / 2.0).abs() <= 1e-6);
        assert!((fp.end[1] - fp.start[1]).abs() <= 1e-6);
    }
}

#[test]
fn fiber_map_solves_its_linear_equation() {
    // mixed generator X = (1 + t x2) d/dx1 + x1 d/dx2, xi = x1 x2 dx1 + (x1^2 + t) dx2;
    // Phi' = [[DX, 0], [M, -DX^T]] Phi with M[y][x] = x1 = -M[x][y]
    let g = compiled(&["1+t*x2", "x1", "x1*x2", "x1^2+t"]);
    let p = vec![0.3, -0.2];
    let (a, b, h) = (0.0, 0.6, 1e-4);
    let at = |b: f64| integrate_flow(&g, a, b, &[p.clone()], 400, 10.0).unwrap().points.remove(0);
    let mid = at(b);
    let deriv = (at(b + h).fiber - at(b - h).fiber) / (2.0 * h);
    let (x1, _x2) = (mid.end[0], mid.end[1]);
    let mut gen = DMatrix::<f64>::zeros(4, 4);
    gen[(0, 1)] = b;
    gen[(1, 0)] = 1.0;
    gen[(2, 3)] = -1.0;
    gen[(3, 2)] = -b;
    gen[(3, 0)] = x1;
    gen[(2, 1)] = -x1;
    let want = gen * &mid.fiber;
    assert!(max_abs(&(deriv - want)) < 1e-6);
}

#[test]
fn group_law_and_pairing_for_a_mixed_generator() {
    let g = compiled(&["1+t*x2", "x1", "x1*x2", "x1^2+t"]);
    let grid = numeric_grid(2, 5, 5, 3);
    let c = group_law_check(&g, 0.0, 1.0, &grid, 100, 10.0, 1e-6).unwrap();
    assert!(c.passed(), "{c:?}");
    let flow = integrate_flow(&g, 0.0, 1.0, &grid, 100, 10.0).unwrap();
    assert!(pairing_check(&flow, 1e-8).passed());
}

#[test]
fn escaping_trajectory_is_an_error() {
    let g = compiled(&["x1^2", "0", "0", "0"]);
    let e = integrate_flow(&g, 0.0, 1.0, &[vec![1.0, 0.0]], 100, 10.0).unwrap_err();
    assert!(matches!(e, MoserError::Escaped { .. }), "{e}");
}

#[test]
fn simpson_on_odd_meshes() {
    // x = t^3 dy along a fixed point: C = int_0^1 t^3 dt contraction, exact for Simpson and 3/8
    for steps in [1usize, 2, 3, 5, 8] {
        let g = compiled(&["0", "0", "0", "x1*t^2"]);
        let fp = integrate_flow(&g, 0.0, 1.0, &[vec![0.5, 0.5]], steps, 10.0).unwrap().points.remove(0);
        let want = if steps == 1 { 0.5 } else { 1.0 / 3.0 };
        assert!((fp.fiber[(3, 0)] - want).abs() < 1e-14, "{steps}: {}", fp.fiber[(3, 0)]);
    }
}

#[test]
fn exponential_profile_derivative() {
    let td = TimeDependent::new(vec![(TimeProfile::Exp(rat(2, 1)), mat(&[&["t"]]))]).unwrap();
    let d = td.derivative();
    // d/dt (t e^{2t}) = (2t + 1) e^{2t}
    assert_eq!(d.terms()[0].1, mat(&[&["2*t+1"]]));
    assert_eq!(td.at(&rat(0, 1)).unwrap(), mat(&[&["0"]]));
    let num = td.compile(&[Var::coord(0)]);
    assert!((num.eval(0.5, &[0.0])[(0, 0)] - 0.5 * 1f64.exp()).abs() < 1e-14);
}

#[test]
fn finite_difference_samples() {
    let chart = plane();
    // J_t from (1 + t) dx^dy given pointwise without derivatives
    let fam = symplectic_family();
    let samples: Vec<_> = fam.samples().iter().map(|s| (s.t.clone().unwrap(), s.j.matrix().clone(), None)).collect();
    let fd = GcsFamily::new(&chart, FamilySource::Samples(samples.clone()), Representation::Sampled, &[]).unwrap();
    assert!(fd.samples().iter().all(|s| !s.exact_jdot));
    let prims = primitive_to_vector(&fd, &SectionFamily::new(&chart, ZSpec::X(col(&["-x1//1+t", "0", "0", "0"]))).unwrap()).unwrap();
    let r = check_infinitesimal(&fd, &prims).unwrap();
    let c = r.check("Jdot + L_x J = 0").unwrap();
    assert_eq!(c.kind, crate::report::CheckKind::Numeric);
    // the three-point rule is only second order in the sample gap
    match c.residual {
        crate::report::Residual::Value(v) => assert!(v < 5e-2 && v > 0.0, "{v}"),
        _ => panic!("numeric residual expected"),
    }
    let e = GcsFamily::new(&chart, FamilySource::Samples(samples[..2].to_vec()), Representation::Sampled, &[]).unwrap_err();
    assert_eq!(e, MoserError::TooFewSamples(2));

    // entries quadratic in t: the three-point rule is exact
    let j = TimeDependent::from_matrix(mat(&[&["t", "1"], &["-1-t^2", "-t"]]));
    let exact = GcsFamily::new(&chart, FamilySource::Complex(j), Representation::Sampled, &default_times()).unwrap();
    let samples: Vec<_> = exact.samples().iter().map(|s| (s.t.clone().unwrap(), s.j.matrix().clone(), None)).collect();
    let fd = GcsFamily::new(&chart, FamilySource::Samples(samples), Representation::Sampled, &[]).unwrap();
    for (a, b) in fd.samples().iter().zip(exact.samples()) {
        assert_eq!(a.jdot, b.jdot);
    }
    assert!(check_cocycle(&fd).unwrap().passed());
}

fn holo_family() -> (GcsFamily, SectionFamily) {
    let chart = standard_chart(4).unwrap();
    let j = standard_complex_structure(4);
    let pi0 = holomorphic_bivector(4, &[(0, 1, f("x1 + i*x2"))]);
    let pi = TimeDependent::new(vec![(TimeProfile::Exp(rat(1, 1)), pi0)]).unwrap();
    let fam = GcsFamily::new(&chart, FamilySource::HoloPoisson { j, pi }, Representation::Sampled, &default_times()).unwrap();
    let x10 = holomorphic_vector(4, &[(1, f("x3 + i*x4"))]);
    let z = SectionFamily::new(&chart, ZSpec::X10(TimeDependent::column(x10))).unwrap();
    (fam, z)
}

#[test]
fn holomorphic_poisson_pipeline() {
    let (fam, z) = holo_family();
    let gen = z.generator(&fam).unwrap().symbolic().unwrap();
    assert_eq!(gen.column(0), vec![f("0"), f("0"), f("x3"), f("x4"), f("0"), f("0"), f("0"), f("0")]);
    let r = moser_pipeline(&fam, &z, &small_config());
    assert!(r.passed(), "{}", r.to_text());
    for name in ["pi_dot = [pi, X^{1,0}]", "X^{1,0} is holomorphic of type (1,0)", "Theta* omega_dot = -i Hdot"] {
        assert!(r.check(name).unwrap().passed(), "{name}");
    }
    let g = CompiledGenerator::new(fam.chart(), &z.generator(&fam).unwrap()).unwrap();
    let flow = integrate_flow(&g, 0.0, 1.0, &[vec![0.5, -0.5, 0.25, 1.0]], 100, 10.0).unwrap();
    let e = 1f64.exp();
    let want = [0.5, -0.5, 0.25 * e, e];
    for (a, b) in flow.points[0].end.iter().zip(want) {
        assert!((a - b).abs() < 1e-8);
    }
}

#[test]
fn non_holomorphic_vector_fails_the_family_equation() {
    let (fam, _) = holo_family();
    let x10 = holomorphic_vector(4, &[(1, f("x3 - i*x4"))]);
    let z = SectionFamily::new(fam.chart(), ZSpec::X10(TimeDependent::column(x10))).unwrap();
    let r = translation_checks(&fam, &z).unwrap();
    assert!(!r.check("X^{1,0} is holomorphic of type (1,0)").unwrap().passed());
}

#[test]
fn grid_is_deterministic() {
    assert_eq!(numeric_grid(3, 5, 5, 9), numeric_grid(3, 5, 5, 9));
    let g = numeric_grid(2, 5, 5, 9);
    assert_eq!(g.len(), 30);
    assert!(g.iter().all(|p| p.iter().all(|x| x.abs() <= 1.0)));
}

#[test]
fn complex_translation_layer() {
    let chart = plane();
    let j = TimeDependent::from_matrix(mat(&[&["t", "1"], &["-1-t^2", "-t"]]));
    let fam = GcsFamily::new(&chart, FamilySource::Complex(j), Representation::PolyInT, &default_times()).unwrap();
    let r = translation_checks(&fam, &SectionFamily::zero(&chart)).unwrap();
    assert!(r.passed(), "{}", r.to_text());
    assert!(check_cocycle(&fam).unwrap().passed());
}
