use gengeo::random::{random_field, random_point, rng};
use gengeo::symbolic::coeff::cq_to_c64;
use gengeo::symbolic::{parse_field, ScalarField, Var};
use num_complex::Complex64;
use proptest::prelude::*;

fn field(seed: u64, complex: bool) -> ScalarField {
    random_field(&mut rng(seed), 3, 3, 0.3, complex)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (f, g, h) = (field(a, true), field(b, true), field(c, false));
        prop_assert_eq!((&f * &g) * &h, &f * &(&g * &h));
        prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
        prop_assert_eq!(&f * &g, &g * &f);
        prop_assert!((&f - &f).is_zero());
    }

    #[test]
    fn partials_commute(a in any::<u64>(), mu in 0usize..3, nu in 0usize..3) {
        let f = field(a, true);
        prop_assert_eq!(f.diff(Var::coord(mu)).diff(Var::coord(nu)), f.diff(Var::coord(nu)).diff(Var::coord(mu)));
    }

    #[test]
    fn conjugation_is_a_ring_involution(a in any::<u64>(), b in any::<u64>()) {
        let (f, g) = (field(a, true), field(b, true));
        prop_assert_eq!((&f * &g).conj(), &f.conj() * &g.conj());
        prop_assert_eq!(f.conj().conj(), f.clone());
        prop_assert_eq!(&f.re() + &f.im().scale(&gengeo::symbolic::coeff::cq_i()), f);
    }

    #[test]
    fn central_differences_match_partials(a in any::<u64>(), p in any::<u64>(), mu in 0usize..3) {
        let f = field(a, false);
        let point: Vec<f64> = random_point(&mut rng(p), 3).iter().map(|c| cq_to_c64(c).re).collect();
        let at = |x: &[f64]| -> f64 {
            let z: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            f.evaluate_f64(&z).unwrap().re
        };
        let exact = {
            let z: Vec<Complex64> = point.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            f.diff(Var::coord(mu)).evaluate_f64(&z).unwrap().re
        };
        // |f'''| <= 6 * (sum of cubic coefficients), at most 10 cubic monomials in 3 variables
        let c = 6.0 * f.max_abs_coeff() * 10.0 + 1.0;
        for h in [1e-3, 1e-4] {
            let mut up = point.clone();
            let mut down = point.clone();
            up[mu] += h;
            down[mu] -= h;
            let fd = (at(&up) - at(&down)) / (2.0 * h);
            // h^2 truncation plus rounding of the difference quotient
            let bound = c * h * h + 1e-12 * (1.0 + at(&point).abs()) / h;
            prop_assert!((fd - exact).abs() <= bound, "h = {h}: {fd} vs {exact}");
        }
    }

    #[test]
    fn display_round_trips_through_the_parser(a in any::<u64>()) {
        let f = field(a, true);
        prop_assert_eq!(parse_field(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn scaling_multiplies_by_t_to_the_degree(a in any::<u64>()) {
        let f = field(a, true);
        let scaled = f.substitute_scale().unwrap();
        let one = gengeo::symbolic::coeff::cq_int(1);
        prop_assert_eq!(scaled.substitute(Var::T, &one).unwrap(), f.clone());
        prop_assert!(scaled.substitute_scale().is_err());
        // each homogeneous part of degree k picks up t^k
        let zero = gengeo::symbolic::coeff::cq_int(0);
        prop_assert_eq!(scaled.substitute(Var::T, &zero).unwrap(), ScalarField::constant(f.evaluate(&[zero.clone(), zero.clone(), zero]).unwrap()));
    }
}

#[test]
fn scaling_examples() {
    let p = |s: &str| parse_field(s).unwrap();
    assert_eq!(p("x1^2").substitute_scale().unwrap(), p("t^2*x1^2"));
    assert_eq!(p("5/3").substitute_scale().unwrap(), p("5/3"));
    assert_eq!(p("x1 + x1*x2").substitute_scale().unwrap(), p("t*x1 + t^2*x1*x2"));
}
