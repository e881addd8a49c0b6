use gengeo::courant::{standard_chart, EndomorphismField, TupleMode};
use gengeo::liecalc::{check_lie_identities, lie_derivative_endo, lie_derivative_endo_action};
use gengeo::linalg::FieldMatrix;
use gengeo::random::{random_field, rng, trials};
use proptest::prelude::*;

fn endo(chart: &std::sync::Arc<gengeo::courant::CourantChart>, seed: u64) -> EndomorphismField {
    let mut r = rng(seed);
    let n = chart.rank();
    EndomorphismField::new(chart, FieldMatrix::from_fn(n, n, |_, _| random_field(&mut r, chart.dim(), 1, 0.5, false))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn lie_derivative_identities(seed in any::<u64>()) {
        let chart = standard_chart(2).unwrap();
        let (s, fs) = trials(&chart, seed, 3, 1, 2);
        let r = check_lie_identities(&chart, &s, &fs, &[endo(&chart, seed ^ 1)], TupleMode::Window).unwrap();
        prop_assert!(r.passed(), "{}", r.to_text());
    }

    #[test]
    fn lie_derivative_of_an_endomorphism_is_tensorial(seed in any::<u64>()) {
        let chart = standard_chart(2).unwrap();
        let (s, fs) = trials(&chart, seed, 2, 1, 2);
        let j = endo(&chart, seed.wrapping_add(7));
        let (z, y, f) = (&s[0], &s[1], &fs[0]);
        let lhs = lie_derivative_endo_action(z, &j, &y.scale_field(f)).unwrap();
        prop_assert_eq!(lhs, lie_derivative_endo_action(z, &j, y).unwrap().scale_field(f));
        // the assembled matrix acts the same way
        prop_assert_eq!(lie_derivative_endo(z, &j).unwrap().apply(y), lie_derivative_endo_action(z, &j, y).unwrap());
    }
}
