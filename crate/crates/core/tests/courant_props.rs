use gengeo::courant::{
    anchor_apply, check_axioms, check_dorfman_identities, courant_bracket, d_operator, dorfman_bracket, pairing, standard_chart, TupleMode,
};
use gengeo::random::trials;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn bracket_is_skew_and_dorfman_splits(seed in any::<u64>(), d in 1usize..=3) {
        let chart = standard_chart(d).unwrap();
        let (s, fs) = trials(&chart, seed, 3, 1, 2);
        let (a, b) = (&s[0], &s[1]);
        let ab = courant_bracket(a, b).unwrap();
        let ba = courant_bracket(b, a).unwrap();
        prop_assert!((&ab + &ba).is_zero());
        let dab = dorfman_bracket(a, b).unwrap();
        let dba = dorfman_bracket(b, a).unwrap();
        prop_assert_eq!(&dab - &dba, ab.scale(&gengeo::symbolic::coeff::cq_int(2)));
        let sym = d_operator(&chart, &pairing(a, b).unwrap()).scale(&gengeo::symbolic::coeff::cq_int(2));
        prop_assert_eq!(&dab + &dba, sym);
        // D f is in the left kernel of the Dorfman bracket
        prop_assert!(dorfman_bracket(&d_operator(&chart, &fs[0]), a).unwrap().is_zero());
        // rho(a) <b, c> = <a o b, c> + <b, a o c>
        let c = &s[2];
        let lhs = anchor_apply(a, &pairing(b, c).unwrap());
        let rhs = pairing(&dab, c).unwrap() + pairing(b, &dorfman_bracket(a, c).unwrap()).unwrap();
        prop_assert!((lhs - rhs).is_zero());
    }

    #[test]
    fn standard_charts_satisfy_every_axiom(seed in any::<u64>(), d in 1usize..=3) {
        let chart = standard_chart(d).unwrap();
        let (s, fs) = trials(&chart, seed, 4, 2, 2);
        let r = check_axioms(&chart, &s, &fs).unwrap();
        prop_assert!(r.passed(), "{}", r.to_text());
        let r = check_dorfman_identities(&chart, &s, &fs, TupleMode::Window).unwrap();
        prop_assert!(r.passed(), "{}", r.to_text());
    }
}
