//! Replays the checked-in fuzz corpora and throws random text at every parser.

use std::path::PathBuf;

use gengeo::scenario::Scenario;
use gengeo::symbolic::coeff::{fmt_rational, parse_rational};
use gengeo::symbolic::parse_poly;
use proptest::prelude::*;

fn corpus(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<String> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| std::fs::read_to_string(e.unwrap().path()).unwrap())
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

fn poly_round_trip(src: &str) {
    if let Ok(p) = parse_poly(src) {
        assert_eq!(parse_poly(&p.to_string()).unwrap(), p, "{src}");
    }
}

fn rational_round_trip(src: &str) {
    if let Some(r) = parse_rational(src) {
        assert_eq!(parse_rational(&fmt_rational(&r)), Some(r));
    }
}

fn scenario_total(src: &str) {
    if let Err(e) = Scenario::parse(src) {
        assert!(!e.issues().is_empty());
    }
}

#[test]
fn poly_corpus() {
    corpus("fuzz_poly_parse").iter().for_each(|s| poly_round_trip(s));
}

#[test]
fn rational_corpus() {
    corpus("fuzz_rational_parse").iter().for_each(|s| rational_round_trip(s));
}

#[test]
fn scenario_corpus() {
    let seeds = corpus("fuzz_scenario_parse");
    seeds.iter().for_each(|s| scenario_total(s));
    assert!(seeds.iter().filter(|s| Scenario::parse(s).is_ok()).count() >= 6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn polynomial_like_text(s in "[ x0-9t^*+()/i.-]{0,40}") {
        poly_round_trip(&s);
    }

    #[test]
    fn arbitrary_text(s in "\\PC{0,60}") {
        poly_round_trip(&s);
        rational_round_trip(&s);
        scenario_total(&s);
    }

    #[test]
    fn rational_like_text(s in "[-+0-9./eE ]{0,24}") {
        rational_round_trip(&s);
    }

    #[test]
    fn mutated_scenarios(k in 0usize..6, cut in any::<prop::sample::Index>(), ins in "[\\]\\[{}\",:a-z0-9^ ]{0,6}") {
        let src = gengeo::scenario::EXAMPLES[k].source;
        let at = cut.index(src.len() + 1);
        let at = (0..=at).rev().find(|&i| src.is_char_boundary(i)).unwrap();
        scenario_total(&format!("{}{}{}", &src[..at], ins, &src[at..]));
    }
}
