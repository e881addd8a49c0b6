use super::*;
use crate::report::Status;

#[test]
fn every_example_parses() {
    for e in EXAMPLES {
        Scenario::parse(e.source).unwrap_or_else(|err| panic!("{}: {err}", e.name));
    }
    assert!(example("dw_symplectic.json").is_some());
    assert!(example("nope").is_none());
}

#[test]
fn minimal_axioms_scenario() {
    let s = Scenario::parse(r#"{"task": "axioms", "chart": {"type": "standard", "dim": 1}}"#).unwrap();
    assert_eq!(s.task, Task::Axioms);
    assert_eq!(s.chart.dim(), 1);
    let r = s.run();
    assert!(r.passed(), "{}", r.to_text());
    assert_eq!(r.scenario_hash.as_deref(), Some(s.hash().as_str()));
}

#[test]
fn misspelled_task_names_the_valid_ones() {
    let e = Scenario::parse("{\"task\": \"mosr\",\n \"chart\": {\"type\": \"standard\", \"dim\": 1}}").unwrap_err();
    let i = &e.issues()[0];
    assert_eq!(i.field, "task");
    assert_eq!(i.line, Some(1));
    for t in Task::NAMES {
        assert!(i.message.contains(t));
    }
}

#[test]
fn grammar_error_carries_position_and_line() {
    let src = "{\n\"task\": \"check-gcs\",\n\"chart\": {\"type\": \"standard\", \"dim\": 2},\n\"omega\": [[\"0\", \"x1^^2\"], [\"0\", \"0\"]]\n}";
    let e = Scenario::parse(src).unwrap_err();
    let i = &e.issues()[0];
    assert_eq!(i.field, "omega[0][1]");
    assert_eq!(i.line, Some(4));
    assert!(i.message.contains("position"), "{}", i.message);
}

#[test]
fn unknown_fields_are_rejected_with_a_line() {
    let e = Scenario::parse("{\"task\": \"axioms\",\n\"chart\": {\"type\": \"standard\", \"dim\": 1},\n\"colour\": 3}").unwrap_err();
    let i = &e.issues()[0];
    assert_eq!(i.line, Some(3));
    assert!(i.message.contains("colour"));
}

#[test]
fn all_issues_are_collected() {
    let src = r#"{"task": "moser", "chart": {"type": "standard", "dim": 2},
      "family": {"rep": "poly", "source": "omega", "terms": [{"matrix": [["0", "1+"], ["-1", "0"]]}]},
      "z_family": {"kind": "xi", "column": ["x1", "x2", "x1"]},
      "numeric": {"t_samples": ["0", "1/2", "1/3"]}}"#;
    let e = Scenario::parse(src).unwrap_err();
    let fields: Vec<&str> = e.issues().iter().map(|i| i.field.as_str()).collect();
    assert!(fields.contains(&"family.terms[0].matrix[0][1]"), "{fields:?}");
    assert!(fields.contains(&"z_family.terms[0].column"), "{fields:?}");
    assert!(fields.contains(&"numeric.t_samples"), "{fields:?}");
}

#[test]
fn shape_and_reference_errors() {
    let e = Scenario::parse(r#"{"task": "check-gcs", "chart": {"type": "standard", "dim": 2}, "J": [["1"]]}"#).unwrap_err();
    assert_eq!(e.issues()[0].field, "J");
    let e = Scenario::parse(r#"{"task": "moser", "chart": {"type": "standard", "dim": 2}}"#).unwrap_err();
    assert_eq!(e.issues()[0].field, "family");
    let e = Scenario::parse(r#"{"task": "dw", "chart": {"type": "standard", "dim": 2}, "omega": [["0","1"],["-1","0"]], "j": [["0","-1"],["1","0"]]}"#)
        .unwrap_err();
    assert_eq!(e.issues()[0].field, "scenario");
}

#[test]
fn structure_keys() {
    assert_eq!(structure_key("c^3_12"), Some((3, 1, 2)));
    assert_eq!(structure_key("c^10_2,11"), Some((10, 2, 11)));
    assert_eq!(structure_key("c3_12"), None);
    assert_eq!(structure_key("c^1_123"), None);
}

#[test]
fn non_jacobi_double_fails_axiom_ii() {
    // [e1, e2] = e2, [e2, e3] = e1, [e1, e3] = 0 violates Jacobi
    let src = r#"{"task": "axioms", "chart": {"type": "double", "anchor": [["0", "0", "0"]],
        "structure": {"c^2_12": "1", "c^1_23": "1"}}, "trials": {"sections": 4, "functions": 2}}"#;
    let r = Scenario::parse(src).unwrap().run();
    assert!(!r.passed());
    let jac: Vec<_> = r.checks.iter().filter(|c| c.name.starts_with("axioms/") && c.name.contains("jacobiator")).collect();
    assert!(!jac.is_empty() && jac.iter().all(|c| !c.passed()), "{}", r.to_text());
}

#[test]
fn check_gcs_task_and_domain_errors() {
    let ok = Scenario::parse(r#"{"task": "check-gcs", "chart": {"type": "standard", "dim": 2}, "omega": [["0", "1 + x1"], ["-1 - x1", "0"]]}"#)
        .unwrap()
        .run();
    assert!(ok.passed(), "{}", ok.to_text());
    // x2 dx1^dx2 + ... is not closed in dimension 3
    let bad = Scenario::parse(
        r#"{"task": "check-gcs", "chart": {"type": "standard", "dim": 2}, "omega": [["0", "1 + x1"], ["-1 - x1", "0"]], "pi": [["0","1"],["-1","0"]]}"#,
    );
    assert!(bad.is_err());
    let deg = Scenario::parse(r#"{"task": "check-gcs", "chart": {"type": "standard", "dim": 2}, "omega": [["0", "x1"], ["-x1", "0"]]}"#)
        .unwrap()
        .run();
    assert_eq!(deg.overall, Status::Error);
    assert_eq!(deg.checks[0].name, "structure");
}

#[test]
fn overrides_change_the_hash() {
    let mut s = Scenario::parse(example("symplectic_moser").unwrap().source).unwrap();
    let h = s.hash();
    s.apply_overrides(None, None, None);
    assert_eq!(s.hash(), h);
    s.apply_overrides(Some(50), None, Some(3));
    assert_ne!(s.hash(), h);
    assert_eq!(s.numeric.steps, 50);
    assert_eq!(s.numeric.seed, 3);
}

#[test]
fn degree_is_tracked() {
    let s = Scenario::parse(r#"{"task": "dw", "chart": {"type": "standard", "dim": 2}, "omega": [["0", "1 + x1^2*x2^3"], ["-1 - x1^2*x2^3", "0"]]}"#).unwrap();
    assert_eq!(s.max_degree(), 5);
}

#[test]
fn complex_example_passes() {
    let r = Scenario::parse(example("complex_moser").unwrap().source).unwrap().run();
    assert!(r.passed(), "{}", r.to_text());
}
