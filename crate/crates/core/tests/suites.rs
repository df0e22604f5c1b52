use limitset::theoremlab::{run_suite, run_suites, suite_ids};

const RANDOMIZED: &[&str] = &[
    "kuratowski_equality",
    "compactness_equivalences",
    "pseudometrizable_equivalence",
    "sequential_limits",
    "semidistance_criteria",
    "omega_consistency",
];

#[test]
fn randomized_suites_pass_at_small_budget() {
    for id in RANDOMIZED {
        let r = run_suite(id, 60, 3).unwrap();
        assert!(r.passed(), "{id}: {:?}", r.violations);
        assert_eq!(r.unknowns, 0, "{id}");
        assert!(r.instances > 0, "{id}");
    }
}

#[test]
fn reports_depend_only_on_budget_and_seed() {
    for id in RANDOMIZED {
        let a = serde_json::to_string(&run_suite(id, 40, 11).unwrap()).unwrap();
        let b = serde_json::to_string(&run_suite(id, 40, 11).unwrap()).unwrap();
        assert_eq!(a, b, "{id}");
    }
}

#[test]
fn traps_are_one_in_five() {
    let r = run_suite("pseudometrizable_equivalence", 100, 1).unwrap();
    assert_eq!(r.counter("traps"), 20);
}

#[test]
fn selection_and_registry() {
    assert_eq!(suite_ids().len(), 10);
    assert_eq!(run_suites("semidistance_criteria", 5, 0).unwrap().len(), 1);
    assert!(run_suites("everything", 5, 0).is_err());
}
