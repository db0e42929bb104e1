use incmat::stats::identity_suite;

#[test]
fn suite_passes_with_census() {
    let report = identity_suite(6).unwrap();
    assert!(report.all_passed(), "{report}");
    assert_eq!(report.oracle_n_max, 6);
}

#[test]
fn suite_passes_formula_only_range() {
    let report = identity_suite(12).unwrap();
    assert!(report.all_passed(), "{report}");
    assert_eq!(report.oracle_n_max, 6);
}

#[test]
fn suite_is_reproducible() {
    let a = serde_json::to_string(&identity_suite(4).unwrap()).unwrap();
    let b = serde_json::to_string(&identity_suite(4).unwrap()).unwrap();
    assert_eq!(a, b);
}
