use incmat::stats::{statistical_suite, STANDARD_SEED};

#[test]
fn standard_statistical_suite_passes() {
    let t = std::time::Instant::now();
    let report = statistical_suite(STANDARD_SEED).unwrap();
    eprintln!("{report}elapsed {:?}", t.elapsed());
    assert!(report.all_passed(), "{report}");
}
