use turan_core::golden::{compare, GoldenFile, GoldenFn};
use turan_core::ratio::bounds;
use turan_core::{Order, QuadratureConfig};

const GOLDEN: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/golden.json");

#[test]
fn committed_file_is_well_formed() {
    let f = GoldenFile::from_path(GOLDEN).unwrap();
    assert_eq!(f.entries.len(), 9 * 14 * 3);
    for e in f.entries.iter().filter(|e| e.func == GoldenFn::R) {
        let (lo, hi) = bounds(Order::new(e.nu).unwrap());
        let r = e.reference_log().unwrap().exp();
        assert!(r > lo && r < hi);
    }
    // linear values are only present where they fit in a double
    for e in &f.entries {
        let l = e.reference_log().unwrap();
        assert_eq!(e.value.is_some(), l.abs() < 700.0);
    }
}

#[test]
fn every_entry_matches_including_ratios() {
    let f = GoldenFile::from_path(GOLDEN).unwrap();
    let checks = compare(&f, 1e-12, &QuadratureConfig::default()).unwrap();
    let bad: Vec<_> = checks.iter().filter(|c| !c.pass).collect();
    assert!(bad.is_empty(), "{bad:?}");
    let worst = checks.iter().map(|c| c.abs_diff).fold(0.0, f64::max);
    assert!(worst < 1e-10, "worst absolute log error {worst}");
}
