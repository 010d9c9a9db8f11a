use hqm_core::convergence::Verdict;
use hqm_core::identities::{run_battery, BatteryOptions};

#[test]
fn battery_converges_or_is_exact() {
    let cases = run_battery(&BatteryOptions::default()).unwrap();
    for c in &cases {
        println!("{:<22} {:<16} coarse {:.3e} fine {:.3e} scale {:.3e} {}", c.name, c.setting, c.coarse, c.fine, c.scale, c.verdict);
    }
    for c in &cases {
        assert!(c.verdict.passed(), "{} / {}: {}", c.name, c.setting, c.verdict);
    }
}

#[test]
fn flipped_kappa_breaks_field_strength_identity() {
    let opts = BatteryOptions { flip_kappa: true, only: vec!["l8".into()], ..Default::default() };
    let cases = run_battery(&opts).unwrap();
    let l8: Vec<_> = cases.iter().filter(|c| c.name == "l8").collect();
    assert!(l8.iter().any(|c| !c.verdict.passed()));
}

#[test]
fn one_dimensional_battery_skips_gauge_identities() {
    let opts = BatteryOptions { dims: 1, ..Default::default() };
    let cases = run_battery(&opts).unwrap();
    assert!(cases.iter().filter(|c| c.name.starts_with('l')).all(|c| c.verdict == Verdict::Skipped));
    assert!(cases.iter().filter(|c| c.name.starts_with('v')).all(|c| c.verdict.passed()));
}
