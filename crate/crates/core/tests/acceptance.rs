//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! per sub-check. Run with `cargo test --test acceptance -- --nocapture` to
//! see every line.

use nsp_core::checks;

fn assert_report(report: nsp_core::checks::CheckReport) {
    print!("{}", report.render());
    assert!(
        report.passed(),
        "criterion '{}' failed:\n{}",
        report.name,
        report.render()
    );
}

#[test]
fn criterion_1_profile_rates() {
    assert_report(checks::profile_rates().expect("profile rates check runs"));
}

#[test]
fn criterion_2_profile_exactness() {
    assert_report(checks::profile_exactness().expect("profile exactness check runs"));
}

#[test]
fn criterion_3_elliptic_solver() {
    assert_report(checks::elliptic_solver().expect("elliptic solver check runs"));
}

#[test]
fn criterion_4_onefluid_stability() {
    assert_report(checks::onefluid_stability().expect("one-fluid stability check runs"));
}

#[test]
fn criterion_5_twofluid_stability() {
    assert_report(checks::twofluid_stability().expect("two-fluid stability check runs"));
}

#[test]
fn criterion_6_linear_modes() {
    assert_report(checks::linear_modes().expect("linear modes check runs"));
}

#[test]
fn criterion_7_cross_validation() {
    assert_report(checks::cross_validation().expect("cross validation check runs"));
}

#[test]
fn criterion_8_scheme_order() {
    assert_report(checks::scheme_order().expect("scheme order check runs"));
}

#[test]
fn criterion_9_oracle_equivalence() {
    assert_report(checks::oracle_equivalence().expect("oracle equivalence check runs"));
}
