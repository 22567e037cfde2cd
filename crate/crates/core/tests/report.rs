use denjoy_twist::verify::{run_suite, Status, Suite};
use denjoy_twist::{BuildConfig, Construction, Side};
use std::sync::OnceLock;

fn default_build() -> &'static Construction {
    static BUILD: OnceLock<Construction> = OnceLock::new();
    BUILD.get_or_init(|| Construction::build(&BuildConfig::default()).unwrap())
}

#[test]
fn default_build_passes_every_suite() {
    let report = run_suite(default_build(), &Suite::ALL);
    let failing: Vec<_> = report.results.iter().filter(|r| r.status == Status::Fail).collect();
    assert!(failing.is_empty(), "{failing:#?}");
    assert_eq!(report.results.len(), Suite::ALL.len());
    for s in Suite::ACCEPTANCE {
        assert_eq!(report.results.iter().filter(|r| r.name == s.name()).count(), 1);
    }
}

#[test]
fn reports_are_deterministic() {
    let suites = [Suite::PhiC1, Suite::Lipschitz, Suite::Homeomorphism];
    let a = run_suite(default_build(), &suites).to_json();
    let b = run_suite(default_build(), &suites).to_json();
    assert_eq!(a, b);
}

#[test]
fn empty_suite_set_passes() {
    let report = run_suite(default_build(), &[]);
    assert!(report.results.is_empty());
    assert_eq!(report.status, Status::Pass);
}

#[test]
fn broken_balance_fails_phi_suite() {
    let c = default_build();
    let tampered = c.with_slopes(c.slopes().with_adjusted(0, Side::Right, 0.01)).unwrap();
    let report = run_suite(&tampered, &[Suite::PhiC1, Suite::Surgery]);
    assert!(report.results.iter().all(|r| r.status == Status::Fail), "{report:#?}");
}
