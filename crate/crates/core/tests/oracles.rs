//! Reference values computed independently of the library code paths.

use denjoy_twist::denjoy::twist_gate;
use denjoy_twist::surgery::SeedOffsets;
use denjoy_twist::{
    build_orbit, fixed_point_plus, normalize, phi_m, rotation_order, seed_slopes, BuildConfig, BumpSpec, Construction,
    GapDynamics, LengthFamily, Side,
};
use std::sync::OnceLock;

fn default_build() -> &'static Construction {
    static BUILD: OnceLock<Construction> = OnceLock::new();
    BUILD.get_or_init(|| Construction::build(&BuildConfig::default()).unwrap())
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn recursion_reference_values() {
    assert_eq!(phi_m(2.0, 1.0).unwrap(), 1.0);
    assert_eq!(phi_m(2.5, 2.0).unwrap(), 2.0);
    assert_eq!(phi_m(2.5, 0.5).unwrap(), 0.5);
    assert_eq!(fixed_point_plus(0.0), 1.0);
    assert_eq!(fixed_point_plus(0.5), 2.0);
}

#[test]
fn normalization_matches_long_brute_force_sum() {
    // plain sum to 1e7 plus the integral tail, smallest terms first
    let c = 100.0f64;
    let big = 10_000_000u64;
    let mut s = 0.0f64;
    for k in (1..=big).rev() {
        s += 2.0 / ((k as f64 + c) * (k as f64 + c));
    }
    s += 1.0 / (c * c);
    let tail_exact = 2.0 / (big as f64 + c + 0.5);
    let brute = 1.0 / (s + tail_exact);

    let family = LengthFamily::quadratic(c);
    let a_c = normalize(&family, 200_000);
    assert!(((a_c - brute) / brute).abs() < 1e-8, "a_C {a_c} vs brute force {brute}");

    // the stored tail bound dominates the true unstored mass
    let t = default_build().table();
    let mut unstored = 0.0f64;
    for k in (200_001..=big).rev() {
        unstored += 2.0 * a_c / ((k as f64 + c) * (k as f64 + c));
    }
    unstored += 2.0 * a_c / (big as f64 + c + 0.5);
    assert!(t.tail_bound() >= unstored && t.tail_bound() < unstored * 1.001);
}

#[test]
fn bump_constants_by_quadrature() {
    let spec = BumpSpec::new(3).unwrap();
    assert_eq!(spec.normalizer(), 280.0);
    assert!(close(spec.eta_max(), 4.375, 1e-15));
    // composite Simpson on the support
    let n = 20_000;
    let h = 0.5 / n as f64;
    let mut acc = spec.eta(0.25) + spec.eta(0.75);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * spec.eta(0.25 + i as f64 * h);
    }
    assert!(close(acc * h / 3.0, 1.0, 1e-12));
}

#[test]
fn golden_rotation_order() {
    let alpha = (5f64.sqrt() - 1.0) / 2.0;
    assert_eq!(rotation_order(alpha, 3).unwrap(), vec![0, -3, 2, -1, 1, -2, 3]);
}

#[test]
fn gate_values_for_small_offset() {
    // l_0 / l_{-1} = (2/1)^2 with C = 1
    let (value, k, ratio) = twist_gate(&LengthFamily::quadratic(1.0), 200_000, 4.375);
    assert_eq!((k, ratio), (-1, 4.0));
    assert!(close(value, 3.0 * 4.375, 1e-12));
    let (ok, _, _) = twist_gate(&LengthFamily::quadratic(100.0), 200_000, 4.375);
    assert!(ok < 1.0);
}

#[test]
fn orbit_derivatives_at_defaults() {
    let c = default_build();
    let orbit = c.orbit();
    // the orbit sits at gap midpoints where eta peaks
    let expect = |k: i64| {
        let r = ((k.abs() as f64 + 100.0) / ((k + 1).abs() as f64 + 100.0)).powi(2);
        1.0 + (r - 1.0) * 4.375
    };
    assert!(close(orbit.alpha(0), 0.913_795, 1e-6));
    for k in [-300, -1, 0, 1, 7, 300] {
        assert!(close(orbit.alpha(k), expect(k), 1e-12), "alpha_{k}");
        assert!(close(orbit.u(k) / c.table().len(k), 0.5, 1e-12));
    }
}

#[test]
fn seeded_slopes_at_defaults() {
    let c = default_build();
    let (orbit, slopes) = (c.orbit(), c.slopes());
    let am1 = orbit.alpha(-1);
    let b = 1.0 / (0.1 + 1.0 / (0.9 * am1));
    assert!(close(slopes.beta(-1, Side::Right), b, 1e-14));
    assert!(close(slopes.beta(0, Side::Left) - slopes.beta(0, Side::Right), 0.1, 1e-15));
    assert!(slopes.m_tilde0() > orbit.m(0));
}

#[test]
fn slope_envelope_far_out() {
    let c = default_build();
    let radius = 10_001;
    let orbit = build_orbit(0.5, radius, c.g()).unwrap();
    let slopes = seed_slopes(&orbit, SeedOffsets::default()).unwrap();
    for n in [100i64, 1000, 10_000] {
        let eps = (n..=radius).flat_map(|m| [orbit.m(m), orbit.m(-m)]).fold(0.0f64, |a, m| a.max(m - 2.0));
        let envelope = 2.0 * (fixed_point_plus(eps) - 1.0) + 0.01;
        for k in [n, -n] {
            for s in [Side::Left, Side::Right] {
                assert!((slopes.beta(k, s) - 1.0).abs() <= envelope, "k = {k}");
            }
        }
    }
}

#[test]
fn psi_one_sided_slopes_at_marked_point() {
    let c = default_build();
    let (h, slopes) = (c.h(), c.slopes());
    let u0 = c.orbit().u(0);
    for s in [Side::Left, Side::Right] {
        assert_eq!(h.local_slope(0, u0, s), slopes.beta(0, s));
    }
    // psi' = h' - 1, straight from the local quadratic ramp
    let d = 1e-9;
    let tw = c.twist();
    let right = (tw.psi_local(0, u0 + d) - tw.psi_local(0, u0)) / d;
    let left = (tw.psi_local(0, u0) - tw.psi_local(0, u0 - d)) / d;
    assert!(close(right, slopes.beta(0, Side::Right) - 1.0, 1e-5));
    assert!(close(left, slopes.beta(0, Side::Left) - 1.0, 1e-5));
    let offsets = SeedOffsets::default();
    assert!((left - right).abs() >= 0.9 * (offsets.dl - offsets.dr).abs());
}

#[test]
fn rotation_number_drift_shrinks() {
    let c = default_build();
    let t = c.table();
    let h = c.h();
    let x = t.point(5, 0.0);
    for n in [1000usize, 2000, 10_000] {
        let rho = denjoy_twist::verify::rotation_number(|p| h.displacement(p), x, n);
        assert!((rho - t.alpha()).abs() <= 10.0 / n as f64 + 2.0 * t.tail_bound(), "n = {n}");
    }
}
