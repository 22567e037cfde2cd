use super::derivative::{one_sided_derivative, rotation_number, two_sequence_spread};
use super::report::{Check, SuiteResult, VerificationReport};
use crate::base_map::{build_orbit, GapDynamics, OrbitTable, Side};
use crate::build::Construction;
use crate::circle::{forward_arc, rotate, signed_gap, CirclePoint};
use crate::denjoy::{twist_gate, Hit};
use crate::numeric::piecewise_gauss;
use crate::surgery::{fixed_point_plus, seed_slopes, SlopeSeq};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const SIDES: [Side; 2] = [Side::Left, Side::Right];

/// A named group of checks. The first six cover module invariants; the rest are
/// the acceptance criteria, in order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    CircleCore,
    GapTable,
    BaseMap,
    Surgery,
    TwistMap,
    Estimators,
    GraphInvariance,
    DenjoyConjugacy,
    PhiC1,
    PsiKink,
    SlopeRecursion,
    SurgeryContract,
    Homeomorphism,
    SymplecticTwist,
    Lipschitz,
    ZeroMean,
    NegativeControls,
}

impl Suite {
    pub const ALL: [Suite; 17] = [
        Suite::CircleCore,
        Suite::GapTable,
        Suite::BaseMap,
        Suite::Surgery,
        Suite::TwistMap,
        Suite::Estimators,
        Suite::GraphInvariance,
        Suite::DenjoyConjugacy,
        Suite::PhiC1,
        Suite::PsiKink,
        Suite::SlopeRecursion,
        Suite::SurgeryContract,
        Suite::Homeomorphism,
        Suite::SymplecticTwist,
        Suite::Lipschitz,
        Suite::ZeroMean,
        Suite::NegativeControls,
    ];

    /// The acceptance criteria, numbered from 1.
    pub const ACCEPTANCE: [Suite; 11] = [
        Suite::GraphInvariance,
        Suite::DenjoyConjugacy,
        Suite::PhiC1,
        Suite::PsiKink,
        Suite::SlopeRecursion,
        Suite::SurgeryContract,
        Suite::Homeomorphism,
        Suite::SymplecticTwist,
        Suite::Lipschitz,
        Suite::ZeroMean,
        Suite::NegativeControls,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::CircleCore => "invariants.circle",
            Suite::GapTable => "invariants.gap_table",
            Suite::BaseMap => "invariants.base_map",
            Suite::Surgery => "invariants.surgery",
            Suite::TwistMap => "invariants.twist_map",
            Suite::Estimators => "invariants.estimators",
            Suite::GraphInvariance => "graph_invariance",
            Suite::DenjoyConjugacy => "denjoy_conjugacy",
            Suite::PhiC1 => "phi_c1_on_orbit",
            Suite::PsiKink => "psi_kink_on_orbit",
            Suite::SlopeRecursion => "slope_recursion",
            Suite::SurgeryContract => "surgery_contract",
            Suite::Homeomorphism => "homeomorphism",
            Suite::SymplecticTwist => "symplectic_twist",
            Suite::Lipschitz => "lipschitz",
            Suite::ZeroMean => "zero_mean",
            Suite::NegativeControls => "negative_controls",
        }
    }

    pub fn parse(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }

    fn stream(self) -> u64 {
        Suite::ALL.iter().position(|s| *s == self).unwrap_or(0) as u64
    }

    pub fn run(self, c: &Construction) -> SuiteResult {
        let mut rng = ChaCha8Rng::seed_from_u64(c.config().rng_seed);
        rng.set_stream(self.stream());
        let checks = match self {
            Suite::CircleCore => circle_core(c, &mut rng),
            Suite::GapTable => gap_table(c, &mut rng),
            Suite::BaseMap => base_map(c, &mut rng),
            Suite::Surgery => surgery(c, &mut rng),
            Suite::TwistMap => twist_map(c, &mut rng),
            Suite::Estimators => estimators(&mut rng),
            Suite::GraphInvariance => graph_invariance(c),
            Suite::DenjoyConjugacy => denjoy_conjugacy(c, &mut rng),
            Suite::PhiC1 => phi_c1(c, &mut rng),
            Suite::PsiKink => psi_kink(c, &mut rng),
            Suite::SlopeRecursion => slope_recursion(c),
            Suite::SurgeryContract => surgery_contract(c),
            Suite::Homeomorphism => homeomorphism(c, &mut rng),
            Suite::SymplecticTwist => symplectic_twist(c, &mut rng),
            Suite::Lipschitz => lipschitz(c, &mut rng),
            Suite::ZeroMean => vec![Check::at_most("|int phi|", c.twist().integrate_phi().abs(), 1e-10)],
            Suite::NegativeControls => negative_controls(c, &mut rng),
        };
        SuiteResult::from_checks(self.name(), &checks)
    }
}

/// Runs `suites` concurrently; results keep the requested order.
pub fn run_suite(c: &Construction, suites: &[Suite]) -> VerificationReport {
    let results = suites.par_iter().map(|s| s.run(c)).collect();
    VerificationReport::new(c.manifest(), results)
}

fn random_point(rng: &mut ChaCha8Rng) -> CirclePoint {
    CirclePoint::from_finite(rng.gen::<f64>())
}

fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<CirclePoint> {
    (0..n).map(|_| random_point(rng)).collect()
}

fn max_of<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().fold(0.0, |m, v| if v.is_nan() { f64::INFINITY } else { m.max(v) })
}

fn orbit_point(c: &Construction, k: i64) -> CirclePoint {
    c.table().point(k, c.orbit().u(k))
}

/// Radius around `x_k` on `side` where `phi` is built from ramp pieces only.
fn phi_clean_radius(c: &Construction, k: i64, side: Side) -> f64 {
    let h = c.h();
    let own = h.ramp_width(k, side).expect("k is surgered");
    h.ramp_image_width(k - 1, side).map_or(own, |w| own.min(w))
}

fn round_trip_error<M: GapDynamics>(map: &M, points: &[CirclePoint]) -> (f64, f64) {
    let fwd = max_of(points.par_iter().map(|&y| signed_gap(map.eval(map.inverse(y)), y).abs()).collect::<Vec<_>>());
    let back = max_of(points.par_iter().map(|&x| signed_gap(map.inverse(map.eval(x)), x).abs()).collect::<Vec<_>>());
    (fwd, back)
}

fn circle_core(c: &Construction, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let mut wrap_bad = 0;
    let mut antisym = 0.0f64;
    let mut rotate_err = 0.0f64;
    for _ in 0..1000 {
        let a = random_point(rng);
        let b = random_point(rng);
        let lifted = CirclePoint::from_finite(a.value() + 3.0);
        if !(0.0..1.0).contains(&lifted.value()) {
            wrap_bad += 1;
        }
        let g = signed_gap(a, b);
        if g.abs() < 0.5 {
            antisym = antisym.max((g + signed_gap(b, a)).abs());
        }
        let shift = rng.gen_range(-2.0..2.0);
        rotate_err = rotate_err.max(signed_gap(rotate(rotate(a, shift), -shift), a).abs());
    }
    let gaps = c.table().gaps();
    let overlaps = gaps.windows(2).filter(|w| !(w[1].start >= w[0].end())).count();
    vec![
        Check::at_most("wrap outside [0,1)", f64::from(wrap_bad), 0.0),
        Check::at_most("signed_gap antisymmetry", antisym, 1e-15),
        Check::at_most("rotate round trip", rotate_err, 1e-15),
        Check::at_most("gaps out of rotation order", overlaps as f64, 0.0),
    ]
}

fn gap_table(c: &Construction, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let t = c.table();
    let n = t.radius();
    let mass = (t.stored_mass() + t.residual_mass() - 1.0).abs();
    let tail = (t.residual_mass() - t.tail_bound()).abs();
    let mut locate_err = 0.0f64;
    for _ in 0..1000 {
        let k = rng.gen_range(-n..=n);
        let u = rng.gen::<f64>() * t.len(k);
        locate_err = locate_err.max(match t.locate(t.point(k, u)) {
            Hit::Gap { k: found, u: v } if found == k => (v - u).abs(),
            _ => f64::INFINITY,
        });
    }
    let mut xs = random_points(rng, 10_000);
    xs.sort_by(|a, b| a.value().total_cmp(&b.value()));
    let js: Vec<f64> = xs.iter().map(|&x| t.semiconjugacy(x).value()).collect();
    let j_drops = js.windows(2).filter(|w| w[1] < w[0]).count();
    let (gate, _, _) = twist_gate(t.family(), n, c.g().bump().eta_max());
    vec![
        Check::at_most("|stored + residual mass - 1|", mass, 1e-12),
        Check::at_most("|residual mass - tail_bound|", tail, 1e-12),
        Check::at_most("locate round trip", locate_err, 1e-15),
        Check::at_most("semi-conjugacy decreases", j_drops as f64, 0.0),
        Check::at_most("twist gate", gate, 1.0),
    ]
}

fn base_map(c: &Construction, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let g = c.g();
    let t = c.table();
    let n = t.radius();
    let endpoint_err = max_of(
        (-n..n)
            .into_par_iter()
            .map(|k| g.local_forward(k, 0.0).abs().max((g.local_forward(k, t.len(k)) - t.len(k + 1)).abs()))
            .collect::<Vec<_>>(),
    );
    let (fwd, back) = round_trip_error(g, &random_points(rng, 10_000));
    let orbit = c.orbit();
    let kk = orbit.radius();
    let orbit_err = max_of((-kk..kk).map(|k| (g.local_forward(k, orbit.u(k)) - orbit.u(k + 1)).abs()));
    let iterations = 10_000;
    let rho = rotation_number(|x| g.displacement(x), random_point(rng), iterations);
    vec![
        Check::at_most("g gap endpoints", endpoint_err, 0.0),
        Check::at_most("g(g^-1(y)) - y", fwd, 1e-12),
        Check::at_most("g^-1(g(x)) - x", back, 1e-12),
        Check::at_most("g(x_k) - x_{k+1}", orbit_err, 0.0),
        Check::at_most("|rho(g) - alpha|", (rho - t.alpha()).abs(), 10.0 / iterations as f64 + 2.0 * t.tail_bound()),
    ]
}

fn surgery(c: &Construction, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let (h, g, orbit, slopes) = (c.h(), c.g(), c.orbit(), c.slopes());
    let kk = orbit.radius();
    let violations = slopes.violations(orbit);
    let balance = max_of((1 - kk..=kk).flat_map(|k| SIDES.map(|s| slopes.balance_residual(k, s, orbit).abs())));
    let orbit_err = max_of((-kk..kk).map(|k| (h.local_forward(k, orbit.u(k)) - orbit.u(k + 1)).abs()));
    let (_, back) = round_trip_error(h, &random_points(rng, 10_000));
    let t = c.table();
    let mut off_gap = 0.0f64;
    for _ in 0..1000 {
        let rank = rng.gen_range(0..t.gaps().len());
        let x = CirclePoint::from_finite(t.gaps()[rank].end() + rng.gen::<f64>() * t.residuals()[rank]);
        if let Hit::Residual { .. } = t.locate(x) {
            off_gap = off_gap.max(signed_gap(h.eval(x), g.eval(x)).abs());
        }
    }
    let u0 = orbit.u(0);
    let kink = SIDES.map(|s| (h.local_slope(0, u0, s) - slopes.beta(0, s)).abs());
    vec![
        Check::at_most("slope invariant violations", violations.len() as f64, 0.0),
        Check::at_most("balance residual", balance, 1e-12),
        Check::at_most("h(x_k) - x_{k+1}", orbit_err, 0.0),
        Check::at_most("h^-1(h(x)) - x", back, 1e-12),
        Check::at_most("h - g on residual arcs", off_gap, 0.0),
        Check::at_most("h'_L(x_0) - beta_0^L", kink[0], 0.0),
        Check::at_most("h'_R(x_0) - beta_0^R", kink[1], 0.0),
    ]
}

fn twist_map(c: &Construction, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let tw = c.twist();
    let samples: Vec<(CirclePoint, f64)> = (0..10_000).map(|_| (random_point(rng), rng.gen_range(-1.0..1.0))).collect();
    let inverse_err = max_of(
        samples
            .par_iter()
            .map(|&(x, r)| {
                let (y, s) = tw.f_apply(x, r);
                let (x1, r1) = tw.f_inverse(y, s);
                signed_gap(x1, x).abs() + (r1 - r).abs()
            })
            .collect::<Vec<_>>(),
    );
    // phi = chi wherever neither h nor h^-1 differs from g
    let t = c.table();
    let kk = c.orbit().radius();
    let mut chi_err = 0.0f64;
    for _ in 0..1000 {
        let k = loop {
            let k = rng.gen_range(-t.radius() + 1..t.radius());
            if k > kk + 1 || k < -kk {
                break k;
            }
        };
        let u = rng.gen::<f64>() * t.len(k);
        chi_err = chi_err.max((tw.phi_local(k, u) - tw.chi_local(k, u)).abs());
    }
    let x1 = c.table().point(1, c.orbit().u(1));
    let psi0 = (tw.psi_local(0, c.orbit().u(0)) - forward_arc(orbit_point(c, 0).value(), x1.value())).abs();
    vec![
        Check::at_most("f^-1(f(theta, r)) - (theta, r)", inverse_err, 1e-12),
        Check::at_most("phi - chi off the surgered gaps", chi_err, 0.0),
        Check::at_most("psi(x_0) - (x_1 - x_0)", psi0, 1e-15),
    ]
}

fn estimators(rng: &mut ChaCha8Rng) -> Vec<Check> {
    let mut rich = 0.0f64;
    for _ in 0..10 {
        let co: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-3.0..3.0));
        let x0 = rng.gen_range(-1.0..1.0);
        let p = |x: f64| co[0] + x * (co[1] + x * (co[2] + x * co[3]));
        let exact = co[1] + x0 * (2.0 * co[2] + 3.0 * co[3] * x0);
        for side in SIDES {
            let est = one_sided_derivative(|d| p(x0 + d), CirclePoint::ZERO, side, 1e-3);
            rich = rich.max((est.value - exact).abs());
        }
    }
    let mut rot = 0.0f64;
    for _ in 0..10 {
        let a = rng.gen_range(0.0..1.0);
        rot = rot.max((rotation_number(|_| a, random_point(rng), 1000) - a).abs());
    }
    let slope = rng.gen_range(-3.0..3.0);
    let affine = two_sequence_spread(|d| 0.25 + slope * d, 1000, 1e-2, rng);
    vec![
        Check::at_most("Richardson on cubics", rich, 1e-10),
        Check::at_most("rotation number of rigid rotations", rot, 1e-12),
        Check::at_most("two-sequence spread of affine maps", affine, 1e-12),
    ]
}

fn graph_invariance(c: &Construction) -> Vec<Check> {
    let tw = c.twist();
    let n = 10_000;
    let worst = max_of(
        (0..n)
            .into_par_iter()
            .map(|i| tw.invariance_residual(CirclePoint::from_finite(i as f64 / n as f64)))
            .collect::<Vec<_>>(),
    );
    vec![
        Check::at_most("max invariance residual on 1e4 points", worst, 1e-10),
        Check::at_most("invariance residual at x_0", tw.invariance_residual(orbit_point(c, 0)), 1e-11),
    ]
}

fn denjoy_conjugacy(c: &Construction, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let (tw, h, t) = (c.twist(), c.h(), c.table());
    let xs = random_points(rng, 10_000);
    let first = max_of(
        xs.par_iter().map(|&x| signed_gap(tw.f_apply(x, tw.psi_eval(x)).0, h.eval(x)).abs()).collect::<Vec<_>>(),
    );
    let semi = max_of(
        xs.par_iter()
            .map(|&x| signed_gap(t.semiconjugacy(h.eval(x)), rotate(t.semiconjugacy(x), t.alpha())).abs())
            .collect::<Vec<_>>(),
    );
    let n = 10_000;
    let rho = rotation_number(|x| h.displacement(x), random_point(rng), n);
    vec![
        Check::at_most("pi f(theta, psi) - h(theta)", first, 1e-12),
        Check::at_most("|j(h(x)) - j(x) - alpha|", semi, 2.0 * t.tail_bound()),
        Check::at_most("|rho(h) - alpha|", (rho - t.alpha()).abs(), 10.0 / n as f64 + 2.0 * t.tail_bound()),
    ]
}

fn phi_c1(c: &Construction, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let (tw, orbit, slopes) = (c.twist(), c.orbit(), c.slopes());
    let reach = orbit.radius().min(50);
    let mut checks = Vec::new();
    let mut worst_spread = 0.0f64;
    for k in -reach..=reach {
        let uk = orbit.u(k);
        let target = if k == 0 { slopes.m_tilde0() } else { orbit.m(k) } - 2.0;
        let [l, r] = SIDES.map(|s| {
            let step = (0.25 * phi_clean_radius(c, k, s)).min(1e-3);
            one_sided_derivative(|d| tw.phi_local(k, uk + d), orbit_point(c, k), s, step)
        });
        checks.push(Check::at_most(
            format!("|phi'_L - phi'_R| at k = {k}"),
            (l.value - r.value).abs(),
            1e-6 + l.richardson_error + r.richardson_error,
        ));
        checks.push(Check::at_most(format!("|phi'_L - target| at k = {k}"), (l.value - target).abs(), 1e-6));
        checks.push(Check::at_most(format!("|phi'_R - target| at k = {k}"), (r.value - target).abs(), 1e-6));
        worst_spread = worst_spread.max(two_sequence_spread(|d| tw.phi_local(k, uk + d), 1000, 1e-6, rng));
    }
    checks.push(Check::at_most("two-sequence spread of phi at radius 1e-6", worst_spread, 1e-3));
    checks
}

fn psi_kink(c: &Construction, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let (tw, orbit, slopes) = (c.twist(), c.orbit(), c.slopes());
    let reach = orbit.radius().min(20);
    let mut checks = Vec::new();
    for k in -reach..=reach {
        let uk = orbit.u(k);
        let [l, r] = SIDES.map(|s| {
            let step = (0.25 * c.h().ramp_width(k, s).expect("surgered")).min(1e-3);
            one_sided_derivative(|d| tw.psi_local(k, uk + d), orbit_point(c, k), s, step)
        });
        let jump = (l.value - r.value).abs();
        let (bl, br) = (slopes.beta(k, Side::Left), slopes.beta(k, Side::Right));
        checks.push(Check::at_least(format!("|psi'_L - psi'_R| at k = {k}"), jump, 0.9 * (bl - br).abs()));
        checks.push(Check::at_most(
            format!("|psi'_L - (beta^L - 1)| at k = {k}"),
            (l.value - (bl - 1.0)).abs(),
            1e-6 + l.richardson_error,
        ));
        checks.push(Check::at_most(
            format!("|psi'_R - (beta^R - 1)| at k = {k}"),
            (r.value - (br - 1.0)).abs(),
            1e-6 + r.richardson_error,
        ));
        if k == 0 {
            let offsets = slopes.offsets();
            checks.push(Check::at_least(
                "|psi'_L - psi'_R| at x_0 vs offsets",
                jump,
                0.9 * (offsets.dl - offsets.dr).abs(),
            ));
            let u0 = uk;
            for radius in [1e-4, 1e-5, 1e-6] {
                let spread = two_sequence_spread(|d| tw.psi_local(0, u0 + d), 1000, radius, rng);
                checks.push(Check::at_least(
                    format!("psi two-sequence spread at radius {radius:e}"),
                    spread,
                    0.9 * (bl - br).abs(),
                ));
            }
        }
    }
    checks
}

fn slope_recursion(c: &Construction) -> Vec<Check> {
    const SAMPLES: [i64; 2] = [100, 1000];
    let aux_radius = 4 * SAMPLES[1] + 1;
    let (orbit, slopes) = match build_orbit(c.orbit().x0_fraction(), aux_radius, c.g())
        .and_then(|o| seed_slopes(&o, *c.slopes().offsets()).map(|s| (o, s)))
    {
        Ok(pair) => pair,
        Err(e) => return vec![Check::at_most(format!("auxiliary slopes with K_orbit = {aux_radius}: {e}"), 1.0, 0.0)],
    };
    let mut checks = Vec::new();
    let failures = |seq: &SlopeSeq, orb: &OrbitTable| {
        let kk = orb.radius();
        (-kk..=kk)
            .flat_map(|k| SIDES.map(|s| (k, s)))
            .filter(|&(k, s)| {
                let (b, a) = (seq.beta(k, s), orb.alpha(k));
                !(if k >= 0 { b > a } else { b > 0.0 && b < a })
            })
            .count() as f64
    };
    checks.push(Check::at_most("domination failures, build slopes", failures(c.slopes(), c.orbit()), 0.0));
    checks.push(Check::at_most(format!("domination failures, K_orbit = {aux_radius}"), failures(&slopes, &orbit), 0.0));
    for &n in &SAMPLES {
        let eps = (n..=aux_radius).flat_map(|m| [orbit.m(m), orbit.m(-m)]).fold(0.0f64, |acc, m| acc.max(m - 2.0));
        let envelope = 2.0 * (fixed_point_plus(eps) - 1.0) + 0.01;
        for k in [n, -n] {
            for s in SIDES {
                checks.push(Check::at_most(
                    format!("|beta_{k}^{} - 1| envelope", s.letter()),
                    (slopes.beta(k, s) - 1.0).abs(),
                    envelope,
                ));
            }
        }
    }
    checks
}

fn surgery_contract(c: &Construction) -> Vec<Check> {
    let (h, g, t) = (c.h(), c.g(), c.table());
    const OUTER: usize = 32;
    const SWEEP: usize = 512;
    let per_gap: Vec<[f64; 7]> = h
        .surgeries()
        .par_iter()
        .map(|s| {
            let k = s.k;
            let len = t.len(k);
            let mut out = [0.0f64; 7];
            for side in SIDES {
                let p = s.profile(side);
                // point 1
                out[0] = out[0].max((h.local_slope(k, s.u, side) - p.target_slope).abs());
                // point 3: integral of the modified derivative over the half-gap
                let (lo, hi, expected) = match side {
                    Side::Left => (0.0, s.u, s.anchor),
                    Side::Right => (s.u, len, t.len(k + 1) - s.anchor),
                };
                let mut breaks: Vec<f64> = s.breakpoints();
                breaks.extend([lo, hi, 0.25 * len, 0.75 * len]);
                breaks.retain(|b| *b >= lo && *b <= hi);
                breaks.sort_by(f64::total_cmp);
                let integral = piecewise_gauss(&|u| h.local_slope(k, u, Side::Right), &breaks);
                out[1] = out[1].max((integral - expected).abs() / expected);
                let closed = match side {
                    Side::Left => h.local_forward(k, 0.0).abs(),
                    Side::Right => (h.local_forward(k, len) - t.len(k + 1)).abs() / t.len(k + 1),
                };
                out[2] = out[2].max(closed);
                // point 2: untouched outer eighth
                let (e0, e1) = match side {
                    Side::Left => (0.0, len / 8.0),
                    Side::Right => (7.0 * len / 8.0, len),
                };
                for i in 0..=OUTER {
                    let u = e0 + (e1 - e0) * i as f64 / OUTER as f64;
                    out[3] = out[3].max((h.local_slope(k, u, side) - g.gap_derivative(k, u)).abs());
                }
                // point 4 and positivity, stored and resampled
                out[4] = out[4].max(p.sup_deviation - p.point4_limit);
                let mut min_delta = f64::INFINITY;
                for i in 0..=SWEEP {
                    let u = lo + (hi - lo) * i as f64 / SWEEP as f64;
                    let d = h.local_slope(k, u, side);
                    out[5] = out[5].max((d - 1.0).abs() - p.point4_limit);
                    min_delta = min_delta.min(d);
                }
                out[6] = out[6].max(-min_delta);
            }
            out
        })
        .collect();
    let col = |i: usize| max_of(per_gap.iter().map(|v| v[i]));
    let halves = 2 * per_gap.len();
    vec![
        Check::at_most(format!("point 1: |delta(x_k) - beta| over {halves} half-gaps"), col(0), 0.0),
        Check::at_most("point 3: relative integral defect", col(1), 1e-13),
        Check::at_most("point 3: closed-form endpoint defect", col(2), 1e-15),
        Check::at_most("point 2: |delta - g'| on outer eighths", col(3), 0.0),
        Check::at_most("point 4: stored sup minus bound", col(4), 0.0),
        Check::at_most("point 4: resampled sup minus bound", col(5), 1e-12),
        Check::at_most("delta > 0: minus min delta", col(6), 0.0),
    ]
}

fn homeomorphism(c: &Construction, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let mut xs = random_points(rng, 100_000);
    xs.sort_by(|a, b| a.value().total_cmp(&b.value()));
    let ys = random_points(rng, 10_000);
    let mut checks = Vec::new();
    let mut monotone = |name: &str, disp: &(dyn Fn(CirclePoint) -> f64 + Sync)| {
        let lifts: Vec<f64> = xs.par_iter().map(|&x| x.value() + disp(x)).collect();
        let drops = lifts.windows(2).filter(|w| !(w[1] > w[0])).count();
        let span = lifts[lifts.len() - 1] - lifts[0];
        checks.push(Check::at_most(format!("{name}: non-increasing steps on 1e5 sorted samples"), drops as f64, 0.0));
        checks.push(Check::at_most(format!("{name}: lift span over samples"), span, 1.0));
    };
    monotone("h", &|x| c.h().displacement(x));
    monotone("g", &|x| c.g().displacement(x));
    let (hf, _) = round_trip_error(c.h(), &ys);
    let (gf, _) = round_trip_error(c.g(), &ys);
    checks.push(Check::at_most("h(h^-1(y)) - y", hf, 1e-12));
    checks.push(Check::at_most("g(g^-1(y)) - y", gf, 1e-12));
    checks
}

fn symplectic_twist(c: &Construction, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let tw = c.twist();
    let kk = c.orbit().radius();
    let mut marks: Vec<f64> = (-kk..=kk).map(|k| orbit_point(c, k).value()).collect();
    marks.push(c.table().point(kk + 1, c.h().surgery(kk).map_or(0.0, |s| s.anchor)).value());
    marks.sort_by(f64::total_cmp);
    let near_orbit = |x: f64| {
        let i = marks.partition_point(|m| *m < x);
        [i.wrapping_sub(1), i, 0, marks.len() - 1]
            .iter()
            .filter_map(|&j| marks.get(j))
            .any(|m| forward_arc(*m, x).min(forward_arc(x, *m)) < 1e-4)
    };
    let mut pts = Vec::with_capacity(1000);
    while pts.len() < 1000 {
        let theta = random_point(rng);
        let r: f64 = rng.gen_range(-0.5..0.5);
        if !near_orbit(CirclePoint::from_finite(theta.value() + r).value()) {
            pts.push((theta, r));
        }
    }
    let jac: Vec<_> = pts.par_iter().map(|&(x, r)| tw.jacobian_check(x, r, 1e-6)).collect();
    let det = max_of(jac.iter().map(|j| (j.det - 1.0).abs()));
    let twist = max_of(jac.iter().map(|j| (j.twist - 1.0).abs()));
    let r = 0.3;
    let base = CirclePoint::from_finite(orbit_point(c, 0).value() - r);
    let one_sided = max_of(SIDES.map(|s| (tw.jacobian_one_sided(base, r, 1e-7, s).det - 1.0).abs()));
    vec![
        Check::at_most("|det - 1| at 1e3 points off the orbit", det, 1e-5),
        Check::at_most("|twist - 1|", twist, 1e-6),
        Check::at_most("|one-sided det - 1| across x_0", one_sided, 1e-5),
    ]
}

/// Bound on `|psi'|` read off the build: every gap, ramp and linear arc.
fn lipschitz_bound(c: &Construction) -> f64 {
    let (h, g, t) = (c.h(), c.g(), c.table());
    let gaps = max_of(
        t.gaps()
            .par_iter()
            .map(|gap| match h.surgery(gap.k) {
                Some(s) => s.left.sup_deviation.max(s.right.sup_deviation),
                // I_N lies inside a linear arc, covered below
                None if gap.k == t.radius() => 0.0,
                None => g.gap_sup_deviation(gap.k),
            })
            .collect::<Vec<_>>(),
    );
    let arcs = max_of(
        t.gaps()
            .par_iter()
            .map(|gap| {
                let mid = CirclePoint::from_finite(gap.end() + 0.5 * t.residuals()[gap.rank]);
                (h.slope(mid, Side::Right) - 1.0).abs()
            })
            .collect::<Vec<_>>(),
    );
    gaps.max(arcs)
}

fn lipschitz(c: &Construction, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let tw = c.twist();
    let kk = c.orbit().radius();
    let pairs: Vec<(CirclePoint, CirclePoint)> = (0..100_000)
        .map(|i| {
            let a = if i % 10 == 0 {
                let k = rng.gen_range(-kk..=kk);
                CirclePoint::from_finite(orbit_point(c, k).value() + rng.gen_range(-1e-4..1e-4))
            } else {
                random_point(rng)
            };
            let d = 10f64.powf(rng.gen_range(-7.0..-2.0));
            (a, CirclePoint::from_finite(a.value() + d))
        })
        .collect();
    let worst = max_of(
        pairs
            .par_iter()
            .map(|&(a, b)| {
                let sep = signed_gap(a, b);
                if sep == 0.0 {
                    0.0
                } else {
                    ((tw.psi_eval(a) - tw.psi_eval(b)) / sep).abs()
                }
            })
            .collect::<Vec<_>>(),
    );
    let bound = lipschitz_bound(c);
    vec![Check::at_most(format!("sampled Lipschitz constant of psi (build bound {bound:e})"), worst, bound + 1e-3)]
}

fn negative_controls(c: &Construction, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let tampered = c.slopes().with_adjusted(0, Side::Right, 0.01);
    let spread = match c.with_slopes(tampered) {
        Ok(t) => {
            let u0 = t.orbit().u(0);
            let tw = t.twist();
            two_sequence_spread(|d| tw.phi_local(0, u0 + d), 1000, 1e-6, rng)
        }
        Err(_) => 0.0,
    };
    let tw = c.twist();
    let n = 1000;
    let shifted =
        max_of((0..n).map(|i| tw.invariance_residual_shifted(CirclePoint::from_finite(i as f64 / n as f64), 0.01)));
    vec![
        Check::at_least("phi spread at x_0 with beta_0^R + 0.01", spread, 5e-3),
        Check::at_least("invariance residual of psi + 0.01", shifted, 1e-3),
    ]
}
