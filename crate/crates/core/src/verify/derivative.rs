use crate::base_map::Side;
use crate::circle::CirclePoint;
use crate::numeric::CompensatedSum;
use rand::Rng;
use serde::Serialize;

/// Steps `max_step * 2^-i` for `i = 0..STEPS`.
const STEPS: usize = 15;
// a diagonal difference growing by more than this factor counts as divergence
const SAFE: f64 = 2.0;
// cancellation between error terms can fake divergence on the coarsest steps
const MIN_LEVELS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Approach {
    #[serde(rename = "L")]
    Left,
    #[serde(rename = "R")]
    Right,
    #[serde(rename = "both")]
    Both,
}

impl From<Side> for Approach {
    fn from(side: Side) -> Self {
        match side {
            Side::Left => Approach::Left,
            Side::Right => Approach::Right,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DerivativeEstimate {
    pub point: CirclePoint,
    pub side: Approach,
    pub value: f64,
    /// Difference of the last two extrapolants that were accepted.
    pub richardson_error: f64,
    pub steps_used: Vec<f64>,
    pub low_confidence: bool,
}

/// One-sided derivative at offset 0 of `f`, where `f(d)` is the function at `point + d`.
///
/// Difference quotients on halving steps are extrapolated in a Neville table;
/// the entry with the smallest error estimate wins.
pub fn one_sided_derivative<F: Fn(f64) -> f64>(
    f: F,
    point: CirclePoint,
    side: Side,
    max_step: f64,
) -> DerivativeEstimate {
    let sign = match side {
        Side::Left => -1.0,
        Side::Right => 1.0,
    };
    let f0 = f(0.0);
    let mut steps = Vec::with_capacity(STEPS);
    let mut prev: Vec<f64> = Vec::new();
    let mut best = (f64::NAN, f64::INFINITY);
    let mut diag_prev = f64::NAN;
    let mut low_confidence = false;
    for i in 0..STEPS {
        let h = max_step * 0.5f64.powi(i as i32);
        steps.push(h);
        let d = sign * h;
        let fd = f(d);
        let mut row = vec![(fd - f0) / d];
        // round-off in the quotient; a chance agreement below it is not evidence
        let noise = 4.0 * f64::EPSILON * f0.abs().max(fd.abs()) / h;
        let mut factor = 1.0;
        for j in 1..=i {
            factor *= 2.0;
            let t = row[j - 1] + (row[j - 1] - prev[j - 1]) / (factor - 1.0);
            let err = (t - row[j - 1]).abs().max((t - prev[j - 1]).abs()).max(noise);
            if err <= best.1 {
                best = (t, err);
            }
            row.push(t);
        }
        if i >= MIN_LEVELS {
            let diag = row[i];
            let diag_err = (diag - diag_prev).abs();
            if diag_err > SAFE * best.1.max(noise) {
                // round-off has taken over; earlier entries are final
                low_confidence = best.1 > 1e-8 * best.0.abs().max(1.0);
                break;
            }
        }
        diag_prev = row[i];
        prev = row;
    }
    if best.0.is_nan() {
        best = (prev[0], f64::INFINITY);
        low_confidence = true;
    }
    DerivativeEstimate {
        point,
        side: side.into(),
        value: best.0,
        richardson_error: best.1,
        steps_used: steps,
        low_confidence,
    }
}

/// Spread (max minus min) of difference quotients `(f(d1) - f(d2)) / (d1 - d2)` over
/// random offsets with `radius / 10 <= |d| <= radius` and `|d1 - d2| >= radius / 10`;
/// half the pairs straddle 0.
pub fn two_sequence_spread<F, R>(f: F, trials: usize, radius: f64, rng: &mut R) -> f64
where
    F: Fn(f64) -> f64,
    R: Rng,
{
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let offset = |rng: &mut R, sign: f64| sign * rng.gen_range(0.1 * radius..=radius);
    for i in 0..trials {
        let (d1, d2) = if i % 2 == 0 {
            (offset(rng, -1.0), offset(rng, 1.0))
        } else {
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            loop {
                let pair = (offset(rng, sign), offset(rng, sign));
                if (pair.0 - pair.1).abs() >= 0.1 * radius {
                    break pair;
                }
            }
        };
        let q = (f(d1) - f(d2)) / (d1 - d2);
        lo = lo.min(q);
        hi = hi.max(q);
    }
    if trials == 0 {
        return 0.0;
    }
    hi - lo
}

/// Mean lift displacement over `n` iterates from `start`.
///
/// `displacement(x)` is `F(x) - x` for the chosen lift `F`.
pub fn rotation_number<F: Fn(CirclePoint) -> f64>(displacement: F, start: CirclePoint, n: usize) -> f64 {
    let mut total = CompensatedSum::new();
    let mut x = start;
    for _ in 0..n {
        let d = displacement(x);
        total.add(d);
        x = CirclePoint::from_finite(x.value() + d);
    }
    total.value() / n as f64
}
