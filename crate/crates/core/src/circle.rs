//! Points of the circle T = R/Z, lifts, and circular order of rotation orbits.
//!
//! Every stored circle coordinate lives in the fundamental domain `[0, 1)`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A point of the circle, stored as its fractional coordinate in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CirclePoint(f64);

impl CirclePoint {
    pub const ZERO: CirclePoint = CirclePoint(0.0);

    /// Projects any finite real onto the circle.
    pub fn new(x: f64) -> Result<Self> {
        wrap(x)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    // Caller guarantees `x` is finite.
    pub(crate) fn from_finite(x: f64) -> Self {
        let mut r = x - x.floor();
        // x slightly below an integer rounds up to 1.0
        if r >= 1.0 {
            r = 0.0;
        }
        CirclePoint(r)
    }
}

impl fmt::Display for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A point of the real line covering a [`CirclePoint`].
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LiftValue(pub f64);

impl LiftValue {
    pub fn project(self) -> CirclePoint {
        CirclePoint::from_finite(self.0)
    }
}

/// `x - floor(x)`, rejecting NaN and infinities.
pub fn wrap(x: f64) -> Result<CirclePoint> {
    if !x.is_finite() {
        return Err(Error::NonFinite(x));
    }
    Ok(CirclePoint::from_finite(x))
}

/// The rigid rotation `theta + alpha`.
pub fn rotate(theta: CirclePoint, alpha: f64) -> CirclePoint {
    CirclePoint::from_finite(theta.0 + alpha)
}

/// Representative of `a - b` in `(-1/2, 1/2]`.
pub fn signed_gap(a: CirclePoint, b: CirclePoint) -> f64 {
    let mut d = a.0 - b.0;
    if d > 0.5 {
        d -= 1.0;
    } else if d <= -0.5 {
        d += 1.0;
    }
    d
}

/// Forward arc length from `from` to `to`, in `[0, 1)`.
pub fn forward_arc(from: f64, to: f64) -> f64 {
    let d = to - from;
    if d < 0.0 {
        d + 1.0
    } else {
        d
    }
}

/// Circular position `{k alpha}` used throughout the construction.
pub fn rotation_position(alpha: f64, k: i64) -> f64 {
    CirclePoint::from_finite(k as f64 * alpha).0
}

/// Indices `-n..=n` sorted by `{k alpha}` ascending in `[0, 1)`.
///
/// Fails when two positions (including the pair straddling 0) are closer than
/// 4 ulps, which is how irrationality of `alpha` is enforced numerically.
pub fn rotation_order(alpha: f64, n: i64) -> Result<Vec<i64>> {
    if !alpha.is_finite() {
        return Err(Error::NonFinite(alpha));
    }
    let n = n.max(0);
    let mut keyed: Vec<(f64, i64)> = (-n..=n).map(|k| (rotation_position(alpha, k), k)).collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let too_close = |lo: f64, hi: f64| hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(f64::MIN_POSITIVE);
    for w in keyed.windows(2) {
        if too_close(w[0].0, w[1].0) {
            return Err(Error::DuplicatePositions { alpha, first: w[0].1, second: w[1].1 });
        }
    }
    if keyed.len() > 1 {
        let (last, first) = (keyed[keyed.len() - 1], keyed[0]);
        if too_close(last.0, 1.0 + first.0) {
            return Err(Error::DuplicatePositions { alpha, first: last.1, second: first.1 });
        }
    }
    Ok(keyed.into_iter().map(|(_, k)| k).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(x: f64) -> CirclePoint {
        wrap(x).unwrap()
    }

    #[test]
    fn wrap_examples() {
        assert_eq!(cp(1.25).value(), 0.25);
        assert_eq!(cp(-0.25).value(), 0.75);
        assert_eq!(cp(0.0).value(), 0.0);
        assert_eq!(cp(-1e-20).value(), 0.0);
        assert!(wrap(f64::NAN).is_err());
        assert!(wrap(f64::INFINITY).is_err());
    }

    #[test]
    fn rotate_examples() {
        assert!((rotate(cp(0.9), 0.2).value() - 0.1).abs() < 1e-15);
        assert_eq!(rotate(cp(0.37), 0.0), cp(0.37));
        assert_eq!(rotate(CirclePoint::ZERO, 0.618033988749895).value(), 0.618033988749895);
    }

    #[test]
    fn signed_gap_examples() {
        assert!((signed_gap(cp(0.1), cp(0.9)) - 0.2).abs() < 1e-15);
        assert!((signed_gap(cp(0.9), cp(0.1)) + 0.2).abs() < 1e-15);
        assert_eq!(signed_gap(cp(0.75), cp(0.25)), 0.5);
        assert_eq!(signed_gap(cp(0.25), cp(0.75)), 0.5);
    }

    #[test]
    fn rotation_order_golden() {
        let alpha = (5f64.sqrt() - 1.0) / 2.0;
        let order = rotation_order(alpha, 3).unwrap();
        let nonneg: Vec<i64> = order.iter().copied().filter(|&k| k >= 0).collect();
        assert_eq!(nonneg, vec![0, 2, 1, 3]);
        assert_eq!(order, vec![0, -3, 2, -1, 1, -2, 3]);
        let order1 = rotation_order(alpha, 1).unwrap();
        assert_eq!(order1.iter().copied().filter(|&k| k >= 0).collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(rotation_order(alpha, 0).unwrap(), vec![0]);
    }

    #[test]
    fn rational_alpha_is_rejected() {
        assert!(matches!(rotation_order(0.25, 10), Err(Error::DuplicatePositions { .. })));
    }
}
