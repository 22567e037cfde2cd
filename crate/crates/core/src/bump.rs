//! The polynomial bump `eta` supported on `[1/4, 3/4]` with unit mass.

use crate::error::{Error, Result};

/// `eta(t) = c (s(1-s))^p` with `s = 2(t - 1/4)` on `[1/4, 3/4]`, zero elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct BumpSpec {
    p: u32,
    c: f64,
    eta_max: f64,
    // coefficients of the antiderivative of (s(1-s))^p in powers s^(p+1+j)
    antideriv: Vec<f64>,
}

impl BumpSpec {
    pub fn new(p: u32) -> Result<Self> {
        if !(2..=12).contains(&p) {
            return Err(Error::Config(vec![format!("bump_p = {p} must lie in 2..=12")]));
        }
        let mut antideriv = Vec::with_capacity(p as usize + 1);
        let mut binom = 1.0f64;
        for j in 0..=p {
            if j > 0 {
                binom = binom * f64::from(p - j + 1) / f64::from(j);
            }
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            antideriv.push(sign * binom / f64::from(p + j + 1));
        }
        // int_{1/4}^{3/4} (s(1-s))^p dt = B(p+1, p+1) / 2
        let mut beta = 1.0f64;
        for i in 1..=p {
            beta *= f64::from(i) / f64::from(p + i);
        }
        beta /= f64::from(2 * p + 1);
        let c = 2.0 / beta;
        let eta_max = c / 4f64.powi(p as i32);
        Ok(Self { p, c, eta_max, antideriv })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn normalizer(&self) -> f64 {
        self.c
    }

    pub fn eta_max(&self) -> f64 {
        self.eta_max
    }

    pub fn eta(&self, t: f64) -> f64 {
        if !(0.25..=0.75).contains(&t) {
            return 0.0;
        }
        let s = 2.0 * (t - 0.25);
        self.c * (s * (1.0 - s)).powi(self.p as i32)
    }

    /// `E(t) = int_0^t eta`; exactly 0 below the support and 1 above it.
    pub fn antiderivative(&self, t: f64) -> f64 {
        if t <= 0.25 {
            return 0.0;
        }
        if t >= 0.75 {
            return 1.0;
        }
        let s = 2.0 * (t - 0.25);
        if s <= 0.5 {
            0.5 * self.c * self.poly(s)
        } else {
            1.0 - 0.5 * self.c * self.poly(1.0 - s)
        }
    }

    /// Largest value of `eta` on `[t0, t1]`; `eta` is unimodal with its peak at 1/2.
    pub fn sup_on(&self, t0: f64, t1: f64) -> f64 {
        self.eta(0.5f64.clamp(t0.min(t1), t0.max(t1)))
    }

    fn poly(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for coef in self.antideriv.iter().rev() {
            acc = acc * s + coef;
        }
        acc * s.powi(self.p as i32 + 1)
    }
}

pub fn eta(t: f64, spec: &BumpSpec) -> f64 {
    spec.eta(t)
}

pub fn eta_antiderivative(t: f64, spec: &BumpSpec) -> f64 {
    spec.antiderivative(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_bump_constants() {
        let b = BumpSpec::new(3).unwrap();
        assert!((b.normalizer() - 280.0).abs() < 1e-10);
        assert!((b.eta_max() - 4.375).abs() < 1e-12);
        assert!((b.eta(0.5) - 4.375).abs() < 1e-12);
        assert_eq!(b.eta(0.1), 0.0);
        assert_eq!(b.eta(0.25), 0.0);
        assert_eq!(b.eta(0.9), 0.0);
    }

    #[test]
    fn antiderivative_anchors() {
        for p in 2..=6 {
            let b = BumpSpec::new(p).unwrap();
            assert_eq!(b.antiderivative(0.0), 0.0);
            assert_eq!(b.antiderivative(0.25), 0.0);
            assert_eq!(b.antiderivative(0.75), 1.0);
            assert_eq!(b.antiderivative(1.0), 1.0);
            // the alternating power form loses a few digits as p grows
            let tol = if p <= 3 { 1e-15 } else { 1e-13 };
            assert!((b.antiderivative(0.5) - 0.5).abs() < tol, "p = {p}");
        }
    }

    #[test]
    fn antiderivative_matches_quadrature_of_eta() {
        let b = BumpSpec::new(3).unwrap();
        // composite Simpson oracle
        let n = 20_000;
        let t_end = 0.61;
        let h = t_end / n as f64;
        let mut acc = b.eta(0.0) + b.eta(t_end);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * b.eta(i as f64 * h);
        }
        let simpson = acc * h / 3.0;
        assert!((simpson - b.antiderivative(t_end)).abs() < 1e-10);
    }

    #[test]
    fn antiderivative_is_monotone() {
        let b = BumpSpec::new(4).unwrap();
        let mut prev = 0.0;
        for i in 0..=10_000 {
            let e = b.antiderivative(i as f64 / 10_000.0);
            assert!(e >= prev);
            prev = e;
        }
    }

    #[test]
    fn rejects_low_smoothness() {
        assert!(BumpSpec::new(1).is_err());
    }
}
