//! The twist map `f_phi(theta, r) = (theta + r, r + phi(theta + r))` built from `h`,
//! with `phi = h~ + h~^{-1} - 2 Id` and the invariant curve `psi = h~ - Id`.
//!
//! The lift `h~` is pinned by `h~(0)` in `[0, 1)`. Its displacement lies in
//! `(0, 1)` everywhere, so `psi(theta)` is the forward arc from `theta` to `h(theta)`
//! and `phi(theta) = psi(theta) - psi(h^{-1}(theta))`.

use crate::base_map::{DenjoyMap, GapDynamics, Side};
use crate::circle::{signed_gap, CirclePoint};
use crate::numeric::{compensated_sum, gauss_legendre5, piecewise_gauss};
use crate::surgery::ModifiedMap;
use rayon::prelude::*;
use serde::Serialize;
use std::sync::{Arc, OnceLock};

// |u - u_k| below this is treated as the orbit point itself
const ORBIT_SNAP: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JacobianCheck {
    pub det: f64,
    /// `d theta' / d r`
    pub twist: f64,
}

/// One row of the sampled curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurveSample {
    pub theta: f64,
    pub psi: f64,
    pub phi: f64,
    pub h: f64,
    pub hprime_left: f64,
    pub hprime_right: f64,
}

#[derive(Debug)]
pub struct TwistSystem {
    h: Arc<ModifiedMap>,
    phi_integral: OnceLock<f64>,
}

impl TwistSystem {
    pub fn new(h: Arc<ModifiedMap>) -> Self {
        Self { h, phi_integral: OnceLock::new() }
    }

    pub fn h(&self) -> &ModifiedMap {
        &self.h
    }

    pub fn g(&self) -> &DenjoyMap {
        self.h.base()
    }

    pub fn psi_eval(&self, theta: CirclePoint) -> f64 {
        self.h.displacement(theta)
    }

    pub fn phi_eval(&self, theta: CirclePoint) -> f64 {
        self.h.displacement(theta) - self.h.inverse_displacement(theta)
    }

    /// `chi = g~ + g~^{-1} - 2 Id`, the kick of the unmodified map.
    pub fn chi_eval(&self, theta: CirclePoint) -> f64 {
        let g = self.g();
        g.displacement(theta) - g.inverse_displacement(theta)
    }

    /// `psi` at local coordinate `u` of gap `k`, for `-N <= k < N`.
    pub fn psi_local(&self, k: i64, u: f64) -> f64 {
        self.h.gap_shift(k) + (self.h.local_forward(k, u) - u)
    }

    /// `phi` at local coordinate `u` of gap `k`, for `-N < k < N`.
    ///
    /// Differences of this function at nearby `u` keep full relative precision,
    /// which the circle-coordinate route loses near `theta = 1`.
    pub fn phi_local(&self, k: i64, u: f64) -> f64 {
        let h = &*self.h;
        let forward = h.gap_shift(k) + (h.local_forward(k, u) - u);
        let backward = h.gap_shift(k - 1) + (u - h.local_inverse(k - 1, u));
        forward - backward
    }

    /// `chi` in local coordinates, mirroring [`phi_local`](Self::phi_local).
    pub fn chi_local(&self, k: i64, u: f64) -> f64 {
        let g = self.g();
        let forward = g.gap_shift(k) + (g.local_forward(k, u) - u);
        let backward = g.gap_shift(k - 1) + (u - g.local_inverse(k - 1, u));
        forward - backward
    }

    pub fn f_apply(&self, theta: CirclePoint, r: f64) -> (CirclePoint, f64) {
        let t = CirclePoint::from_finite(theta.value() + r);
        (t, r + self.phi_eval(t))
    }

    pub fn f_inverse(&self, theta: CirclePoint, r: f64) -> (CirclePoint, f64) {
        let r0 = r - self.phi_eval(theta);
        (CirclePoint::from_finite(theta.value() - r0), r0)
    }

    /// Distance between `f(theta, psi(theta) + offset)` and `(h(theta), psi(h(theta)) + offset)`.
    ///
    /// `offset = 0` measures invariance of the graph of `psi`.
    pub fn invariance_residual_shifted(&self, theta: CirclePoint, offset: f64) -> f64 {
        let r = self.psi_eval(theta) + offset;
        let (t1, r1) = self.f_apply(theta, r);
        let ht = self.h.eval(theta);
        signed_gap(t1, ht).abs() + (r1 - (self.psi_eval(ht) + offset)).abs()
    }

    pub fn invariance_residual(&self, theta: CirclePoint) -> f64 {
        self.invariance_residual_shifted(theta, 0.0)
    }

    fn jacobian_with<D>(&self, theta: CirclePoint, r: f64, diff: D) -> JacobianCheck
    where
        D: Fn(&dyn Fn(f64, f64) -> (CirclePoint, f64), bool) -> (f64, f64),
    {
        let f = |dt: f64, dr: f64| self.f_apply(CirclePoint::from_finite(theta.value() + dt), r + dr);
        let (dth_dth, dr_dth) = diff(&f, true);
        let (dth_dr, dr_dr) = diff(&f, false);
        JacobianCheck { det: dth_dth * dr_dr - dth_dr * dr_dth, twist: dth_dr }
    }

    /// Central finite-difference Jacobian of `f_phi`.
    pub fn jacobian_check(&self, theta: CirclePoint, r: f64, step: f64) -> JacobianCheck {
        self.jacobian_with(theta, r, |f, along_theta| {
            let (p, m) = if along_theta { (f(step, 0.0), f(-step, 0.0)) } else { (f(0.0, step), f(0.0, -step)) };
            (signed_gap(p.0, m.0) / (2.0 * step), (p.1 - m.1) / (2.0 * step))
        })
    }

    /// One-sided finite-difference Jacobian; `side` selects the half-plane of the perturbations.
    pub fn jacobian_one_sided(&self, theta: CirclePoint, r: f64, step: f64, side: Side) -> JacobianCheck {
        let s = match side {
            Side::Left => -step,
            Side::Right => step,
        };
        self.jacobian_with(theta, r, |f, along_theta| {
            let c = f(0.0, 0.0);
            let p = if along_theta { f(s, 0.0) } else { f(0.0, s) };
            (signed_gap(p.0, c.0) / s, (p.1 - c.1) / s)
        })
    }

    /// `h'` from `side`; at orbit points of surgered gaps the one-sided targets, elsewhere `h'`.
    pub fn h_prime_onesided(&self, theta: CirclePoint, side: Side) -> f64 {
        if let crate::denjoy::Hit::Gap { k, u } = self.h.table().locate(theta) {
            if let Some(s) = self.h.surgery(k) {
                if (u - s.u).abs() <= ORBIT_SNAP {
                    return self.h.local_slope(k, s.u, side);
                }
            }
        }
        self.h.slope(theta, side)
    }

    /// Points of gap `k` (local coordinates) where the integrand of `phi` may lose smoothness.
    fn gap_breaks(&self, k: i64) -> Vec<f64> {
        let table = self.h.table();
        let n = table.radius();
        let len = table.len(k);
        let own = |j: i64| {
            let l = table.len(j);
            let mut b = vec![0.25 * l, 0.75 * l];
            if let Some(s) = self.h.surgery(j) {
                b.extend(s.breakpoints());
            }
            b
        };
        let mut breaks = vec![0.0, len];
        if k < n {
            breaks.extend(own(k));
        }
        if k > -n {
            breaks.extend(own(k - 1).into_iter().map(|b| self.h.local_forward(k - 1, b)));
        }
        breaks.retain(|b| *b >= 0.0 && *b <= len);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        breaks
    }

    /// `int_T phi` by Gauss-Legendre panels aligned with every gap, residual arc and surgery piece.
    pub fn integrate_phi(&self) -> f64 {
        *self.phi_integral.get_or_init(|| {
            let table = self.h.table();
            let n = table.radius();
            let parts: Vec<f64> = table
                .gaps()
                .par_iter()
                .map(|gap| {
                    let k = gap.k;
                    let breaks = self.gap_breaks(k);
                    let in_gap = if k > -n && k < n {
                        piecewise_gauss(&|u| self.phi_local(k, u), &breaks)
                    } else {
                        piecewise_gauss(&|u| self.phi_eval(table.point(k, u)), &breaks)
                    };
                    let end = gap.end();
                    let arc = gauss_legendre5(
                        |t| self.phi_eval(CirclePoint::from_finite(end + t)),
                        0.0,
                        table.residuals()[gap.rank],
                    );
                    in_gap + arc
                })
                .collect();
            compensated_sum(parts)
        })
    }

    /// `n` equispaced rows plus one row per orbit point of a surgered gap, sorted by `theta`.
    pub fn sample_curve(&self, n: usize) -> Vec<CurveSample> {
        let h = &*self.h;
        let table = h.table();
        let mut rows: Vec<CurveSample> = (0..n)
            .into_par_iter()
            .map(|i| {
                let t = CirclePoint::from_finite(i as f64 / n as f64);
                let d = h.slope(t, Side::Right);
                CurveSample {
                    theta: t.value(),
                    psi: self.psi_eval(t),
                    phi: self.phi_eval(t),
                    h: h.eval(t).value(),
                    hprime_left: d,
                    hprime_right: d,
                }
            })
            .collect();
        for s in h.surgeries() {
            rows.push(CurveSample {
                theta: table.point(s.k, s.u).value(),
                psi: self.psi_local(s.k, s.u),
                phi: self.phi_local(s.k, s.u),
                h: table.point(s.k + 1, s.anchor).value(),
                hprime_left: s.left.target_slope,
                hprime_right: s.right.target_slope,
            });
        }
        rows.sort_by(|a, b| a.theta.total_cmp(&b.theta));
        rows
    }
}
