//! One-sided slope sequences and the derivative surgery producing `h`.
//!
//! Along the marked orbit the left and right slopes of `h` follow the
//! recursion `beta_k = Phi_{m_k}(beta_{k-1})`, `Phi_m(t) = m - 1/t`, on each side
//! independently. Both sides then satisfy `beta_k + 1/beta_{k-1} = m_k` for
//! `k != 0`, and the seed makes the two sides agree on the value `m~_0` at `k = 0`.
//! On each half-gap the derivative of `g` is replaced near `x_k` by an affine
//! ramp reaching the prescribed slope, and the integral lost by the ramp is
//! given back by a rescaled bump placed between the ramp and the gap end.

use crate::base_map::{DenjoyMap, GapDynamics, OrbitTable, Side};
use crate::denjoy::GapTable;
use crate::error::{Error, Result};
use crate::numeric::invert_monotone;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const MAX_HALVINGS: u32 = 60;
const BUMP_SAMPLES: usize = 1024;

/// `Phi_m(t) = m - 1/t` on `t > 0`.
pub fn phi_m(m: f64, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite() && m.is_finite()) {
        return Err(Error::Domain { op: "phi_m", param: m, arg: t });
    }
    Ok(m - 1.0 / t)
}

/// `Phi_m^{-1}(t) = 1/(m - t)` on `t < m`.
pub fn phi_m_inv(m: f64, t: f64) -> Result<f64> {
    if !(t < m && t.is_finite() && m.is_finite()) {
        return Err(Error::Domain { op: "phi_m_inv", param: m, arg: t });
    }
    Ok(1.0 / (m - t))
}

/// Larger fixed point of `Phi_{2+eps}`.
pub fn fixed_point_plus(eps: f64) -> f64 {
    let eps = eps.max(0.0);
    (2.0 + eps + (eps * (4.0 + eps)).sqrt()) / 2.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedOffsets {
    /// `beta_0^L - alpha_0`
    #[serde(rename = "dL")]
    pub dl: f64,
    /// `beta_0^R - alpha_0`
    #[serde(rename = "dR")]
    pub dr: f64,
    /// `beta_{-1}^L / alpha_{-1}`
    #[serde(rename = "fL")]
    pub fl: f64,
}

impl Default for SeedOffsets {
    fn default() -> Self {
        Self { dl: 0.2, dr: 0.1, fl: 0.9 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeEntry {
    pub k: i64,
    #[serde(rename = "beta_L")]
    pub left: f64,
    #[serde(rename = "beta_R")]
    pub right: f64,
}

/// Target one-sided derivatives `beta_k^L`, `beta_k^R` of `h` along the orbit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeSeq {
    #[serde(rename = "K_orbit")]
    radius: i64,
    m_tilde0: f64,
    offsets: SeedOffsets,
    entries: Vec<SlopeEntry>,
}

impl SlopeSeq {
    pub fn from_entries(radius: i64, m_tilde0: f64, offsets: SeedOffsets, entries: Vec<SlopeEntry>) -> Result<Self> {
        let ok = entries.len() == (2 * radius + 1) as usize
            && entries.iter().enumerate().all(|(i, e)| e.k == i as i64 - radius && e.left > 0.0 && e.right > 0.0);
        if !ok {
            return Err(Error::InvalidBuild(format!("slope entries must cover |k| <= {radius} with positive values")));
        }
        Ok(Self { radius, m_tilde0, offsets, entries })
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn m_tilde0(&self) -> f64 {
        self.m_tilde0
    }

    pub fn offsets(&self) -> &SeedOffsets {
        &self.offsets
    }

    pub fn entries(&self) -> &[SlopeEntry] {
        &self.entries
    }

    pub fn beta(&self, k: i64, side: Side) -> f64 {
        let e = &self.entries[(k + self.radius) as usize];
        match side {
            Side::Left => e.left,
            Side::Right => e.right,
        }
    }

    /// Copy with one slope shifted by `delta`, bypassing the recursion.
    pub fn with_adjusted(&self, k: i64, side: Side, delta: f64) -> Self {
        let mut out = self.clone();
        let e = &mut out.entries[(k + self.radius) as usize];
        match side {
            Side::Left => e.left += delta,
            Side::Right => e.right += delta,
        }
        out
    }

    /// Balance residual `beta_k + 1/beta_{k-1} - target` on one side.
    pub fn balance_residual(&self, k: i64, side: Side, orbit: &OrbitTable) -> f64 {
        let target = if k == 0 { self.m_tilde0 } else { orbit.m(k) };
        self.beta(k, side) + 1.0 / self.beta(k - 1, side) - target
    }

    /// Every violated invariant, with the offending index.
    pub fn violations(&self, orbit: &OrbitTable) -> Vec<String> {
        let mut out = Vec::new();
        let b0 = (self.beta(0, Side::Left), self.beta(0, Side::Right));
        if b0.0 == b0.1 {
            out.push("beta_0^R != beta_0^L violated".to_string());
        }
        if !(self.m_tilde0 > orbit.m(0)) {
            out.push(format!("m~0 = {} must exceed m_0 = {}", self.m_tilde0, orbit.m(0)));
        }
        for k in (1 - self.radius)..=self.radius {
            for side in [Side::Left, Side::Right] {
                let r = self.balance_residual(k, side, orbit);
                let scale = if k == 0 { self.m_tilde0 } else { orbit.m(k) };
                if !(r.abs() <= 1e-12 * scale.abs().max(1.0)) {
                    out.push(format!("balance at k = {k}, side {}: residual {r:e}", side.letter()));
                }
            }
        }
        for k in -self.radius..=self.radius {
            for side in [Side::Left, Side::Right] {
                let (b, a) = (self.beta(k, side), orbit.alpha(k));
                let ok = if k >= 0 { b > a } else { b > 0.0 && b < a };
                if !ok {
                    out.push(format!("domination at k = {k}, side {}: beta = {b}, alpha = {a}", side.letter()));
                }
            }
        }
        out
    }
}

/// Seeds `beta_0^S`, `beta_{-1}^S` from the offsets and fills both directions by the recursion.
pub fn seed_slopes(orbit: &OrbitTable, offsets: SeedOffsets) -> Result<SlopeSeq> {
    let infeasible = |k: i64, reason: String| Error::SeedInfeasible { k, reason };
    let SeedOffsets { dl, dr, fl } = offsets;
    if !(dl > 0.0 && dr > 0.0) {
        return Err(infeasible(0, format!("offsets dL = {dl}, dR = {dr} must be positive")));
    }
    if dl == dr {
        return Err(infeasible(0, "beta_0^R != beta_0^L violated (dL = dR)".into()));
    }
    if !(fl > 0.0 && fl < 1.0) {
        return Err(infeasible(-1, format!("fL = {fl} must lie in (0, 1)")));
    }
    let radius = orbit.radius();
    let (a0, am1) = (orbit.alpha(0), orbit.alpha(-1));
    let b0l = a0 + dl;
    let b0r = a0 + dr;
    let bm1l = fl * am1;
    let m_tilde0 = b0l + 1.0 / bm1l;
    let bm1r = 1.0 / (m_tilde0 - b0r);
    if !(bm1r > 0.0 && bm1r < am1) {
        return Err(infeasible(
            -1,
            format!("balance forces beta_-1^R = {bm1r}, outside (0, alpha_-1 = {am1}); adjust dL, dR or fL"),
        ));
    }

    let n = (2 * radius + 1) as usize;
    let idx = |k: i64| (k + radius) as usize;
    let mut left = vec![0.0; n];
    let mut right = vec![0.0; n];
    left[idx(0)] = b0l;
    right[idx(0)] = b0r;
    left[idx(-1)] = bm1l;
    right[idx(-1)] = bm1r;
    let wrap_err = |k: i64| move |e: Error| Error::SeedInfeasible { k, reason: e.to_string() };
    for k in 1..=radius {
        left[idx(k)] = phi_m(orbit.m(k), left[idx(k - 1)]).map_err(wrap_err(k))?;
        right[idx(k)] = phi_m(orbit.m(k), right[idx(k - 1)]).map_err(wrap_err(k))?;
    }
    for k in ((1 - radius)..=-1).rev() {
        left[idx(k - 1)] = phi_m_inv(orbit.m(k), left[idx(k)]).map_err(wrap_err(k - 1))?;
        right[idx(k - 1)] = phi_m_inv(orbit.m(k), right[idx(k)]).map_err(wrap_err(k - 1))?;
    }
    let entries = (-radius..=radius).map(|k| SlopeEntry { k, left: left[idx(k)], right: right[idx(k)] }).collect();
    let seq = SlopeSeq { radius, m_tilde0, offsets, entries };
    if let Some(first) = seq.violations(orbit).into_iter().next() {
        return Err(infeasible(0, first));
    }
    Ok(seq)
}

/// Modified derivative on one half-gap, in local coordinates of `I_k`.
///
/// On the ramp `delta` is affine, running from `g'` at the far ramp end to
/// `target_slope` at `x_k`. The correction adds `correction_amplitude` times the
/// unit-mass bump `eta((u - start)/width)/width` on `[correction_start,
/// correction_start + correction_width]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurgeryProfile {
    pub k: i64,
    pub side: Side,
    pub target_slope: f64,
    pub ramp_width: f64,
    /// `g'` at the far end of the ramp.
    pub ramp_base_slope: f64,
    pub correction_start: f64,
    pub correction_width: f64,
    /// Signed mass of the correction, minus the integral gained on the ramp.
    pub correction_amplitude: f64,
    /// Sampled `sup |delta - 1|` over the half-gap.
    pub sup_deviation: f64,
    /// `max(sup |g' - 1|, |beta - 1|) + 1/(1 + |k|)` over the half-gap.
    pub point4_limit: f64,
    pub min_delta: f64,
    pub halvings: u32,
}

impl SurgeryProfile {
    /// Slope of the affine ramp in `d = u - u_k`.
    pub fn ramp_slope(&self) -> f64 {
        match self.side {
            Side::Left => (self.target_slope - self.ramp_base_slope) / self.ramp_width,
            Side::Right => (self.ramp_base_slope - self.target_slope) / self.ramp_width,
        }
    }

    /// `correction_center` of the bump placement.
    pub fn correction_center(&self) -> f64 {
        self.correction_start + 0.5 * self.correction_width
    }

    /// Integral of the ramp over `[u_k, u_k + d]` (signed), i.e. `H(u_k + d) - H(u_k)` on the ramp.
    fn ramp_integral(&self, d: f64) -> f64 {
        d * (self.target_slope + 0.5 * self.ramp_slope() * d)
    }
}

fn protected_width(len: f64, half_len: f64) -> f64 {
    (len / 8.0).min(half_len / 4.0)
}

/// Builds the surgery on the half-gap of `I_k` on `side` of `x_k`.
///
/// The ramp width starts at a quarter of the half-gap and is halved until the
/// modified derivative is positive and within the sup bound.
pub fn build_surgery(
    k: i64,
    side: Side,
    slopes: &SlopeSeq,
    orbit: &OrbitTable,
    g: &DenjoyMap,
) -> Result<SurgeryProfile> {
    let table = g.table();
    let len = table.len(k);
    let uk = orbit.u(k);
    let beta = slopes.beta(k, side);
    let anchor = g.local_forward(k, uk);
    let (half_lo, half_hi) = match side {
        Side::Left => (0.0, uk),
        Side::Right => (uk, len),
    };
    let half_len = half_hi - half_lo;
    if !(half_len > 0.0) {
        return Err(Error::SurgeryInfeasible {
            k,
            side: side.letter(),
            sup_deviation: f64::NAN,
            limit: 0.0,
            min_delta: 0.0,
        });
    }
    let protect = protected_width(len, half_len);
    let sup_g = g.sup_deviation_on(k, half_lo, half_hi);
    let limit = sup_g.max((beta - 1.0).abs()) + 1.0 / (1.0 + k.abs() as f64);
    let ratio_m1 = g.ratio(k) - 1.0;
    let bump = g.bump();

    let mut eps = half_len / 4.0;
    let mut last = (f64::NAN, f64::NAN);
    for halvings in 0..=MAX_HALVINGS {
        let (far, region_lo, region_hi, delta_mass) = match side {
            Side::Left => {
                let far = uk - eps;
                let gf = g.gap_derivative(k, far);
                let gained = eps * (gf + beta) / 2.0 - (anchor - g.local_forward(k, far));
                (gf, protect, far, gained)
            }
            Side::Right => {
                let far = uk + eps;
                let gf = g.gap_derivative(k, far);
                let gained = eps * (beta + gf) / 2.0 - (g.local_forward(k, far) - anchor);
                (gf, far, len - protect, gained)
            }
        };
        let width = region_hi - region_lo;
        if width > 0.0 {
            let amplitude = -delta_mass;
            let mut sup_dev = sup_g.max((beta - 1.0).abs()).max((far - 1.0).abs());
            let mut min_delta = beta.min(far).min(1.0 - sup_g);
            for i in 0..=BUMP_SAMPLES {
                let t = 0.25 + 0.5 * i as f64 / BUMP_SAMPLES as f64;
                let u = region_lo + t * width;
                let d = 1.0 + ratio_m1 * bump.eta(u / len) + amplitude / width * bump.eta(t);
                sup_dev = sup_dev.max((d - 1.0).abs());
                min_delta = min_delta.min(d);
            }
            if min_delta > 0.0 && sup_dev <= limit {
                return Ok(SurgeryProfile {
                    k,
                    side,
                    target_slope: beta,
                    ramp_width: eps,
                    ramp_base_slope: far,
                    correction_start: region_lo,
                    correction_width: width,
                    correction_amplitude: amplitude,
                    sup_deviation: sup_dev,
                    point4_limit: limit,
                    min_delta,
                    halvings,
                });
            }
            last = (sup_dev, min_delta);
        }
        eps /= 2.0;
    }
    Err(Error::SurgeryInfeasible { k, side: side.letter(), sup_deviation: last.0, limit, min_delta: last.1 })
}

/// Both half-gap surgeries of `I_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapSurgery {
    pub k: i64,
    /// Local coordinate of `x_k`.
    pub u: f64,
    /// `g_k(u_k)`, the local coordinate of `x_{k+1}`; `h` keeps it.
    pub anchor: f64,
    pub left: SurgeryProfile,
    pub right: SurgeryProfile,
}

impl GapSurgery {
    pub fn profile(&self, side: Side) -> &SurgeryProfile {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    /// Local points where `delta` or its derivative may jump, plus the ends of the bump supports.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = vec![self.u - self.left.ramp_width, self.u, self.u + self.right.ramp_width];
        for p in [&self.left, &self.right] {
            out.push(p.correction_start + 0.25 * p.correction_width);
            out.push(p.correction_start + 0.75 * p.correction_width);
        }
        out
    }
}

/// The homeomorphism `h`: `g` with derivative surgery on every gap `|k| <= K_orbit`.
#[derive(Clone, Debug)]
pub struct ModifiedMap {
    base: DenjoyMap,
    radius: i64,
    gaps: Vec<GapSurgery>,
}

impl ModifiedMap {
    pub fn build(base: DenjoyMap, orbit: &OrbitTable, slopes: &SlopeSeq) -> Result<Self> {
        let radius = slopes.radius();
        if radius != orbit.radius() {
            return Err(Error::InvalidBuild(format!(
                "slope radius {radius} differs from orbit radius {}",
                orbit.radius()
            )));
        }
        let gaps = (-radius..=radius)
            .into_par_iter()
            .map(|k| {
                Ok(GapSurgery {
                    k,
                    u: orbit.u(k),
                    anchor: base.local_forward(k, orbit.u(k)),
                    left: build_surgery(k, Side::Left, slopes, orbit, &base)?,
                    right: build_surgery(k, Side::Right, slopes, orbit, &base)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { base, radius, gaps })
    }

    pub fn base(&self) -> &DenjoyMap {
        &self.base
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn surgeries(&self) -> &[GapSurgery] {
        &self.gaps
    }

    pub fn surgery(&self, k: i64) -> Option<&GapSurgery> {
        if k.abs() <= self.radius {
            Some(&self.gaps[(k + self.radius) as usize])
        } else {
            None
        }
    }

    /// Modified derivative `delta_k(u)`, using the `side` formula exactly at `x_k`.
    fn surgered_slope(&self, s: &GapSurgery, u: f64, side: Side) -> f64 {
        let p = if u < s.u || (u == s.u && side == Side::Left) { &s.left } else { &s.right };
        let d = u - s.u;
        if d.abs() <= p.ramp_width {
            return p.target_slope + p.ramp_slope() * d;
        }
        let g = self.base.gap_derivative(s.k, u);
        let t = (u - p.correction_start) / p.correction_width;
        g + p.correction_amplitude / p.correction_width * self.base.bump().eta(t)
    }

    fn surgered_forward(&self, s: &GapSurgery, u: f64) -> f64 {
        let p = if u <= s.u { &s.left } else { &s.right };
        let d = u - s.u;
        if d.abs() <= p.ramp_width {
            return s.anchor + p.ramp_integral(d);
        }
        let g = self.base.local_forward(s.k, u);
        let t = (u - p.correction_start) / p.correction_width;
        let corr = p.correction_amplitude * self.base.bump().antiderivative(t);
        match p.side {
            Side::Left => g + corr,
            // the ramp gained -amplitude before the correction starts
            Side::Right => g - p.correction_amplitude + corr,
        }
    }

    fn surgered_inverse(&self, s: &GapSurgery, v: f64) -> f64 {
        let p = if v <= s.anchor { &s.left } else { &s.right };
        let dv = v - s.anchor;
        let reach = p.ramp_integral(match p.side {
            Side::Left => -p.ramp_width,
            Side::Right => p.ramp_width,
        });
        let on_ramp = match p.side {
            Side::Left => dv >= reach,
            Side::Right => dv <= reach,
        };
        if on_ramp {
            // beta d + c d^2 / 2 = dv, root continuous at dv = 0
            let beta = p.target_slope;
            let disc = (beta * beta + 2.0 * p.ramp_slope() * dv).max(0.0);
            return s.u + 2.0 * dv / (beta + disc.sqrt());
        }
        let (lo, hi) = match p.side {
            Side::Left => (0.0, s.u - p.ramp_width),
            Side::Right => (s.u + p.ramp_width, self.base.table().len(s.k)),
        };
        invert_monotone(|u| self.surgered_forward(s, u), |u| self.surgered_slope(s, u, Side::Right), v, lo, hi)
    }

    /// Largest radius around `x_k` on `side` where `h` is a single quadratic piece.
    pub fn ramp_width(&self, k: i64, side: Side) -> Option<f64> {
        self.surgery(k).map(|s| s.profile(side).ramp_width)
    }

    /// Length of the image under `h` of the ramp of `I_k` on `side`.
    pub fn ramp_image_width(&self, k: i64, side: Side) -> Option<f64> {
        self.surgery(k).map(|s| {
            let p = s.profile(side);
            let d = match side {
                Side::Left => -p.ramp_width,
                Side::Right => p.ramp_width,
            };
            p.ramp_integral(d).abs()
        })
    }
}

impl GapDynamics for ModifiedMap {
    fn table(&self) -> &GapTable {
        self.base.table()
    }

    fn local_forward(&self, k: i64, u: f64) -> f64 {
        match self.surgery(k) {
            Some(s) => self.surgered_forward(s, u),
            None => self.base.local_forward(k, u),
        }
    }

    fn local_inverse(&self, k: i64, v: f64) -> f64 {
        match self.surgery(k) {
            Some(s) => self.surgered_inverse(s, v),
            None => self.base.local_inverse(k, v),
        }
    }

    fn local_slope(&self, k: i64, u: f64, side: Side) -> f64 {
        match self.surgery(k) {
            Some(s) => self.surgered_slope(s, u, side),
            None => self.base.gap_derivative(k, u),
        }
    }
}
