//! The C¹ Denjoy diffeomorphism `g` and the marked orbit `x_k = g^k(x_0)`.

use crate::bump::BumpSpec;
use crate::circle::{forward_arc, CirclePoint};
use crate::denjoy::{GapTable, Piece};
use crate::error::{Error, Result};
use crate::numeric::invert_monotone;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Direction of approach for one-sided quantities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "L")]
    Left,
    #[serde(rename = "R")]
    Right,
}

impl Side {
    pub fn letter(self) -> char {
        match self {
            Side::Left => 'L',
            Side::Right => 'R',
        }
    }
}

/// A degree-one circle homeomorphism sending each stored gap `I_k` onto `I_{k+1}`.
///
/// Implementors provide the per-gap maps in local coordinates; the provided
/// methods extend them to the whole circle using the table partition, mapping
/// the residual arcs (and the two boundary gaps `I_N`, `I_{-N}`) linearly.
pub trait GapDynamics: Send + Sync {
    fn table(&self) -> &GapTable;

    /// `I_k -> I_{k+1}` in local coordinates, for `-N <= k < N`.
    fn local_forward(&self, k: i64, u: f64) -> f64;

    /// Inverse of [`local_forward`](Self::local_forward): `v` in `I_{k+1}` to `u` in `I_k`.
    fn local_inverse(&self, k: i64, v: f64) -> f64;

    /// One-sided derivative of the gap map at local coordinate `u`.
    fn local_slope(&self, k: i64, u: f64, side: Side) -> f64;

    fn eval(&self, x: CirclePoint) -> CirclePoint {
        match self.table().forward_piece(x) {
            Piece::Gap { k, u } => self.table().point(k + 1, self.local_forward(k, u)),
            Piece::Arc(arc) => arc.image(),
        }
    }

    fn inverse(&self, y: CirclePoint) -> CirclePoint {
        match self.table().inverse_piece(y) {
            Piece::Gap { k, u: v } => self.table().point(k - 1, self.local_inverse(k - 1, v)),
            Piece::Arc(arc) => arc.image(),
        }
    }

    fn slope(&self, x: CirclePoint, side: Side) -> f64 {
        match self.table().forward_piece(x) {
            Piece::Gap { k, u } => self.local_slope(k, u, side),
            Piece::Arc(arc) => arc.slope(),
        }
    }

    /// Arc length of the forward jump from `start(k)` to `start(k+1)`.
    fn gap_shift(&self, k: i64) -> f64 {
        forward_arc(self.table().start(k), self.table().start(k + 1))
    }

    /// Lift displacement `F(x) - x` in `(0, 1)`, for the lift with `F(0)` in `[0, 1)`.
    fn displacement(&self, x: CirclePoint) -> f64 {
        match self.table().forward_piece(x) {
            Piece::Gap { k, u } => self.gap_shift(k) + (self.local_forward(k, u) - u),
            Piece::Arc(arc) => forward_arc(x.value(), arc.image().value()),
        }
    }

    /// `y - F^{-1}(y)` for the same lift, in `(0, 1)`.
    fn inverse_displacement(&self, y: CirclePoint) -> f64 {
        match self.table().inverse_piece(y) {
            Piece::Gap { k, u: v } => {
                let u = self.local_inverse(k - 1, v);
                self.gap_shift(k - 1) + (v - u)
            }
            Piece::Arc(arc) => forward_arc(arc.image().value(), y.value()),
        }
    }
}

/// `u + (l_{k+1} - l_k) E(u / l_k)`: the model map `I_k -> I_{k+1}` in local coordinates.
pub fn gap_forward(k: i64, u: f64, table: &GapTable, spec: &BumpSpec) -> Result<f64> {
    if k < -table.radius() || k + 1 > table.radius() {
        return Err(Error::OrbitBeyondTable { k: k + 1, radius: table.radius() });
    }
    let (lk, lk1) = (table.len(k), table.len(k + 1));
    Ok(u + (lk1 - lk) * spec.antiderivative(u / lk))
}

/// The Denjoy counter-example `g`.
#[derive(Clone, Debug)]
pub struct DenjoyMap {
    table: Arc<GapTable>,
    bump: BumpSpec,
}

impl DenjoyMap {
    pub fn new(table: Arc<GapTable>, bump: BumpSpec) -> Self {
        Self { table, bump }
    }

    pub fn shared_table(&self) -> &Arc<GapTable> {
        &self.table
    }

    pub fn bump(&self) -> &BumpSpec {
        &self.bump
    }

    /// `l_{k+1} / l_k`.
    pub fn ratio(&self, k: i64) -> f64 {
        self.table.len(k + 1) / self.table.len(k)
    }

    /// `g'` inside gap `k`.
    pub fn gap_derivative(&self, k: i64, u: f64) -> f64 {
        let lk = self.table.len(k);
        1.0 + (self.ratio(k) - 1.0) * self.bump.eta(u / lk)
    }

    /// `sup |g' - 1|` over local coordinates `[u0, u1]` of gap `k`.
    pub fn sup_deviation_on(&self, k: i64, u0: f64, u1: f64) -> f64 {
        let lk = self.table.len(k);
        (self.ratio(k) - 1.0).abs() * self.bump.sup_on(u0 / lk, u1 / lk)
    }

    /// `sup |g'_k - 1|` over the whole gap.
    pub fn gap_sup_deviation(&self, k: i64) -> f64 {
        (self.ratio(k) - 1.0).abs() * self.bump.eta_max()
    }

    // assumes -N <= k < N
    pub(crate) fn forward_unchecked(&self, k: i64, u: f64) -> f64 {
        let (lk, lk1) = (self.table.len(k), self.table.len(k + 1));
        u + (lk1 - lk) * self.bump.antiderivative(u / lk)
    }
}

impl GapDynamics for DenjoyMap {
    fn table(&self) -> &GapTable {
        &self.table
    }

    fn local_forward(&self, k: i64, u: f64) -> f64 {
        self.forward_unchecked(k, u)
    }

    fn local_inverse(&self, k: i64, v: f64) -> f64 {
        let lk = self.table.len(k);
        invert_monotone(|u| self.forward_unchecked(k, u), |u| self.gap_derivative(k, u), v, 0.0, lk)
    }

    fn local_slope(&self, k: i64, u: f64, _side: Side) -> f64 {
        self.gap_derivative(k, u)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitEntry {
    pub k: i64,
    /// Local coordinate of `x_k` in `I_k`.
    pub u: f64,
    /// `g'(x_k)`.
    pub alpha: f64,
    /// `alpha_k + 1 / alpha_{k-1}`.
    pub m: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitTable {
    #[serde(rename = "K_orbit")]
    radius: i64,
    x0_fraction: f64,
    entries: Vec<OrbitEntry>,
}

impl OrbitTable {
    pub fn from_entries(radius: i64, x0_fraction: f64, entries: Vec<OrbitEntry>) -> Result<Self> {
        let ok = radius >= 1
            && entries.len() == (2 * radius + 1) as usize
            && entries.iter().enumerate().all(|(i, e)| e.k == i as i64 - radius);
        if !ok {
            return Err(Error::InvalidBuild(format!("orbit entries do not cover |k| <= {radius}")));
        }
        Ok(Self { radius, x0_fraction, entries })
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn x0_fraction(&self) -> f64 {
        self.x0_fraction
    }

    pub fn entries(&self) -> &[OrbitEntry] {
        &self.entries
    }

    pub fn contains(&self, k: i64) -> bool {
        k.abs() <= self.radius
    }

    pub fn entry(&self, k: i64) -> &OrbitEntry {
        &self.entries[(k + self.radius) as usize]
    }

    pub fn u(&self, k: i64) -> f64 {
        self.entry(k).u
    }

    pub fn alpha(&self, k: i64) -> f64 {
        self.entry(k).alpha
    }

    pub fn m(&self, k: i64) -> f64 {
        self.entry(k).m
    }
}

/// Follows `x_0 = a_0 + x0_fraction * l_0` forward with the closed-form gap maps and
/// backward by per-gap inversion.
pub fn build_orbit(x0_fraction: f64, radius: i64, g: &DenjoyMap) -> Result<OrbitTable> {
    let table = g.table();
    if !(x0_fraction > 0.0 && x0_fraction < 1.0) {
        return Err(Error::Config(vec![format!("x0_fraction = {x0_fraction} must lie in (0, 1)")]));
    }
    if radius < 1 {
        return Err(Error::Config(vec![format!("K_orbit = {radius} must be >= 1")]));
    }
    if radius + 1 > table.radius() {
        return Err(Error::OrbitBeyondTable { k: radius + 1, radius: table.radius() });
    }
    // positions for k = -radius-1 ..= radius; the extra backward point feeds m_{-radius}
    let n = (2 * radius + 2) as usize;
    let offset = radius + 1;
    let mut u = vec![0.0; n];
    u[offset as usize] = x0_fraction * table.len(0);
    for k in 0..radius {
        u[(k + 1 + offset) as usize] = gap_forward(k, u[(k + offset) as usize], table, g.bump())?;
    }
    for k in (-radius..=0).rev() {
        u[(k - 1 + offset) as usize] = g.local_inverse(k - 1, u[(k + offset) as usize]);
    }
    let alpha = |k: i64| g.gap_derivative(k, u[(k + offset) as usize]);
    let entries = (-radius..=radius)
        .map(|k| {
            let a = alpha(k);
            OrbitEntry { k, u: u[(k + offset) as usize], alpha: a, m: a + 1.0 / alpha(k - 1) }
        })
        .collect();
    Ok(OrbitTable { radius, x0_fraction, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::{signed_gap, wrap};
    use crate::denjoy::LengthFamily;

    fn map(n: i64) -> DenjoyMap {
        let bump = BumpSpec::new(3).unwrap();
        let alpha = (5f64.sqrt() - 1.0) / 2.0;
        let t = GapTable::build(alpha, LengthFamily::quadratic(100.0), n, &bump).unwrap();
        DenjoyMap::new(Arc::new(t), bump)
    }

    #[test]
    fn gap_forward_endpoints() {
        let g = map(300);
        let t = g.table();
        for k in [-300, -7, 0, 1, 299] {
            let l = t.len(k);
            assert_eq!(gap_forward(k, 0.0, t, g.bump()).unwrap(), 0.0);
            assert_eq!(gap_forward(k, l, t, g.bump()).unwrap(), t.len(k + 1));
            assert_eq!(gap_forward(k, l / 8.0, t, g.bump()).unwrap(), l / 8.0);
        }
        assert!(matches!(gap_forward(300, 0.0, t, g.bump()), Err(Error::OrbitBeyondTable { .. })));
    }

    #[test]
    fn gap_endpoints_map_to_gap_endpoints() {
        let g = map(200);
        let t = g.table();
        for k in [-200, -3, 0, 5, 199] {
            let ga = g.eval(t.point(k, 0.0));
            assert_eq!(ga.value(), t.start(k + 1));
            let almost_end = g.eval(t.point(k, t.len(k) * (1.0 - 1e-9)));
            assert!(signed_gap(almost_end, wrap(t.gap(k + 1).end()).unwrap()).abs() < 1e-11);
        }
    }

    #[test]
    fn derivative_is_one_on_outer_eighths() {
        let g = map(100);
        let t = g.table();
        for k in [-50, 0, 50] {
            let l = t.len(k);
            for i in 0..=10 {
                let u = l / 8.0 * i as f64 / 10.0;
                assert_eq!(g.gap_derivative(k, u), 1.0);
                assert_eq!(g.gap_derivative(k, l - u), 1.0);
            }
        }
    }

    #[test]
    fn orbit_sits_at_gap_midpoints() {
        let g = map(400);
        let orbit = build_orbit(0.5, 300, &g).unwrap();
        let t = g.table();
        assert_eq!(orbit.u(0), t.len(0) / 2.0);
        for e in orbit.entries() {
            let l = t.len(e.k);
            assert!(e.u > 0.0 && e.u < l);
            assert!((e.u / l - 0.5).abs() < 1e-9);
            assert_eq!(e.alpha, 1.0 + (t.len(e.k + 1) / l - 1.0) * g.bump().eta(e.u / l));
        }
        for k in -299..=300 {
            assert_eq!(orbit.m(k), orbit.alpha(k) + 1.0 / orbit.alpha(k - 1));
        }
    }

    #[test]
    fn orbit_beyond_table_is_an_error() {
        let g = map(50);
        assert!(matches!(build_orbit(0.5, 50, &g), Err(Error::OrbitBeyondTable { .. })));
        assert!(build_orbit(0.5, 49, &g).is_ok());
    }
}
